#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cft {

// Finite-difference verification of every analytic gradient path: the
// supervised contrastive loss, its focal variant, the mixed cross-entropy,
// and the full objective through the shared encoder/projection/mixup graph.
struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed(double threshold = 1e-5) const { return max_rel_error <= threshold; }
};

// `instances` random instances per loss path (n <= 8, d_in <= 6).
// inject_error > 0 corrupts one analytic gradient coordinate by that
// relative amount; used as a negative control of the checker itself.
GradCheckReport run_gradcheck_suite(std::uint64_t seed, int instances = 20,
                                    double h = 1e-5,
                                    double inject_error = 0.0);

}  // namespace cft
