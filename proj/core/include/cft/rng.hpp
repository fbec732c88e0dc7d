#pragma once

#include <cstddef>
#include <cstdint>

namespace cft {

// Counter-based SplitMix64 stream. Each stream is keyed by
// (seed, purpose, substream), so adding a new consumer of randomness
// never shifts the draws seen by any other stream.
class RngStream {
 public:
  enum Purpose : std::uint64_t {
    kDataGen = 1,
    kShuffle = 2,
    kMixing = 3,
    kInit = 4,
  };

  static RngStream make(std::uint64_t seed, std::uint64_t purpose,
                        std::uint64_t substream = 0);

  std::uint64_t next_u64();
  double next_double();             // uniform in [0, 1)
  double next_normal();             // standard normal (Box-Muller)
  double next_gamma(double alpha);  // Gamma(alpha, 1), requires alpha > 0
  std::size_t next_index(std::size_t n);  // uniform in [0, n), n > 0

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace cft
