#pragma once

#include <stdexcept>
#include <vector>

#include "cft/config.hpp"
#include "cft/data.hpp"
#include "cft/diagnostics.hpp"
#include "cft/model.hpp"
#include "cft/pairing.hpp"

namespace cft {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-batch generation plan: mined constituents and mix coefficients are
// frozen here, while generated features are always recomputed from the
// current encoder outputs. This makes one training step a deterministic,
// differentiable function of the parameters, which the finite-difference
// oracle relies on.
struct BatchPlan {
  PairSets base;
  PairSets augmented;
  std::vector<GeneratedPair> generated;  // features as of planning time
};

// Mines hardest pairs on encoder features z (cosine similarity), draws the
// mixup coefficients and random negatives, and augments the pair sets.
// Does nothing when generation is disabled.
BatchPlan plan_batch(const Matrix& z, const Matrix& labels,
                     const RunConfig& cfg, RngStream& rng);

// Generated features/labels recomputed from z under the plan's mix specs.
Matrix generated_features(const Matrix& z, const BatchPlan& plan);
Matrix generated_labels(std::size_t num_classes, const BatchPlan& plan);

struct BatchLosses {
  double total = 0.0;
  double ce = 0.0;
  double con = 0.0;  // value of the contrastive term (before eta)
};

// Forward + losses for one batch; when with_grad is set, accumulates exact
// parameter gradients (mixup gradients are redistributed linearly to the
// constituent rows). Call zero_grads first when starting a step.
BatchLosses batch_eval(MlpParams& params, const Matrix& x,
                       const Matrix& labels, const BatchPlan& plan,
                       const RunConfig& cfg, bool with_grad);

// Builds the train/test datasets described by the config. The synthetic
// test split uses a seed derived from the train seed.
std::pair<Dataset, Dataset> make_datasets(const RunConfig& cfg);

// Full training loop: one MetricsRecord per epoch. Throws NumericalError
// (with epoch/batch identification) if the loss goes non-finite.
std::vector<MetricsRecord> train(const RunConfig& cfg, const Dataset& train_ds,
                                 const Dataset& test_ds);

struct TrainResult {
  std::vector<MetricsRecord> records;
  MlpParams params;
};

// Same loop, but also hands back the trained parameters.
TrainResult train_full(const RunConfig& cfg, const Dataset& train_ds,
                       const Dataset& test_ds);

}  // namespace cft
