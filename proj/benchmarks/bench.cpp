#include <benchmark/benchmark.h>

#include "cft/losses.hpp"
#include "cft/numkernel.hpp"
#include "cft/pairing.hpp"
#include "cft/rng.hpp"
#include "cft/trainer.hpp"

namespace {

cft::Matrix random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  auto rng = cft::RngStream::make(seed, cft::RngStream::kDataGen, 0);
  cft::Matrix m(n, d);
  for (double& x : m.data) x = rng.next_normal();
  return m;
}

cft::Matrix random_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
  auto rng = cft::RngStream::make(seed, cft::RngStream::kDataGen, 1);
  cft::Matrix labels(n, k);
  for (std::size_t i = 0; i < n; ++i) labels.at(i, rng.next_index(k)) = 1.0;
  return labels;
}

void BM_CosineSimMatrix(benchmark::State& state) {
  const auto m = random_features(state.range(0), 64, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cft::cosine_sim_matrix(m));
  }
}
BENCHMARK(BM_CosineSimMatrix)->Arg(64)->Arg(256);

void BM_FocalContrastive(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto v = cft::l2_normalize(random_features(n, 32, 11));
  const auto labels = random_labels(n, 4, 11);
  const auto pairs = cft::build_base_pairs(labels);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cft::focal_contrastive(v, pairs, 0.07));
  }
}
BENCHMARK(BM_FocalContrastive)->Arg(32)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
  cft::RunConfig cfg;
  cfg.epochs = 1;
  cfg.blobs_n_per_class = 40;
  const auto [train_ds, test_ds] = cft::make_datasets(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cft::train(cfg, train_ds, test_ds));
  }
}
BENCHMARK(BM_TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
