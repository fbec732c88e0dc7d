#include <stdexcept>
#include <cmath>

#include "doctest.h"

#include "cft/diagnostics.hpp"
#include "cft/losses.hpp"
#include "cft/rng.hpp"

using namespace cft;

namespace {

Matrix one_hot(const std::vector<std::size_t>& classes, std::size_t k) {
  Matrix m(classes.size(), k);
  for (std::size_t i = 0; i < classes.size(); ++i) m.at(i, classes[i]) = 1.0;
  return m;
}

Matrix random_unit(std::size_t n, std::size_t d, std::uint64_t seed) {
  auto rng = RngStream::make(seed, RngStream::kDataGen, 0);
  Matrix m(n, d);
  for (double& x : m.data) x = rng.next_normal();
  return l2_normalize(m);
}

// Independent oracle: direct exponentiation, no log-sum-exp.
double naive_contrastive(const Matrix& v, const PairSets& ps, double tau,
                         bool focal) {
  std::size_t n_active = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < ps.anchor_count(); ++i) {
    if (ps.positives[i].empty()) continue;
    ++n_active;
    double li = 0.0;
    for (std::size_t j : ps.positives[i]) {
      const double num = std::exp(dot(v.row(i), v.row(j)) / tau);
      double den = 0.0;
      for (std::size_t k : ps.candidates[i]) {
        den += std::exp(dot(v.row(i), v.row(k)) / tau);
      }
      const double p = num / den;
      li -= (focal ? (1.0 - p) : 1.0) * std::log(p) /
            static_cast<double>(ps.positives[i].size());
    }
    total += li;
  }
  return n_active == 0 ? 0.0 : total / static_cast<double>(n_active);
}

// The hand-computed 3-sample fixture: v1=[1,0], v2=[0,1], v3=[-1,0],
// classes (a, a, b), tau=1.
struct Fixture3 {
  Matrix v{3, 2};
  PairSets pairs;
  Fixture3() {
    v.at(0, 0) = 1.0;
    v.at(1, 1) = 1.0;
    v.at(2, 0) = -1.0;
    pairs = build_base_pairs(one_hot({0, 0, 1}, 2));
  }
};

}  // namespace

TEST_CASE("contrast_prob_matrix symmetric candidates") {
  Matrix v(3, 2);
  v.at(0, 0) = 1.0;
  v.at(1, 1) = 1.0;
  v.at(2, 1) = 1.0;  // rows 1 and 2 equally similar to anchor 0
  const PairSets ps = build_base_pairs(one_hot({0, 1, 1}, 2));
  const ProbMatrix pm = contrast_prob_matrix(v, ps, 1.0);
  CHECK(pm.active[0] == 1);
  CHECK(pm.p.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pm.p.at(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("contrast_prob_matrix large tau approaches uniform") {
  const Matrix v = random_unit(5, 3, 6);
  const PairSets ps = build_base_pairs(one_hot({0, 1, 0, 1, 0}, 2));
  const ProbMatrix pm = contrast_prob_matrix(v, ps, 1e6);
  for (std::size_t j : ps.candidates[0]) {
    CHECK(pm.p.at(0, j) == doctest::Approx(0.25).epsilon(1e-5));
  }
}

TEST_CASE("contrast_prob_matrix fixture p_12") {
  Fixture3 f;
  const ProbMatrix pm = contrast_prob_matrix(f.v, f.pairs, 1.0);
  CHECK(pm.p.at(0, 1) == doctest::Approx(0.731059).epsilon(1e-6));
  CHECK_THROWS_AS(contrast_prob_matrix(f.v, f.pairs, 0.0),
                  std::invalid_argument);
}

TEST_CASE("prob rows stay on the simplex across temperatures") {
  const Matrix v = random_unit(8, 4, 31);
  auto rng = RngStream::make(31, RngStream::kDataGen, 1);
  std::vector<std::size_t> classes(8);
  for (auto& c : classes) c = rng.next_index(3);
  const PairSets ps = build_base_pairs(one_hot(classes, 3));
  for (double tau : {0.01, 0.07, 0.2, 1.0}) {
    const ProbMatrix pm = contrast_prob_matrix(v, ps, tau);
    for (std::size_t i = 0; i < 8; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < pm.p.cols; ++j) {
        CHECK(pm.p.at(i, j) >= 0.0);
        sum += pm.p.at(i, j);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("supervised_contrastive trivial cases") {
  // identical positive pair: log(e/e) = 0
  Matrix v(2, 2);
  v.at(0, 0) = 1.0;
  v.at(1, 0) = 1.0;
  CHECK(supervised_contrastive(v, build_base_pairs(one_hot({0, 0}, 1)), 1.0)
            .value == doctest::Approx(0.0));
  // no positives anywhere -> 0 by convention
  CHECK(supervised_contrastive(v, build_base_pairs(one_hot({0, 1}, 2)), 1.0)
            .value == 0.0);
}

TEST_CASE("supervised_contrastive hand-computed fixture") {
  Fixture3 f;
  const auto out = supervised_contrastive(f.v, f.pairs, 1.0);
  CHECK(out.value == doctest::Approx(0.503204).epsilon(1e-6));
}

TEST_CASE("focal_contrastive hand-computed fixture") {
  Fixture3 f;
  const auto out = focal_contrastive(f.v, f.pairs, 1.0);
  CHECK(out.value == doctest::Approx(0.215412).epsilon(1e-5));
}

TEST_CASE("focal weight vanishes for a lone certain positive") {
  Matrix v(2, 2);
  v.at(0, 0) = 1.0;
  v.at(1, 0) = 1.0;
  const auto out = focal_contrastive(v, build_base_pairs(one_hot({0, 0}, 1)), 1.0);
  CHECK(out.value == doctest::Approx(0.0));
}

TEST_CASE("both contrastive losses match the naive oracle on fuzzed batches") {
  for (int trial = 0; trial < 50; ++trial) {
    auto rng = RngStream::make(4000 + trial, RngStream::kDataGen, 2);
    const std::size_t n = 2 + rng.next_index(15);
    const std::size_t k = 2 + rng.next_index(3);
    const Matrix v = random_unit(n, 2 + rng.next_index(7), 5000 + trial);
    std::vector<std::size_t> classes(n);
    for (auto& c : classes) c = rng.next_index(k);
    const PairSets ps = build_base_pairs(one_hot(classes, k));
    const double tau = 0.07 + rng.next_double();
    CHECK(supervised_contrastive(v, ps, tau).value ==
          doctest::Approx(naive_contrastive(v, ps, tau, false)).epsilon(1e-10));
    CHECK(focal_contrastive(v, ps, tau).value ==
          doctest::Approx(naive_contrastive(v, ps, tau, true)).epsilon(1e-10));
  }
}

TEST_CASE("focal never exceeds standard contrastive") {
  for (int trial = 0; trial < 50; ++trial) {
    auto rng = RngStream::make(6000 + trial, RngStream::kDataGen, 3);
    const std::size_t n = 2 + rng.next_index(10);
    const Matrix v = random_unit(n, 4, 7000 + trial);
    std::vector<std::size_t> classes(n);
    for (auto& c : classes) c = rng.next_index(2);
    const PairSets ps = build_base_pairs(one_hot(classes, 2));
    CHECK(focal_contrastive(v, ps, 0.2).value <=
          supervised_contrastive(v, ps, 0.2).value + 1e-12);
  }
}

TEST_CASE("contrastive gradients match central differences") {
  for (int trial = 0; trial < 5; ++trial) {
    auto rng = RngStream::make(8000 + trial, RngStream::kDataGen, 4);
    const std::size_t n = 3 + rng.next_index(4);
    const std::size_t d = 2 + rng.next_index(3);
    const Matrix v = random_unit(n, d, 9000 + trial);
    std::vector<std::size_t> classes(n);
    for (auto& c : classes) c = rng.next_index(2);
    const PairSets ps = build_base_pairs(one_hot(classes, 2));
    for (bool focal : {false, true}) {
      const auto analytic = focal ? focal_contrastive(v, ps, 0.3)
                                  : supervised_contrastive(v, ps, 0.3);
      auto loss_fn = [&](std::span<const double> flat) {
        Matrix vv(n, d);
        std::copy(flat.begin(), flat.end(), vv.data.begin());
        return focal ? focal_contrastive(vv, ps, 0.3).value
                     : supervised_contrastive(vv, ps, 0.3).value;
      };
      const auto fd = finite_diff_grad(loss_fn, v.data, 1e-5);
      CHECK(grad_rel_error(analytic.grad.data, fd) <= 1e-5);
    }
  }
}

TEST_CASE("soft_cross_entropy fixtures") {
  Matrix logits(1, 2);
  Matrix target = one_hot({0}, 2);
  CHECK(soft_cross_entropy(logits, target).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  logits.at(0, 0) = std::log(3.0);
  CHECK(soft_cross_entropy(logits, target).value ==
        doctest::Approx(-std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("soft_cross_entropy stationarity at matching target") {
  Matrix logits(2, 3);
  auto rng = RngStream::make(77, RngStream::kDataGen, 5);
  for (double& x : logits.data) x = rng.next_normal();
  Matrix target(2, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    const double lse = log_sum_exp(logits.row(i));
    for (std::size_t k = 0; k < 3; ++k) {
      target.at(i, k) = std::exp(logits.at(i, k) - lse);
    }
  }
  const auto out = soft_cross_entropy(logits, target);
  for (double g : out.grad.data) CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("soft_cross_entropy is shift stable") {
  auto rng = RngStream::make(78, RngStream::kDataGen, 6);
  Matrix logits(4, 3), shifted(4, 3);
  for (std::size_t i = 0; i < logits.data.size(); ++i) {
    logits.data[i] = rng.next_normal();
    shifted.data[i] = logits.data[i] + 12.5;
  }
  const Matrix target = one_hot({0, 1, 2, 1}, 3);
  CHECK(soft_cross_entropy(logits, target).value ==
        doctest::Approx(soft_cross_entropy(shifted, target).value)
            .epsilon(1e-10));
}

TEST_CASE("mixed_ce cases") {
  auto rng = RngStream::make(79, RngStream::kDataGen, 7);
  Matrix logits(3, 2);
  for (double& x : logits.data) x = rng.next_normal();
  const Matrix labels = one_hot({0, 1, 0}, 2);

  // empty B equals plain CE
  const auto plain = soft_cross_entropy(logits, labels);
  CHECK(mixed_ce(logits, labels, Matrix(0, 2), Matrix(0, 2)).value ==
        doctest::Approx(plain.value));

  // identical B doubles the loss
  CHECK(mixed_ce(logits, labels, logits, labels).value ==
        doctest::Approx(2.0 * plain.value).epsilon(1e-12));

  // random case matches the two-term sum
  Matrix gen_logits(2, 2);
  for (double& x : gen_logits.data) x = rng.next_normal();
  Matrix gen_labels(2, 2);
  gen_labels.at(0, 0) = 0.3; gen_labels.at(0, 1) = 0.7;
  gen_labels.at(1, 0) = 0.9; gen_labels.at(1, 1) = 0.1;
  CHECK(mixed_ce(logits, labels, gen_logits, gen_labels).value ==
        doctest::Approx(plain.value +
                        soft_cross_entropy(gen_logits, gen_labels).value)
            .epsilon(1e-12));
}

TEST_CASE("total_objective combines linearly") {
  CHECK(total_objective(1.0, 0.5, 0.0) == 1.0);
  CHECK(total_objective(1.0, 0.0, 1.0) == 1.0);
  CHECK(total_objective(1.0, 0.5, 0.1) == doctest::Approx(1.05));
}
