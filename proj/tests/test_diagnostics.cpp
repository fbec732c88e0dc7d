#include <stdexcept>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "cft/data.hpp"
#include "cft/diagnostics.hpp"
#include "cft/rng.hpp"

using namespace cft;

namespace {

Matrix one_hot(const std::vector<std::size_t>& classes, std::size_t k) {
  Matrix m(classes.size(), k);
  for (std::size_t i = 0; i < classes.size(); ++i) m.at(i, classes[i]) = 1.0;
  return m;
}

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  auto rng = RngStream::make(seed, RngStream::kDataGen, 0);
  Matrix m(n, d);
  for (double& x : m.data) x = rng.next_normal();
  return m;
}

// Two-pass oracle: explicit class means, then mean squared distance.
double naive_tightness(const Matrix& z, const Matrix& labels) {
  const std::size_t k = labels.cols;
  std::vector<std::vector<double>> means(k, std::vector<double>(z.cols, 0.0));
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < z.rows; ++i) {
    const std::size_t c = label_argmax(labels.row(i));
    counts[c] += 1.0;
    for (std::size_t j = 0; j < z.cols; ++j) means[c][j] += z.at(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      for (double& m : means[c]) m /= counts[c];
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    const std::size_t c = label_argmax(labels.row(i));
    for (std::size_t j = 0; j < z.cols; ++j) {
      const double d = z.at(i, j) - means[c][j];
      total += d * d;
    }
  }
  return total / static_cast<double>(z.rows);
}

}  // namespace

TEST_CASE("tightness fixtures") {
  // all points at the class mean
  Matrix z(3, 2);
  for (double& v : z.data) v = 1.0;
  CHECK(tightness(z, one_hot({0, 0, 0}, 1)) == doctest::Approx(0.0));

  // one class at {0, 2} in 1-D: mean 1, each point squared distance 1
  Matrix z2(2, 1);
  z2.at(1, 0) = 2.0;
  CHECK(tightness(z2, one_hot({0, 0}, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tightness is translation invariant") {
  const Matrix z = random_matrix(8, 3, 3);
  auto rng = RngStream::make(4, RngStream::kDataGen, 1);
  std::vector<std::size_t> classes(8);
  for (auto& c : classes) c = rng.next_index(2);
  const Matrix labels = one_hot(classes, 2);
  Matrix shifted = z;
  for (std::size_t i = 0; i < z.rows; ++i) {
    for (std::size_t j = 0; j < z.cols; ++j) shifted.at(i, j) += 7.25;
  }
  CHECK(tightness(shifted, labels) ==
        doctest::Approx(tightness(z, labels)).epsilon(1e-10));
}

TEST_CASE("tightness matches the two-pass oracle") {
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = RngStream::make(100 + trial, RngStream::kDataGen, 2);
    const std::size_t n = 2 + rng.next_index(20);
    const std::size_t k = 2 + rng.next_index(3);
    const Matrix z = random_matrix(n, 1 + rng.next_index(5), 200 + trial);
    std::vector<std::size_t> classes(n);
    for (auto& c : classes) c = rng.next_index(k);
    const Matrix labels = one_hot(classes, k);
    CHECK(tightness(z, labels) ==
          doctest::Approx(naive_tightness(z, labels)).epsilon(1e-12));
  }
}

TEST_CASE("feature_entropy_estimate fixtures") {
  Matrix z(2, 1);
  z.at(1, 0) = 1.0;  // {0, 1}: log(1) both directions -> 0
  CHECK(feature_entropy_estimate(z) == doctest::Approx(0.0).epsilon(1e-12));

  z.at(1, 0) = 2.0;  // {0, 2}: d=1, both terms log 4 -> ln 4
  CHECK(feature_entropy_estimate(z) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-9));
}

TEST_CASE("feature_entropy_estimate scaling law") {
  // scaling all rows by s adds d * log(s^2) = 2 d log s
  const Matrix z = random_matrix(6, 3, 5);
  Matrix scaled = z;
  const double s = 2.5;
  for (double& v : scaled.data) v *= s;
  CHECK(feature_entropy_estimate(scaled) ==
        doctest::Approx(feature_entropy_estimate(z) + 2.0 * 3.0 * std::log(s))
            .epsilon(1e-10));
}

TEST_CASE("feature_entropy_estimate permutation invariance and errors") {
  const Matrix z = random_matrix(5, 2, 6);
  Matrix perm(5, 2);
  const std::size_t order[5] = {3, 0, 4, 1, 2};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 2; ++j) perm.at(i, j) = z.at(order[i], j);
  }
  CHECK(feature_entropy_estimate(perm) ==
        doctest::Approx(feature_entropy_estimate(z)).epsilon(1e-12));
  CHECK_THROWS_AS(feature_entropy_estimate(Matrix(1, 2)), std::invalid_argument);
}

TEST_CASE("feature_entropy_estimate stays finite with coincident rows") {
  Matrix z(3, 2);  // rows 0 and 1 identical
  z.at(2, 0) = 1.0;
  CHECK(std::isfinite(feature_entropy_estimate(z)));
}

TEST_CASE("class_separation fixtures") {
  Matrix z(2, 2);
  z.at(1, 0) = 3.0;
  z.at(1, 1) = 4.0;
  CHECK(class_separation(z, one_hot({0, 1}, 2)) ==
        doctest::Approx(5.0).epsilon(1e-12));

  Matrix same(2, 2);
  CHECK(class_separation(same, one_hot({0, 1}, 2)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(class_separation(z, one_hot({0, 0}, 1)),
                  std::invalid_argument);
}

TEST_CASE("class_separation equals the naive minimum over mean pairs") {
  auto rng = RngStream::make(7, RngStream::kDataGen, 3);
  const std::size_t n = 24, k = 4, d = 3;
  const Matrix z = random_matrix(n, d, 8);
  std::vector<std::size_t> classes(n);
  for (std::size_t i = 0; i < n; ++i) classes[i] = i % k;
  const Matrix labels = one_hot(classes, k);

  std::vector<std::vector<double>> means(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      means[classes[i]][j] += z.at(i, j) / (n / k);
    }
  }
  double best = 1e300;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = means[a][j] - means[b][j];
        d2 += diff * diff;
      }
      best = std::min(best, std::sqrt(d2));
    }
  }
  CHECK(class_separation(z, labels) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("accuracy fixtures") {
  Matrix logits(3, 2);
  logits.at(0, 0) = 2.0;                        // predicts 0
  logits.at(1, 1) = 2.0;                        // predicts 1
  logits.at(2, 0) = 1.0; logits.at(2, 1) = 1.0; // tie -> 0
  CHECK(accuracy(logits, one_hot({0, 1, 0}, 2)) == doctest::Approx(1.0));
  CHECK(accuracy(logits, one_hot({1, 1, 1}, 2)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("accuracy matches a naive argmax loop") {
  for (int trial = 0; trial < 10; ++trial) {
    auto rng = RngStream::make(300 + trial, RngStream::kDataGen, 4);
    const std::size_t n = 1 + rng.next_index(30);
    const std::size_t k = 2 + rng.next_index(4);
    const Matrix logits = random_matrix(n, k, 400 + trial);
    std::vector<std::size_t> classes(n);
    for (auto& c : classes) c = rng.next_index(k);
    const Matrix labels = one_hot(classes, k);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (logits.at(i, j) > logits.at(i, arg)) arg = j;
      }
      if (arg == classes[i]) ++hits;
    }
    CHECK(accuracy(logits, labels) ==
          doctest::Approx(static_cast<double>(hits) / n).epsilon(1e-12));
  }
}

TEST_CASE("finite_diff_grad on known functions") {
  auto sum_sq = [](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    return s;
  };
  const auto g = finite_diff_grad(sum_sq, {1.0, 2.0}, 1e-5);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-8));

  auto constant = [](std::span<const double>) { return 3.0; };
  for (double gi : finite_diff_grad(constant, {0.5, -2.0, 7.0}, 1e-5)) {
    CHECK(gi == doctest::Approx(0.0));
  }
}

TEST_CASE("grad_rel_error edge cases") {
  CHECK(grad_rel_error(std::vector<double>{0.0}, std::vector<double>{0.0}) ==
        0.0);
  const std::vector<double> a = {1.0, 0.0}, f = {0.0, 1.0};
  // ||a-f|| = sqrt(2), denominators 1 + 1
  CHECK(grad_rel_error(a, f) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("theorem1_trend_report directional flags") {
  auto run = [](double tight, double ent) {
    std::vector<MetricsRecord> r(2);
    r[1].tightness = tight;
    r[1].feature_entropy = ent;
    return r;
  };
  const auto same = theorem1_trend_report({run(1.0, 2.0)}, {run(1.0, 2.0)});
  CHECK(!same.tightness_lower);
  CHECK(!same.entropy_higher);

  const auto good = theorem1_trend_report({run(1.0, 3.0), run(1.2, 3.2)},
                                          {run(2.0, 2.0), run(2.2, 2.4)});
  CHECK(good.tightness_lower);
  CHECK(good.entropy_higher);
  CHECK(good.tightness_con == doctest::Approx(1.1));
  CHECK(good.entropy_ce == doctest::Approx(2.2));

  CHECK_THROWS_AS(theorem1_trend_report({}, {run(1.0, 1.0)}),
                  std::invalid_argument);
}
