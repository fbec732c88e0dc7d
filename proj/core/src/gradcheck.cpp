#include "cft/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "cft/diagnostics.hpp"
#include "cft/losses.hpp"
#include "cft/trainer.hpp"

namespace cft {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.next_normal();
  return m;
}

Matrix random_one_hot(std::size_t n, std::size_t k, RngStream& rng) {
  Matrix labels(n, k);
  for (std::size_t i = 0; i < n; ++i) labels.at(i, rng.next_index(k)) = 1.0;
  return labels;
}

Matrix random_simplex(std::size_t n, std::size_t k, RngStream& rng) {
  Matrix t(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    auto r = t.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      r[j] = rng.next_double() + 1e-3;
      sum += r[j];
    }
    for (std::size_t j = 0; j < k; ++j) r[j] /= sum;
  }
  return t;
}

void corrupt(std::vector<double>& grad, double amount) {
  if (amount <= 0.0 || grad.empty()) return;
  std::size_t idx = 0;
  for (std::size_t i = 1; i < grad.size(); ++i) {
    if (std::abs(grad[i]) > std::abs(grad[idx])) idx = i;
  }
  grad[idx] += amount * (std::abs(grad[idx]) + 1.0);
}

double check_contrastive(std::uint64_t seed, int instances, double h,
                         bool focal, double inject) {
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    auto rng = RngStream::make(seed, RngStream::kDataGen,
                               (focal ? 50000 : 40000) + inst);
    const std::size_t n = 3 + rng.next_index(6);   // 3..8
    const std::size_t d = 2 + rng.next_index(5);   // 2..6
    const std::size_t k = 2 + rng.next_index(2);   // 2..3
    const Matrix labels = random_one_hot(n, k, rng);
    const Matrix v = l2_normalize(random_matrix(n, d, rng));
    const PairSets pairs = build_base_pairs(labels);
    const double tau = 0.07 + 0.4 * rng.next_double();

    auto analytic = focal ? focal_contrastive(v, pairs, tau)
                          : supervised_contrastive(v, pairs, tau);
    std::vector<double> ag = analytic.grad.data;
    if (inst == 0) corrupt(ag, inject);

    auto loss_fn = [&](std::span<const double> flat) {
      Matrix vv(n, d);
      std::copy(flat.begin(), flat.end(), vv.data.begin());
      return focal ? focal_contrastive(vv, pairs, tau).value
                   : supervised_contrastive(vv, pairs, tau).value;
    };
    const auto fd = finite_diff_grad(loss_fn, v.data, h);
    worst = std::max(worst, grad_rel_error(ag, fd));
  }
  return worst;
}

double check_mixed_ce(std::uint64_t seed, int instances, double h,
                      double inject) {
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    auto rng = RngStream::make(seed, RngStream::kDataGen, 60000 + inst);
    const std::size_t n = 2 + rng.next_index(7);
    const std::size_t m = rng.next_index(7);  // generated set may be empty
    const std::size_t k = 2 + rng.next_index(3);
    const Matrix logits = random_matrix(n, k, rng);
    const Matrix logits_gen = random_matrix(m, k, rng);
    const Matrix targets = random_one_hot(n, k, rng);
    const Matrix targets_gen = random_simplex(m, k, rng);

    auto out = mixed_ce(logits, targets, logits_gen, targets_gen);
    std::vector<double> ag = out.grad_orig.data;
    ag.insert(ag.end(), out.grad_gen.data.begin(), out.grad_gen.data.end());
    if (inst == 0) corrupt(ag, inject);

    std::vector<double> flat0 = logits.data;
    flat0.insert(flat0.end(), logits_gen.data.begin(), logits_gen.data.end());
    auto loss_fn = [&](std::span<const double> flat) {
      Matrix lo(n, k), lg(m, k);
      std::copy(flat.begin(), flat.begin() + n * k, lo.data.begin());
      std::copy(flat.begin() + n * k, flat.end(), lg.data.begin());
      return mixed_ce(lo, targets, lg, targets_gen).value;
    };
    const auto fd = finite_diff_grad(loss_fn, flat0, h);
    worst = std::max(worst, grad_rel_error(ag, fd));
  }
  return worst;
}

double check_full_objective(std::uint64_t seed, int instances, double h,
                            double inject) {
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    auto rng = RngStream::make(seed, RngStream::kDataGen, 70000 + inst);
    RunConfig cfg;
    cfg.tau = 0.07;
    cfg.eta = 0.5;
    cfg.alpha = 1.0;
    cfg.encoder_widths = {5};
    cfg.d_z = 3;
    cfg.proj_hidden = 3;
    cfg.proj_dim = 4;

    const std::size_t n = 4 + rng.next_index(5);   // 4..8
    const std::size_t d_in = 3 + rng.next_index(4);  // 3..6
    const std::size_t k = 2 + rng.next_index(2);
    const Matrix x = random_matrix(n, d_in, rng);
    const Matrix labels = random_one_hot(n, k, rng);

    MlpParams params = init_params(d_in, cfg.encoder_widths, cfg.d_z, k,
                                   cfg.proj_hidden, cfg.proj_dim,
                                   seed * 7919 + inst);
    // plan once at the base point; mined indices and lambdas stay frozen
    ForwardTrace probe = forward(params, x);
    auto plan_rng = RngStream::make(seed, RngStream::kMixing, 70000 + inst);
    const BatchPlan plan = plan_batch(probe.head.z, labels, cfg, plan_rng);

    zero_grads(params);
    batch_eval(params, x, labels, plan, cfg, true);
    std::vector<double> ag = flatten_grads(params);
    if (inst == 0) corrupt(ag, inject);

    auto loss_fn = [&](std::span<const double> flat) {
      MlpParams p = params;
      set_params(p, flat);
      return batch_eval(p, x, labels, plan, cfg, false).total;
    };
    const auto fd = finite_diff_grad(loss_fn, flatten_params(params), h);
    worst = std::max(worst, grad_rel_error(ag, fd));
  }
  return worst;
}

}  // namespace

GradCheckReport run_gradcheck_suite(std::uint64_t seed, int instances,
                                    double h, double inject_error) {
  GradCheckReport rep;
  rep.entries.push_back(
      {"supervised_contrastive",
       check_contrastive(seed, instances, h, false, inject_error)});
  rep.entries.push_back(
      {"focal_contrastive",
       check_contrastive(seed, instances, h, true, inject_error)});
  rep.entries.push_back(
      {"mixed_cross_entropy", check_mixed_ce(seed, instances, h, inject_error)});
  rep.entries.push_back(
      {"full_objective",
       check_full_objective(seed, instances, h, inject_error)});
  for (const auto& e : rep.entries) {
    rep.max_rel_error = std::max(rep.max_rel_error, e.max_rel_error);
  }
  return rep;
}

}  // namespace cft
