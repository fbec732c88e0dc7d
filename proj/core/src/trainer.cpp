#include "cft/trainer.hpp"

#include <cmath>
#include <string>

#include "cft/losses.hpp"

namespace cft {

BatchPlan plan_batch(const Matrix& z, const Matrix& labels,
                     const RunConfig& cfg, RngStream& rng) {
  BatchPlan plan;
  plan.base = build_base_pairs(labels);
  if (!cfg.use_generation) {
    plan.augmented = plan.base;
    return plan;
  }
  const Matrix sim = cosine_sim_matrix(z);
  const std::size_t n = z.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto hp = hardest_positive(sim, labels, i);
    const auto hn = hardest_negative(sim, labels, i);
    if (hp && hn) {
      const double lam = sample_lambda(cfg.alpha, cfg.lambda_p, rng);
      plan.generated.push_back(gen_hard_positive(
          z.row(*hp), labels.row(*hp), z.row(*hn), labels.row(*hn), lam, i,
          {*hp, *hn}));
    }
    // random negative for the semi-hard negative pair
    const std::size_t ci = label_argmax(labels.row(i));
    std::vector<std::size_t> negatives;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && label_argmax(labels.row(j)) != ci) negatives.push_back(j);
    }
    if (!negatives.empty()) {
      const double lam = sample_lambda(cfg.alpha, cfg.lambda_n, rng);
      const std::size_t neg = negatives[rng.next_index(negatives.size())];
      plan.generated.push_back(gen_hard_negative(
          z.row(i), labels.row(i), z.row(neg), labels.row(neg), lam, i,
          {i, neg}));
    }
  }
  plan.augmented = augment_pair_sets(plan.base, plan.generated);
  return plan;
}

Matrix generated_features(const Matrix& z, const BatchPlan& plan) {
  Matrix out(plan.generated.size(), z.cols);
  for (std::size_t t = 0; t < plan.generated.size(); ++t) {
    const auto& g = plan.generated[t];
    auto a = z.row(g.constituents.first);
    auto b = z.row(g.constituents.second);
    auto o = out.row(t);
    for (std::size_t j = 0; j < z.cols; ++j) {
      o[j] = g.weight_a * a[j] + (1.0 - g.weight_a) * b[j];
    }
  }
  return out;
}

Matrix generated_labels(std::size_t num_classes, const BatchPlan& plan) {
  Matrix out(plan.generated.size(), num_classes);
  for (std::size_t t = 0; t < plan.generated.size(); ++t) {
    const auto& g = plan.generated[t];
    std::copy(g.label.begin(), g.label.end(), out.row(t).begin());
  }
  return out;
}

namespace {

Matrix vstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

}  // namespace

BatchLosses batch_eval(MlpParams& params, const Matrix& x,
                       const Matrix& labels, const BatchPlan& plan,
                       const RunConfig& cfg, bool with_grad) {
  const std::size_t n = x.rows;
  ForwardTrace trace = forward(params, x);
  const Matrix& z = trace.head.z;

  const Matrix z_gen = generated_features(z, plan);
  const Matrix labels_gen = generated_labels(labels.cols, plan);
  HeadTrace gen_trace = forward_generated(params, z_gen);
  const std::size_t n_gen = z_gen.rows;

  BatchLosses out;

  MixedCeOutput ce;
  if (cfg.use_mixed_ce) {
    ce = mixed_ce(trace.head.logits, labels, gen_trace.logits, labels_gen);
  } else {
    ce = mixed_ce(trace.head.logits, labels, Matrix(0, labels.cols),
                  Matrix(0, labels.cols));
  }
  out.ce = ce.value;

  LossOutput con;
  Matrix v_pool;
  if (cfg.use_contrastive) {
    v_pool = vstack(trace.head.v, gen_trace.v);
    con = cfg.use_focal ? focal_contrastive(v_pool, plan.augmented, cfg.tau)
                        : supervised_contrastive(v_pool, plan.augmented, cfg.tau);
    out.con = con.value;
  }

  out.total = total_objective(out.ce, out.con, cfg.use_contrastive ? cfg.eta : 0.0);
  if (!with_grad) return out;

  // upstream gradients per head input
  Matrix dv_orig(n, params.proj2.W.rows);
  Matrix dv_gen(n_gen, params.proj2.W.rows);
  if (cfg.use_contrastive) {
    for (std::size_t i = 0; i < n; ++i) {
      auto src = con.grad.row(i);
      auto dst = dv_orig.row(i);
      for (std::size_t j = 0; j < dv_orig.cols; ++j) dst[j] = cfg.eta * src[j];
    }
    for (std::size_t t = 0; t < n_gen; ++t) {
      auto src = con.grad.row(n + t);
      auto dst = dv_gen.row(t);
      for (std::size_t j = 0; j < dv_gen.cols; ++j) dst[j] = cfg.eta * src[j];
    }
  }
  Matrix dlogits_gen(n_gen, labels.cols);
  if (cfg.use_mixed_ce && ce.grad_gen.rows == n_gen) dlogits_gen = ce.grad_gen;

  Matrix dz = backward_heads(params, trace.head, ce.grad_orig, dv_orig);
  if (n_gen > 0) {
    Matrix dz_gen = backward_heads(params, gen_trace, dlogits_gen, dv_gen);
    // mixup is linear: redistribute to the constituent rows
    for (std::size_t t = 0; t < n_gen; ++t) {
      const auto& g = plan.generated[t];
      auto src = dz_gen.row(t);
      auto da = dz.row(g.constituents.first);
      auto db = dz.row(g.constituents.second);
      for (std::size_t j = 0; j < dz.cols; ++j) {
        da[j] += g.weight_a * src[j];
        db[j] += (1.0 - g.weight_a) * src[j];
      }
    }
  }
  backward_encoder(params, trace, dz);
  return out;
}

std::pair<Dataset, Dataset> make_datasets(const RunConfig& cfg) {
  // distinct derived seed keeps the held-out split disjoint from training
  const std::uint64_t test_seed = cfg.seed ^ 0xA5A5A5A5DEADBEEFULL;
  switch (cfg.dataset) {
    case DatasetKind::Blobs: {
      const int test_n = cfg.test_n_per_class > 0 ? cfg.test_n_per_class
                                                  : cfg.blobs_n_per_class;
      Dataset train = gen_blobs(cfg.blobs_classes, cfg.blobs_n_per_class,
                                cfg.blobs_separation, cfg.blobs_noise,
                                cfg.blobs_dim, cfg.seed);
      Dataset test = gen_blobs(cfg.blobs_classes, test_n, cfg.blobs_separation,
                               cfg.blobs_noise, cfg.blobs_dim, test_seed);
      test.split = "test";
      return {std::move(train), std::move(test)};
    }
    case DatasetKind::Moons: {
      const int test_n = cfg.test_n_per_class > 0 ? cfg.test_n_per_class
                                                  : cfg.moons_n_per_class;
      Dataset train = gen_two_moons(cfg.moons_n_per_class, cfg.moons_noise,
                                    cfg.seed);
      Dataset test = gen_two_moons(test_n, cfg.moons_noise, test_seed);
      test.split = "test";
      return {std::move(train), std::move(test)};
    }
    case DatasetKind::Csv: {
      Dataset train = load_embeddings_csv(cfg.csv_train);
      Dataset test;
      if (!cfg.csv_test.empty()) {
        test = load_embeddings_csv(cfg.csv_test);
        test.split = "test";
        if (test.class_count < train.class_count) {
          // widen one-hot rows so the label matrices agree
          Matrix widened(test.labels.rows, train.class_count);
          for (std::size_t i = 0; i < test.labels.rows; ++i) {
            auto src = test.labels.row(i);
            std::copy(src.begin(), src.end(), widened.row(i).begin());
          }
          test.labels = std::move(widened);
          test.class_count = train.class_count;
        }
      }
      return {std::move(train), std::move(test)};
    }
  }
  throw ConfigError("unknown dataset kind");
}

std::vector<MetricsRecord> train(const RunConfig& cfg, const Dataset& train_ds,
                                 const Dataset& test_ds) {
  return train_full(cfg, train_ds, test_ds).records;
}

TrainResult train_full(const RunConfig& cfg, const Dataset& train_ds,
                       const Dataset& test_ds) {
  validate_config(cfg);
  const std::size_t d_in = train_ds.features.cols;
  const std::size_t k = train_ds.class_count;

  MlpParams params = init_params(
      d_in, cfg.encoder_widths, cfg.d_z, k, cfg.resolved_proj_hidden(),
      cfg.proj_dim, cfg.seed);

  const std::size_t batches_per_epoch =
      epoch_batches(train_ds.size(), cfg.batch_size, 0, cfg.seed).size();
  if (batches_per_epoch == 0) {
    throw std::invalid_argument("train: dataset too small for batch_size");
  }
  Schedule schedule;
  schedule.base_lr = cfg.lr;
  schedule.total_steps = batches_per_epoch * static_cast<std::size_t>(cfg.epochs);
  switch (cfg.schedule) {
    case ScheduleKind::Cosine: schedule.kind = Schedule::Kind::Cosine; break;
    case ScheduleKind::Linear: schedule.kind = Schedule::Kind::Linear; break;
    case ScheduleKind::Constant: schedule.kind = Schedule::Kind::Constant; break;
  }

  std::vector<MetricsRecord> records;
  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = epoch_batches(train_ds.size(), cfg.batch_size,
                                       static_cast<std::uint64_t>(epoch),
                                       cfg.seed);
    double sum_total = 0.0, sum_ce = 0.0, sum_con = 0.0;
    double last_lr = lr_at(schedule, step);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Batch batch = make_batch(train_ds, batches[b]);
      ForwardTrace probe = forward(params, batch.features);
      auto rng = RngStream::make(cfg.seed, RngStream::kMixing,
                                 (static_cast<std::uint64_t>(epoch) << 20) | b);
      const BatchPlan plan = plan_batch(probe.head.z, batch.labels, cfg, rng);

      zero_grads(params);
      const BatchLosses losses =
          batch_eval(params, batch.features, batch.labels, plan, cfg, true);
      if (!std::isfinite(losses.total)) {
        throw NumericalError("non-finite loss at epoch " +
                             std::to_string(epoch + 1) + ", batch " +
                             std::to_string(b + 1));
      }
      sum_total += losses.total;
      sum_ce += losses.ce;
      sum_con += losses.con;
      last_lr = lr_at(schedule, step);
      sgd_momentum_step(params, last_lr, cfg.momentum, cfg.weight_decay);
      ++step;
    }

    MetricsRecord rec;
    rec.epoch = epoch + 1;
    const double inv_b = 1.0 / static_cast<double>(batches.size());
    rec.loss_total = sum_total * inv_b;
    rec.loss_ce_mixed = sum_ce * inv_b;
    rec.loss_con_focal = sum_con * inv_b;
    rec.lr = last_lr;

    ForwardTrace train_eval = forward(params, train_ds.features);
    rec.train_acc = accuracy(train_eval.head.logits, train_ds.labels);
    // diagnostics on row-normalized encoder features, matching the
    // normalized-feature assumption behind both estimators
    const Matrix zn = l2_normalize(train_eval.head.z);
    rec.tightness = tightness(zn, train_ds.labels);
    rec.feature_entropy = feature_entropy_estimate(zn);
    if (test_ds.size() > 0) {
      ForwardTrace test_eval = forward(params, test_ds.features);
      rec.test_acc = accuracy(test_eval.head.logits, test_ds.labels);
    } else {
      rec.test_acc = rec.train_acc;
    }
    records.push_back(rec);
  }
  return {std::move(records), std::move(params)};
}

}  // namespace cft
