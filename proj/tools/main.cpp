#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cft/config.hpp"
#include "cft/data.hpp"
#include "cft/gradcheck.hpp"
#include "cft/metrics_io.hpp"
#include "cft/model.hpp"
#include "cft/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

cft::RunConfig load_config(const std::string& path,
                           std::optional<std::uint64_t> seed_override) {
  cft::RunConfig cfg =
      path.empty() ? cft::RunConfig{} : cft::parse_config_file(path);
  if (seed_override) cfg.seed = *seed_override;
  cft::validate_config(cfg);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

ordered_json summary_json(const std::vector<cft::MetricsRecord>& records) {
  const auto& last = records.back();
  ordered_json j;
  j["epochs"] = static_cast<int>(records.size());
  j["final_train_acc"] = last.train_acc;
  j["final_test_acc"] = last.test_acc;
  j["final_loss_total"] = last.loss_total;
  j["final_loss_ce_mixed"] = last.loss_ce_mixed;
  j["final_loss_con_focal"] = last.loss_con_focal;
  j["final_tightness"] = last.tightness;
  j["final_feature_entropy"] = last.feature_entropy;
  return j;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  const cft::RunConfig cfg = load_config(config_path, seed_override);
  fs::create_directories(out_dir);
  const auto [train_ds, test_ds] = cft::make_datasets(cfg);
  const auto result = cft::train_full(cfg, train_ds, test_ds);
  cft::write_metrics_jsonl(result.records, (fs::path(out_dir) / "metrics.jsonl").string());
  write_text(fs::path(out_dir) / "config_resolved.txt", cft::serialize_config(cfg));
  write_text(fs::path(out_dir) / "summary.json",
             summary_json(result.records).dump(2) + "\n");
  return kOk;
}

int cmd_gradcheck(const std::string& config_path,
                  std::optional<std::uint64_t> seed_override,
                  double inject_error) {
  const cft::RunConfig cfg = load_config(config_path, seed_override);
  const auto rep = cft::run_gradcheck_suite(cfg.seed, 20, 1e-5, inject_error);
  for (const auto& e : rep.entries) {
    std::printf("%-24s max rel err %.3e\n", e.name.c_str(), e.max_rel_error);
  }
  std::printf("overall                  max rel err %.3e (threshold 1e-05)\n",
              rep.max_rel_error);
  return rep.passed(1e-5) ? kOk : kCheckFailure;
}

struct AblationRow {
  std::string name;
  std::string label;
  bool contrastive, focal, generation, mixed_ce;
  bool ours;
};

const std::vector<AblationRow>& ablation_rows() {
  static const std::vector<AblationRow> rows = {
      {"ce_only", "CE-tuning", false, false, false, false, false},
      {"ce_contrastive", "CE + contrastive", true, false, false, false, false},
      {"ce_mix", "CE + mix", false, false, true, true, false},
      {"ce_contrastive_mixh", "CE + contrastive + mix-H", true, false, true,
       true, false},
      {"full_focal_mixh", "CE + focal contrastive + mix-H", true, true, true,
       true, true},
  };
  return rows;
}

int cmd_ablate(const std::string& config_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override, int seeds) {
  const cft::RunConfig base = load_config(config_path, seed_override);
  fs::create_directories(out_dir);
  ordered_json comparison = ordered_json::array();
  for (const auto& row : ablation_rows()) {
    double acc_sum = 0.0;
    ordered_json seed_accs = ordered_json::array();
    for (int s = 0; s < seeds; ++s) {
      cft::RunConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(s);
      cfg.use_contrastive = row.contrastive;
      cfg.use_focal = row.focal;
      cfg.use_generation = row.generation;
      cfg.use_mixed_ce = row.mixed_ce;
      const fs::path dir =
          fs::path(out_dir) / row.name / ("seed_" + std::to_string(cfg.seed));
      fs::create_directories(dir);
      const auto [train_ds, test_ds] = cft::make_datasets(cfg);
      const auto records = cft::train(cfg, train_ds, test_ds);
      cft::write_metrics_jsonl(records, (dir / "metrics.jsonl").string());
      write_text(dir / "config_resolved.txt", cft::serialize_config(cfg));
      acc_sum += records.back().test_acc;
      seed_accs.push_back(records.back().test_acc);
    }
    ordered_json entry;
    entry["row"] = row.name;
    entry["label"] = row.label;
    entry["ours"] = row.ours;
    entry["mean_test_acc"] = acc_sum / seeds;
    entry["seed_test_acc"] = seed_accs;
    comparison.push_back(entry);
  }
  write_text(fs::path(out_dir) / "comparison.json", comparison.dump(2) + "\n");
  return kOk;
}

int cmd_dump_features(const std::string& config_path,
                      const std::string& out_path,
                      std::optional<std::uint64_t> seed_override) {
  const cft::RunConfig cfg = load_config(config_path, seed_override);
  const auto [train_ds, test_ds] = cft::make_datasets(cfg);
  auto result = cft::train_full(cfg, train_ds, test_ds);
  const cft::ForwardTrace trace = cft::forward(result.params, train_ds.features);
  cft::Dataset zds;
  zds.features = trace.head.z;
  zds.labels = train_ds.labels;
  zds.class_count = train_ds.class_count;
  cft::dump_embeddings_csv(zds, out_path, "z");
  return kOk;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override) {
  const cft::RunConfig cfg = load_config(config_path, seed_override);
  const auto [train_ds, test_ds] = cft::make_datasets(cfg);
  cft::dump_embeddings_csv(train_ds, out_path, "f");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrast-regularized fine-tuning experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path;
  std::optional<std::uint64_t> seed_override;
  int seeds = 1;
  double inject_error = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key=value lines)");
    sub->add_option("--seed", seed_override, "override the config seed");
  };

  auto* train = app.add_subcommand("train", "train one run and emit metrics");
  add_common(train);
  train->add_option("--out", out_dir, "output directory");

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "verify analytic gradients against central differences");
  add_common(gradcheck);
  gradcheck->add_option("--inject-error", inject_error,
                        "corrupt one analytic gradient (negative control)")
      ->group("");  // hidden

  auto* ablate = app.add_subcommand("ablate", "run the ablation row lattice");
  add_common(ablate);
  ablate->add_option("--out", out_dir, "output directory");
  ablate->add_option("--seeds", seeds, "number of seeds per row")
      ->check(CLI::PositiveNumber);

  auto* dump = app.add_subcommand(
      "dump-features", "re-train and dump final-epoch encoder features");
  add_common(dump);
  dump->add_option("--out", out_path, "output CSV path")->required();

  auto* gen = app.add_subcommand("gen-data",
                                 "generate a synthetic dataset to CSV");
  add_common(gen);
  gen->add_option("--out", out_path, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, out_dir, seed_override);
    if (gradcheck->parsed()) {
      return cmd_gradcheck(config_path, seed_override, inject_error);
    }
    if (ablate->parsed()) {
      return cmd_ablate(config_path, out_dir, seed_override, seeds);
    }
    if (dump->parsed()) {
      return cmd_dump_features(config_path, out_path, seed_override);
    }
    if (gen->parsed()) return cmd_gen_data(config_path, out_path, seed_override);
  } catch (const cft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cft::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
  return kOk;
}
