#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cft {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScheduleKind { Cosine, Linear, Constant };

enum class DatasetKind { Blobs, Moons, Csv };

// All hyper-parameters of a run. Flat key=value text format, one
// assignment per line, '#' comments; any omitted key takes the default
// shown here.
struct RunConfig {
  // objective
  double eta = 0.1;
  double alpha = 1.0;
  double tau = 0.07;
  double lambda_n = 0.8;
  double lambda_p = 0.0;

  // optimizer
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  ScheduleKind schedule = ScheduleKind::Cosine;

  // run shape
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 1;

  // network
  std::vector<int> encoder_widths = {16};
  int d_z = 8;
  int proj_hidden = 0;  // 0 -> same as d_z
  int proj_dim = 32;

  // ablation switches
  bool use_contrastive = true;
  bool use_focal = true;
  bool use_generation = true;
  bool use_mixed_ce = true;

  // dataset
  DatasetKind dataset = DatasetKind::Blobs;
  int blobs_classes = 3;
  int blobs_n_per_class = 30;
  double blobs_separation = 3.0;
  double blobs_noise = 1.0;
  int blobs_dim = 5;
  int moons_n_per_class = 100;
  double moons_noise = 0.1;
  std::string csv_train;
  std::string csv_test;
  int test_n_per_class = 0;  // 0 -> same as train per-class count

  int resolved_proj_hidden() const { return proj_hidden > 0 ? proj_hidden : d_z; }
};

// Parses a config file / text. Unknown keys and invalid values raise
// ConfigError with the offending field named.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Validates cross-field invariants; raises ConfigError.
void validate_config(const RunConfig& cfg);

// Full key=value dump, defaults filled in, parseable by parse_config_text.
std::string serialize_config(const RunConfig& cfg);

std::string to_string(ScheduleKind k);
std::string to_string(DatasetKind k);

}  // namespace cft
