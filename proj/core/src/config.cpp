#include "cft/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cft {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected a number, got \"" + v + "\"");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected an integer, got \"" + v + "\"");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got \"" + v + "\"");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<int>(parse_int(key, trim(item))));
  }
  return out;
}

}  // namespace

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Cosine: return "cosine";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Constant: return "constant";
  }
  return "cosine";
}

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Blobs: return "blobs";
    case DatasetKind::Moons: return "moons";
    case DatasetKind::Csv: return "csv";
  }
  return "blobs";
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"eta", [&](auto& k, auto& v) { cfg.eta = parse_double(k, v); }},
      {"alpha", [&](auto& k, auto& v) { cfg.alpha = parse_double(k, v); }},
      {"tau", [&](auto& k, auto& v) { cfg.tau = parse_double(k, v); }},
      {"lambda_n", [&](auto& k, auto& v) { cfg.lambda_n = parse_double(k, v); }},
      {"lambda_p", [&](auto& k, auto& v) { cfg.lambda_p = parse_double(k, v); }},
      {"lr", [&](auto& k, auto& v) { cfg.lr = parse_double(k, v); }},
      {"momentum", [&](auto& k, auto& v) { cfg.momentum = parse_double(k, v); }},
      {"weight_decay",
       [&](auto& k, auto& v) { cfg.weight_decay = parse_double(k, v); }},
      {"schedule",
       [&](auto& k, auto& v) {
         if (v == "cosine") cfg.schedule = ScheduleKind::Cosine;
         else if (v == "linear") cfg.schedule = ScheduleKind::Linear;
         else if (v == "constant") cfg.schedule = ScheduleKind::Constant;
         else throw ConfigError(k + ": expected cosine|linear|constant");
       }},
      {"epochs", [&](auto& k, auto& v) { cfg.epochs = (int)parse_int(k, v); }},
      {"batch_size",
       [&](auto& k, auto& v) { cfg.batch_size = (int)parse_int(k, v); }},
      {"seed",
       [&](auto& k, auto& v) { cfg.seed = (std::uint64_t)parse_int(k, v); }},
      {"encoder_widths",
       [&](auto& k, auto& v) { cfg.encoder_widths = parse_int_list(k, v); }},
      {"d_z", [&](auto& k, auto& v) { cfg.d_z = (int)parse_int(k, v); }},
      {"proj_hidden",
       [&](auto& k, auto& v) { cfg.proj_hidden = (int)parse_int(k, v); }},
      {"proj_dim",
       [&](auto& k, auto& v) { cfg.proj_dim = (int)parse_int(k, v); }},
      {"use_contrastive",
       [&](auto& k, auto& v) { cfg.use_contrastive = parse_bool(k, v); }},
      {"use_focal", [&](auto& k, auto& v) { cfg.use_focal = parse_bool(k, v); }},
      {"use_generation",
       [&](auto& k, auto& v) { cfg.use_generation = parse_bool(k, v); }},
      {"use_mixed_ce",
       [&](auto& k, auto& v) { cfg.use_mixed_ce = parse_bool(k, v); }},
      {"dataset",
       [&](auto& k, auto& v) {
         if (v == "blobs") cfg.dataset = DatasetKind::Blobs;
         else if (v == "moons") cfg.dataset = DatasetKind::Moons;
         else if (v == "csv") cfg.dataset = DatasetKind::Csv;
         else throw ConfigError(k + ": expected blobs|moons|csv");
       }},
      {"blobs_classes",
       [&](auto& k, auto& v) { cfg.blobs_classes = (int)parse_int(k, v); }},
      {"blobs_n_per_class",
       [&](auto& k, auto& v) { cfg.blobs_n_per_class = (int)parse_int(k, v); }},
      {"blobs_separation",
       [&](auto& k, auto& v) { cfg.blobs_separation = parse_double(k, v); }},
      {"blobs_noise",
       [&](auto& k, auto& v) { cfg.blobs_noise = parse_double(k, v); }},
      {"blobs_dim",
       [&](auto& k, auto& v) { cfg.blobs_dim = (int)parse_int(k, v); }},
      {"moons_n_per_class",
       [&](auto& k, auto& v) { cfg.moons_n_per_class = (int)parse_int(k, v); }},
      {"moons_noise",
       [&](auto& k, auto& v) { cfg.moons_noise = parse_double(k, v); }},
      {"csv_train", [&](auto&, auto& v) { cfg.csv_train = v; }},
      {"csv_test", [&](auto&, auto& v) { cfg.csv_test = v; }},
      {"test_n_per_class",
       [&](auto& k, auto& v) { cfg.test_n_per_class = (int)parse_int(k, v); }},
  };

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": unknown key \"" + key + "\"");
    }
    it->second(key, val);
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw ConfigError("tau: must be > 0");
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha: must be > 0");
  if (!(cfg.eta >= 0.0)) throw ConfigError("eta: must be >= 0");
  if (cfg.lambda_n < 0.0 || cfg.lambda_n > 1.0) throw ConfigError("lambda_n: must be in [0,1]");
  if (cfg.lambda_p < 0.0 || cfg.lambda_p > 1.0) throw ConfigError("lambda_p: must be in [0,1]");
  if (cfg.epochs < 1) throw ConfigError("epochs: must be >= 1");
  if (cfg.batch_size < 2) throw ConfigError("batch_size: must be >= 2");
  if (!(cfg.lr >= 0.0)) throw ConfigError("lr: must be >= 0");
  if (cfg.d_z < 1) throw ConfigError("d_z: must be >= 1");
  if (cfg.proj_dim < 1) throw ConfigError("proj_dim: must be >= 1");
  for (int w : cfg.encoder_widths) {
    if (w < 1) throw ConfigError("encoder_widths: widths must be >= 1");
  }
  if (cfg.dataset == DatasetKind::Csv && cfg.csv_train.empty()) {
    throw ConfigError("csv_train: required when dataset=csv");
  }
  if (cfg.dataset == DatasetKind::Blobs) {
    if (cfg.blobs_classes < 2) throw ConfigError("blobs_classes: must be >= 2");
    if (cfg.blobs_n_per_class < 1) throw ConfigError("blobs_n_per_class: must be >= 1");
    if (cfg.blobs_dim < 1) throw ConfigError("blobs_dim: must be >= 1");
    if (!(cfg.blobs_noise > 0.0)) throw ConfigError("blobs_noise: must be > 0");
  }
  if (cfg.dataset == DatasetKind::Moons && cfg.moons_n_per_class < 1) {
    throw ConfigError("moons_n_per_class: must be >= 1");
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "eta=" << num(cfg.eta) << "\n"
      << "alpha=" << num(cfg.alpha) << "\n"
      << "tau=" << num(cfg.tau) << "\n"
      << "lambda_n=" << num(cfg.lambda_n) << "\n"
      << "lambda_p=" << num(cfg.lambda_p) << "\n"
      << "lr=" << num(cfg.lr) << "\n"
      << "momentum=" << num(cfg.momentum) << "\n"
      << "weight_decay=" << num(cfg.weight_decay) << "\n"
      << "schedule=" << to_string(cfg.schedule) << "\n"
      << "epochs=" << cfg.epochs << "\n"
      << "batch_size=" << cfg.batch_size << "\n"
      << "seed=" << cfg.seed << "\n";
  out << "encoder_widths=";
  for (std::size_t i = 0; i < cfg.encoder_widths.size(); ++i) {
    if (i) out << ",";
    out << cfg.encoder_widths[i];
  }
  out << "\n"
      << "d_z=" << cfg.d_z << "\n"
      << "proj_hidden=" << cfg.resolved_proj_hidden() << "\n"
      << "proj_dim=" << cfg.proj_dim << "\n"
      << "use_contrastive=" << (cfg.use_contrastive ? "true" : "false") << "\n"
      << "use_focal=" << (cfg.use_focal ? "true" : "false") << "\n"
      << "use_generation=" << (cfg.use_generation ? "true" : "false") << "\n"
      << "use_mixed_ce=" << (cfg.use_mixed_ce ? "true" : "false") << "\n"
      << "dataset=" << to_string(cfg.dataset) << "\n";
  switch (cfg.dataset) {
    case DatasetKind::Blobs:
      out << "blobs_classes=" << cfg.blobs_classes << "\n"
          << "blobs_n_per_class=" << cfg.blobs_n_per_class << "\n"
          << "blobs_separation=" << num(cfg.blobs_separation) << "\n"
          << "blobs_noise=" << num(cfg.blobs_noise) << "\n"
          << "blobs_dim=" << cfg.blobs_dim << "\n";
      break;
    case DatasetKind::Moons:
      out << "moons_n_per_class=" << cfg.moons_n_per_class << "\n"
          << "moons_noise=" << num(cfg.moons_noise) << "\n";
      break;
    case DatasetKind::Csv:
      out << "csv_train=" << cfg.csv_train << "\n";
      if (!cfg.csv_test.empty()) out << "csv_test=" << cfg.csv_test << "\n";
      break;
  }
  out << "test_n_per_class=" << cfg.test_n_per_class << "\n";
  return out.str();
}

}  // namespace cft
