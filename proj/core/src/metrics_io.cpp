#include "cft/metrics_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cft {

std::string metrics_to_jsonl(const std::vector<MetricsRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["epoch"] = r.epoch;
    j["loss_total"] = r.loss_total;
    j["loss_ce_mixed"] = r.loss_ce_mixed;
    j["loss_con_focal"] = r.loss_con_focal;
    j["train_acc"] = r.train_acc;
    j["test_acc"] = r.test_acc;
    j["tightness"] = r.tightness;
    j["feature_entropy"] = r.feature_entropy;
    j["lr"] = r.lr;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_metrics_jsonl(const std::vector<MetricsRecord>& records,
                         const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << metrics_to_jsonl(records);
}

}  // namespace cft
