#pragma once

#include <string>
#include <vector>

#include "cft/diagnostics.hpp"

namespace cft {

// One JSON object per line, fixed key order:
// {"epoch","loss_total","loss_ce_mixed","loss_con_focal","train_acc",
//  "test_acc","tightness","feature_entropy","lr"}
std::string metrics_to_jsonl(const std::vector<MetricsRecord>& records);

void write_metrics_jsonl(const std::vector<MetricsRecord>& records,
                         const std::string& path);

}  // namespace cft
