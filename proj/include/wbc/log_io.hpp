// Copyright 2026 The wbcbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "wbc/analysis.hpp"
#include "wbc/scenario.hpp"

namespace wbc {

inline constexpr const char* kLogSchema = "wbcbench-log v1";

/// Column order: t, phase, ref_*, meas_*, tau_1..n, grf_*, qp_status,
/// qp_iters. The first line is "# wbcbench-log v1".
void write_log_csv(std::ostream& out, const ScenarioLog& log);
/// One row per channel, then one row of run totals.
void write_metrics_csv(std::ostream& out, const RunMetrics& metrics);
void write_summary(std::ostream& out, const ScenarioLog& log, const RunMetrics& metrics);
/// Per-channel deltas (b - a) of two runs of the same scenario kind.
void write_comparison(std::ostream& out, const ScenarioLog& a, const RunMetrics& ma, const ScenarioLog& b,
                      const RunMetrics& mb);

/// Parsed back from write_log_csv output.
struct CsvLog {
  std::vector<std::string> columns;
  std::vector<std::string> phases;
  std::vector<std::string> statuses;
  /// Numeric columns with phase and qp_status removed, one vector per row.
  std::vector<std::vector<double>> rows;
};
CsvLog read_log_csv(std::istream& in);

}  // namespace wbc
