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

#include "wbc/log_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace wbc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v + 0.0);
  return buf;
}

}  // namespace

void write_log_csv(std::ostream& out, const ScenarioLog& log) {
  out << "# " << kLogSchema << " scenario=" << log.scenario << " controller=" << to_string(log.controller) << "\n";
  out << "t,phase";
  for (const auto& c : log.channels) out << ",ref_" << c;
  for (const auto& c : log.channels) out << ",meas_" << c;
  for (std::size_t k = 0; k < log.joints.size(); ++k) out << ",tau_" << k + 1;
  for (const auto& g : log.grf_names) out << ",grf_" << g;
  out << ",qp_status,qp_iters\n";
  for (const auto& r : log.rows) {
    out << num(r.t) << ',' << r.phase;
    for (int i = 0; i < r.ref.size(); ++i) out << ',' << num(r.ref[i]);
    for (int i = 0; i < r.meas.size(); ++i) out << ',' << num(r.meas[i]);
    for (int i = 0; i < r.tau.size(); ++i) out << ',' << num(r.tau[i]);
    for (int i = 0; i < r.grf.size(); ++i) out << ',' << num(r.grf[i]);
    out << ',' << to_string(r.status) << ',' << r.iterations << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const RunMetrics& m) {
  out << "channel,steady_state_error,rms,overshoot,undershoot\n";
  for (const auto& c : m.channels) {
    out << c.name << ',' << num(c.steady_state_error) << ',' << num(c.rms) << ',' << num(c.overshoot) << ','
        << num(c.undershoot) << '\n';
  }
  out << "# peak_grf=" << num(m.peak_grf) << " constraint_violations=" << m.constraint_violations
      << " qp_failures=" << m.qp_failures << " window=[" << num(m.window_start) << "," << num(m.window_end)
      << "] samples=" << m.samples << '\n';
}

void write_summary(std::ostream& out, const ScenarioLog& log, const RunMetrics& m) {
  char line[256];
  out << "scenario    " << log.scenario << "\n";
  out << "controller  " << to_string(log.controller) << "\n";
  std::snprintf(line, sizeof(line), "duration    %.3f s (%zu ticks, wall %.2f s)\n",
                log.rows.empty() ? 0.0 : log.rows.back().t, log.rows.size(), log.wall_time);
  out << line;
  out << "status      " << (log.aborted ? "aborted: " + log.abort_reason : std::string("completed")) << "\n";
  std::snprintf(line, sizeof(line), "window      [%.3f, %.3f] s, %d samples\n", m.window_start, m.window_end, m.samples);
  out << line << "\n";
  std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s %14s\n", "channel", "steady_state", "rms", "overshoot",
                "undershoot");
  out << line;
  for (const auto& c : m.channels) {
    std::snprintf(line, sizeof(line), "%-12s %14.6g %14.6g %14.6g %14.6g\n", c.name.c_str(), c.steady_state_error, c.rms,
                  c.overshoot, c.undershoot);
    out << line;
  }
  std::snprintf(line, sizeof(line), "\npeak_grf_z  %.3f N\nviolations  %d\nqp_failures %d\nfriction    %.3g N max excess\n",
                m.peak_grf, m.constraint_violations, m.qp_failures, log.max_friction_violation);
  out << line;
  if (log.jump.standing_height > 0.0) {
    const JumpSummary& j = log.jump;
    std::snprintf(line, sizeof(line),
                  "\njump        liftoff %.3f  touchdown %.3f  settled %.3f (%s)\n"
                  "            apex %.4f m (plan %.4f)  touchdown acc jump %.3g  landing slip %.5f m\n",
                  j.liftoff_time, j.touchdown_time, j.settle_time, j.reached_settled ? "reached" : "not reached", j.apex,
                  j.planned_apex,
                  j.touchdown_discontinuity, j.landing_slip);
    out << line;
  }
}

void write_comparison(std::ostream& out, const ScenarioLog& a, const RunMetrics& ma, const ScenarioLog& b,
                      const RunMetrics& mb) {
  char line[256];
  out << "comparison  " << a.scenario << " (" << to_string(a.controller) << ") vs " << b.scenario << " ("
      << to_string(b.controller) << ")\n\n";
  std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s %14s %14s\n", "channel", "sse_a", "sse_b", "delta_sse",
                "rms_a", "rms_b");
  out << line;
  for (const auto& ca : ma.channels) {
    for (const auto& cb : mb.channels) {
      if (cb.name != ca.name) continue;
      std::snprintf(line, sizeof(line), "%-12s %14.6g %14.6g %14.6g %14.6g %14.6g\n", ca.name.c_str(),
                    ca.steady_state_error, cb.steady_state_error, cb.steady_state_error - ca.steady_state_error, ca.rms,
                    cb.rms);
      out << line;
    }
  }
  std::snprintf(line, sizeof(line), "\npeak_grf_z  %.3f / %.3f N\nviolations  %d / %d\nqp_failures %d / %d\n",
                ma.peak_grf, mb.peak_grf, ma.constraint_violations, mb.constraint_violations, ma.qp_failures,
                mb.qp_failures);
  out << line;
  if (a.jump.liftoff_time >= 0.0 && b.jump.liftoff_time >= 0.0) {
    std::snprintf(line, sizeof(line), "apex        %.4f / %.4f m (plan %.4f)\nlanding slip %.5f / %.5f m\n",
                  a.jump.apex, b.jump.apex, a.jump.planned_apex, a.jump.landing_slip, b.jump.landing_slip);
    out << line;
  }
}

CsvLog read_log_csv(std::istream& in) {
  CsvLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind(std::string("# ") + kLogSchema, 0) != 0) {
    throw Error("log csv: missing schema line");
  }
  if (!std::getline(in, line)) throw Error("log csv: missing header");
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) log.columns.push_back(c);
  }
  const std::size_t ncol = log.columns.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::vector<std::string> cells;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (cells.size() != ncol) throw Error("log csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(ncol));
    std::vector<double> row;
    for (std::size_t i = 0; i < ncol; ++i) {
      if (log.columns[i] == "phase") {
        log.phases.push_back(cells[i]);
      } else if (log.columns[i] == "qp_status") {
        log.statuses.push_back(cells[i]);
      } else {
        row.push_back(std::stod(cells[i]));
      }
    }
    log.rows.push_back(std::move(row));
  }
  return log;
}

}  // namespace wbc
