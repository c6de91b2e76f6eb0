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

#include "wbc/cli.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "wbc/analysis.hpp"
#include "wbc/builtin_models.hpp"
#include "wbc/log_io.hpp"
#include "wbc/model_check.hpp"
#include "wbc/scenario.hpp"

namespace wbc {

namespace fs = std::filesystem;

namespace {

struct RunJob {
  ScenarioConfig config;
  std::string base;  // name without the controller suffix
  std::string name;  // output directory name
  ScenarioLog log;
  RunMetrics metrics;
  std::string error;
};

std::string strip_controller_suffix(const std::string& name) {
  for (const char* s : {"_id", "_pb"}) {
    if (name.size() > 3 && name.ends_with(s)) return name.substr(0, name.size() - 3);
  }
  return name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

int cmd_run(const std::vector<std::string>& scenarios, const fs::path& out_dir, const std::vector<std::uint64_t>& seeds,
            const std::vector<std::string>& controllers, int jobs, const fs::path& dump_qp, std::ostream& out,
            std::ostream& err) {
  std::vector<RunJob> runs;
  for (const auto& path : scenarios) {
    ScenarioConfig base;
    try {
      base = load_scenario(path);
    } catch (const Error& e) {
      err << "error: " << path << ": " << e.what() << "\n";
      return 2;
    }
    std::vector<std::string> ctrl = controllers;
    if (ctrl.empty()) ctrl.push_back(to_string(base.controller.type));
    for (const auto& c : ctrl) {
      for (std::size_t si = 0; si < std::max<std::size_t>(1, seeds.size()); ++si) {
        RunJob job;
        job.config = base;
        job.base = strip_controller_suffix(base.name);
        job.name = base.name;
        if (!controllers.empty()) {
          try {
            job.config.controller.type = controller_kind_from_string(c);
          } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return 2;
          }
          job.name = job.base + "_" + c;
        }
        if (!seeds.empty()) {
          job.config.seed = seeds[si];
          if (seeds.size() > 1) {
            job.name += "_s" + std::to_string(seeds[si]);
            job.base += "_s" + std::to_string(seeds[si]);
          }
        }
        job.config.name = job.name;
        runs.push_back(std::move(job));
      }
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    err << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
    return 2;
  }

  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&]() {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      RunJob& job = runs[i];
      try {
        RunOptions opt;
        if (!dump_qp.empty()) opt.dump_qp = dump_qp / job.name;
        job.log = run_scenario(job.config, opt);
        job.metrics = compute_metrics(job.log);
        const fs::path dir = out_dir / job.name;
        fs::create_directories(dir);
        std::ostringstream log_csv, metrics_csv, summary;
        write_log_csv(log_csv, job.log);
        write_metrics_csv(metrics_csv, job.metrics);
        write_summary(summary, job.log, job.metrics);
        write_file(dir / "log.csv", log_csv.str());
        write_file(dir / "metrics.csv", metrics_csv.str());
        write_file(dir / "summary.txt", summary.str());
        write_file(dir / "config.json", dump_scenario(job.config));
        if (job.log.aborted) job.error = "aborted: " + job.log.abort_reason;
      } catch (const std::exception& e) {
        job.error = e.what();
      }
      std::lock_guard<std::mutex> lock(io);
      out << job.name << ": " << (job.error.empty() ? "ok" : job.error) << " (" << job.log.rows.size() << " ticks, "
          << job.log.wall_time << " s)\n";
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Comparison reports for every base name run with both controllers.
  std::map<std::string, std::map<ControllerKind, const RunJob*>> groups;
  for (const auto& r : runs) {
    if (r.error.empty()) groups[r.base][r.config.controller.type] = &r;
  }
  for (const auto& [base, g] : groups) {
    if (g.size() != 2) continue;
    const RunJob& a = *g.at(ControllerKind::kId);
    const RunJob& b = *g.at(ControllerKind::kPb);
    if (a.config.kind != b.config.kind) continue;
    std::ostringstream cmp;
    write_comparison(cmp, a.log, a.metrics, b.log, b.metrics);
    write_file(out_dir / (base + "_comparison.txt"), cmp.str());
    out << base << ": comparison written\n";
  }

  int failed = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) {
      err << "error: " << r.name << ": " << r.error << "\n";
      ++failed;
    }
  }
  return failed ? 1 : 0;
}

int cmd_verify(const std::string& model_path, int samples, std::ostream& out, std::ostream& err) {
  RobotModel model;
  try {
    model = RobotModel::load(model_path.empty() ? default_biped_path() : fs::path(model_path));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  ModelCheckOptions opt;
  opt.samples = samples;
  bool ok = true;
  char line[160];
  std::snprintf(line, sizeof(line), "%-40s %12s %12s  %s\n", "property", "worst", "tolerance", "result");
  out << line;
  for (const auto& c : check_model(model, opt)) {
    std::snprintf(line, sizeof(line), "%-40s %12.3g %12.3g  %s\n", c.name.c_str(), c.value, c.tolerance,
                  c.passed ? "PASS" : "FAIL");
    out << line;
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

struct AnalyzeArgs {
  double mass = 41.0;
  double kp_id = 150.0, kd_id = 24.49;
  double kp_pb = 6100.0, kd_pb = 1004.1;
  double tau_dist = 100.0;
  double error_id = 0.84 - 0.824;
  double error_pb = 0.016;
  std::vector<double> sweep;
  double response = 0.0;
  double dt = 0.01;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  try {
    char line[200];
    out << "disturbance estimates from steady-state errors\n";
    std::snprintf(line, sizeof(line), "%-4s %10s %10s %10s %12s\n", "mode", "error_m", "mass_kg", "kp", "estimate_N");
    out << line;
    std::snprintf(line, sizeof(line), "%-4s %10.4f %10.4g %10.4g %12.1f\n", "id", a.error_id, a.mass, a.kp_id,
                  estimate_disturbance(a.error_id, a.kp_id, ControllerKind::kId, a.mass));
    out << line;
    std::snprintf(line, sizeof(line), "%-4s %10.4f %10s %10.4g %12.1f\n", "pb", a.error_pb, "-", a.kp_pb,
                  estimate_disturbance(a.error_pb, a.kp_pb, ControllerKind::kPb));
    out << line;

    const OdeParams id{a.mass, a.kp_id, a.kd_id, a.tau_dist, 0.0, 0.0};
    const OdeParams pb{a.mass, a.kp_pb, a.kd_pb, a.tau_dist, 0.0, 0.0};
    out << "\nsteady-state error for tau_dist = " << a.tau_dist << " N\n";
    std::snprintf(line, sizeof(line), "%-4s %10s %10s %14s\n", "mode", "mass_kg", "kp", "error_m");
    out << line;
    std::snprintf(line, sizeof(line), "%-4s %10.4g %10.4g %14.6g\n", "id", a.mass, a.kp_id, steady_state_error_id(id));
    out << line;
    std::snprintf(line, sizeof(line), "%-4s %10.4g %10.4g %14.6g\n", "pb", a.mass, a.kp_pb, steady_state_error_pb(pb));
    out << line;

    if (!a.sweep.empty()) {
      out << "\nmass sweep at fixed gains\n";
      std::snprintf(line, sizeof(line), "%10s %14s %14s\n", "mass_kg", "id_error_m", "pb_error_m");
      out << line;
      for (double m : a.sweep) {
        OdeParams pi = id, pp = pb;
        pi.mass = pp.mass = m;
        std::snprintf(line, sizeof(line), "%10.4g %14.6g %14.6g\n", m, steady_state_error_id(pi),
                      steady_state_error_pb(pp));
        out << line;
      }
    }
    if (a.response > 0.0) {
      if (!(a.dt > 0.0)) throw Error("--dt must be positive");
      out << "\nt,e_id,e_pb\n";
      const int n = static_cast<int>(std::lround(a.response / a.dt));
      for (int k = 0; k <= n; ++k) {
        const double t = k * a.dt;
        std::snprintf(line, sizeof(line), "%.6g,%.9g,%.9g\n", t, ode_response_id(id, t), ode_response_pb(pb, t));
        out << line;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whole-body controller workbench"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios, controllers;
  std::string out_dir = "out", dump_qp;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run scenarios and write logs, metrics and summaries");
  run->add_option("--scenario", scenarios, "Scenario JSON file (repeatable)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seeds, "Seed override (repeatable)");
  run->add_option("--controller", controllers, "Controller override (repeatable)")
      ->check(CLI::IsMember({"id", "pb"}));
  run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--dump-qp", dump_qp, "Directory for QP dumps");

  std::string model_path;
  int samples = 100;
  auto* verify = app.add_subcommand("verify", "Check dynamics properties of a model");
  verify->add_option("--model", model_path, "Model JSON file (default biped when omitted)");
  verify->add_option("--samples", samples, "Random states")->check(CLI::PositiveNumber);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Closed-form steady-state errors and responses");
  analyze->add_option("--mass", aa.mass, "Task inertia (kg)");
  analyze->add_option("--kp-id", aa.kp_id);
  analyze->add_option("--kd-id", aa.kd_id);
  analyze->add_option("--kp-pb", aa.kp_pb);
  analyze->add_option("--kd-pb", aa.kd_pb);
  analyze->add_option("--tau-dist", aa.tau_dist, "Constant disturbance (N)");
  analyze->add_option("--error-id", aa.error_id, "Observed ID steady-state error (m)");
  analyze->add_option("--error-pb", aa.error_pb, "Observed PB steady-state error (m)");
  analyze->add_option("--sweep", aa.sweep, "Masses for the inertia sweep")->delimiter(',');
  analyze->add_option("--response", aa.response, "Print responses up to this time (s)");
  analyze->add_option("--dt", aa.dt, "Response sample interval (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code;
  }
  if (*run) return cmd_run(scenarios, out_dir, seeds, controllers, jobs, dump_qp, out, err);
  if (*verify) return cmd_verify(model_path, samples, out, err);
  return cmd_analyze(aa, out, err);
}

}  // namespace wbc
