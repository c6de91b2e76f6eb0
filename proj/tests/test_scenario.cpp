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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wbc/analysis.hpp"
#include "wbc/log_io.hpp"
#include "wbc/scenario.hpp"

namespace wbc {
namespace {

namespace fs = std::filesystem;
const fs::path kScenarios = fs::path(WBC_SOURCE_DIR) / "scenarios";

std::string message_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioConfig, ShippedScenariosParseAndValidate) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() != ".json") continue;
    const ScenarioConfig c = load_scenario(e.path());
    EXPECT_EQ(c.name, e.path().stem().string());
    EXPECT_NO_THROW(c.load_model());
    ++n;
  }
  EXPECT_EQ(n, 10);
}

TEST(ScenarioConfig, UnknownKeyIsNamed) {
  EXPECT_NE(message_of(R"({"scenario": "squat", "controller": {"centroidal": {"kpp": 1}}})")
                .find("controller.centroidal.kpp"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"scenario": "squat", "durration": 2})").find("durration"), std::string::npos);
}

TEST(ScenarioConfig, SyntaxErrorReportsLine) {
  const std::string m = message_of("{\n  \"scenario\": \"squat\",\n  oops\n}");
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;
}

TEST(ScenarioConfig, RequiresKind) {
  EXPECT_NE(message_of(R"({"duration": 1})").find("scenario"), std::string::npos);
  EXPECT_THROW(parse_scenario(R"({"scenario": "walk"})"), Error);
}

TEST(ScenarioConfig, CraneAndModelRules) {
  EXPECT_THROW(parse_scenario(R"({"scenario": "squat", "plant": {"crane": {"mode": "welded"}}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"scenario": "foot_swing", "plant": {"crane": {"mode": "off"}}})"), Error);
  EXPECT_THROW(parse_scenario(R"({"scenario": "slider", "model": {"path": "x.json"}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"scenario": "squat", "control_rate": 3000})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"scenario": "squat", "duration": -1})"), ConfigError);
}

TEST(ScenarioConfig, ScalarGainsBroadcast) {
  const ScenarioConfig c = parse_scenario(R"({"scenario": "squat", "controller": {"centroidal": {"kp": 5}}})");
  EXPECT_EQ(c.controller.centroidal.kp, Vec6::Constant(5.0));
  EXPECT_THROW(parse_scenario(R"({"scenario": "squat", "controller": {"centroidal": {"kp": [1, 2]}}})"),
               ConfigError);
}

TEST(ScenarioConfig, DumpRoundTrips) {
  for (const char* f : {"jump_pb.json", "squat_disturbed_id.json", "slider_id.json", "foot_swing_pb.json"}) {
    const ScenarioConfig a = load_scenario(kScenarios / f);
    const std::string d = dump_scenario(a);
    const ScenarioConfig b = parse_scenario(d, {}, "other");
    EXPECT_EQ(dump_scenario(b), d) << f;
    EXPECT_EQ(b.name, a.name);
  }
}

TEST(ScenarioConfig, UnknownDisturbanceJointIsNamed) {
  const ScenarioConfig c = parse_scenario(R"({"scenario": "slider", "disturbance": {"coulomb": {"elbow": 1}}})");
  try {
    run_scenario(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("elbow"), std::string::npos);
  }
}

ScenarioConfig slider(ControllerKind type, double kp, double kd, double duration = 4.0) {
  ScenarioConfig c = load_scenario(kScenarios / "slider_id.json");
  c.controller.type = type;
  c.controller.end_effector.kp.setConstant(kp);
  c.controller.end_effector.kd.setConstant(kd);
  c.duration = duration;
  return c;
}

TEST(RunScenario, SliderSteadyStateFollowsClosedForms) {
  const double tau = 100.0, m = 41.0;
  const ScenarioLog id = run_scenario(slider(ControllerKind::kId, 150.0, 24.49));
  const ScenarioLog pb = run_scenario(slider(ControllerKind::kPb, 6100.0, 1004.1));
  ASSERT_FALSE(id.aborted);
  ASSERT_FALSE(pb.aborted);
  // Error read as ref - meas; a positive bias pushes the carriage forward.
  const double eid = compute_metrics(id).channel("slider_x").steady_state_error;
  const double epb = compute_metrics(pb).channel("slider_x").steady_state_error;
  EXPECT_NEAR(eid, -tau / (m * 150.0), 0.02 * tau / (m * 150.0));
  EXPECT_NEAR(epb, -tau / 6100.0, 0.02 * tau / 6100.0);
}

TEST(RunScenario, Deterministic) {
  ScenarioConfig c = slider(ControllerKind::kPb, 6100.0, 1004.1, 0.5);
  c.sensors.position_noise = 1e-4;
  c.sensors.velocity_noise = 1e-3;
  auto csv = [](const ScenarioConfig& cfg) {
    std::ostringstream s;
    write_log_csv(s, run_scenario(cfg));
    return s.str();
  };
  const std::string a = csv(c), b = csv(c);
  EXPECT_EQ(a, b);
  c.seed = 7;
  EXPECT_NE(csv(c), a);
}

TEST(RunScenario, ShortSquatBothControllers) {
  for (const char* f : {"squat_id.json", "squat_pb.json"}) {
    ScenarioConfig c = load_scenario(kScenarios / f);
    c.duration = 0.3;
    const ScenarioLog log = run_scenario(c);
    EXPECT_FALSE(log.aborted) << log.abort_reason;
    EXPECT_EQ(log.channels.front(), "com_x");
    EXPECT_EQ(log.rows.size(), 300u);
    EXPECT_EQ(log.qp_failures, 0);
    EXPECT_EQ(log.grf_names.size(), 12u);
    // Standing still before the sinusoid starts.
    const int z = log.channel("com_z");
    EXPECT_NEAR(log.rows.back().meas[z], log.nominal[z], 2e-3);
  }
}

TEST(LogIo, SchemaAndColumnOrder) {
  ScenarioConfig c = slider(ControllerKind::kId, 150.0, 24.49, 0.01);
  const ScenarioLog log = run_scenario(c);
  std::ostringstream s;
  write_log_csv(s, log);
  std::istringstream in(s.str());
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("# wbcbench-log v1", 0), 0u);
  std::istringstream again(s.str());
  const CsvLog parsed = read_log_csv(again);
  const std::vector<std::string> expect = {"t",     "phase",     "ref_slider_x", "meas_slider_x",
                                           "tau_1", "qp_status", "qp_iters"};
  EXPECT_EQ(parsed.columns, expect);
  ASSERT_EQ(parsed.rows.size(), log.rows.size());
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    EXPECT_NEAR(parsed.rows[i][0], log.rows[i].t, 1e-12);
    EXPECT_NEAR(parsed.rows[i][2], log.rows[i].meas[0], 1e-9 * std::max(1.0, std::abs(log.rows[i].meas[0])));
    EXPECT_EQ(parsed.statuses[i], "optimal");
  }
}

TEST(LogIo, BipedColumnsIncludeTorquesAndWrenches) {
  ScenarioConfig c = load_scenario(kScenarios / "squat_pb.json");
  c.duration = 0.002;
  std::ostringstream s;
  write_log_csv(s, run_scenario(c));
  std::istringstream in(s.str());
  const CsvLog parsed = read_log_csv(in);
  ASSERT_EQ(parsed.columns.size(), 2u + 6 + 6 + 12 + 12 + 2);
  EXPECT_EQ(parsed.columns[2], "ref_com_x");
  EXPECT_EQ(parsed.columns[8], "meas_com_x");
  EXPECT_EQ(parsed.columns[14], "tau_1");
  EXPECT_EQ(parsed.columns[26], "grf_l_sole_fx");
  EXPECT_EQ(parsed.columns.back(), "qp_iters");
}

TEST(LogIo, RejectsForeignFiles) {
  std::istringstream in("t,x\n0,1\n");
  EXPECT_THROW(read_log_csv(in), Error);
}

}  // namespace
}  // namespace wbc
