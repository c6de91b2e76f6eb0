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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wbc/qp_solver.hpp"
#include "wbc/sim.hpp"
#include "wbc/trajectory.hpp"

namespace wbc {

enum class ScenarioKind { kFootSwing, kSquat, kJump, kSlider };
enum class ControllerKind { kId, kPb };

const char* to_string(ScenarioKind kind);
const char* to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

/// Raised for malformed scenario files. The message names the offending key
/// or the line and column of a syntax error.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GainSet {
  Vec6 kp = Vec6::Zero();
  Vec6 kd = Vec6::Zero();
  Vec6 weight = Vec6::Ones();
};

struct ControllerConfig {
  ControllerKind type = ControllerKind::kId;
  /// CoM position and base orientation.
  GainSet centroidal;
  /// Feet in swing and flight, or the slider frame.
  GainSet end_effector;
  double mu = 0.7;
  bool cop_constraints = true;
  double regularization = 1e-12;
  Vec6 qc = Vec6::Ones();
  Vec6 qf = (Vec6() << 1e-5, 1e-5, 1e-8, 1e-8, 1e-8, 1e-8).finished();
  Vec6 landing_damping = Vec6::Zero();
  double condition_bound = 1e6;
  QpSettings qp;
};

struct TrajectoryConfig {
  double amplitude_pp = 0.2;
  double frequency = 0.4;
  double start_time = 0.5;  // hold before the sinusoid starts
  double bend = 0.6;        // initial crouch of the biped
  double crane_lift = 0.3;  // foot swing: base raised above the stance pose
  double initial_offset = 0.0;  // slider: starting joint position
  JumpConfig jump;              // standing_height is filled in at run time
};

struct ModelSource {
  std::filesystem::path path;  // JSON model file
  std::string builtin;         // "slider" instead of a file
  double mass = 41.0;          // builtin slider mass
};

/// Disturbances keyed by joint name; "*" applies to every joint.
struct DisturbanceConfig {
  std::map<std::string, double> coulomb;
  std::map<std::string, double> viscous;
  std::map<std::string, double> joint_bias;
  std::vector<AttachedMass> masses;
  std::vector<TimedWrench> wrenches;
  std::map<std::string, double> force_bias;

  DisturbanceSpec resolve(const RobotModel& model) const;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::kSquat;
  ModelSource model;
  double duration = 1.0;
  double control_rate = 1000.0;  // Hz, a divisor of the physics rate
  std::uint64_t seed = 1;
  ControllerConfig controller;
  TrajectoryConfig trajectory;
  PlantConfig plant;
  DisturbanceConfig disturbance;
  SensorModel sensors;
  std::filesystem::path output;

  void validate() const;
  /// Model used by the controller (the plant adds the disturbance masses).
  RobotModel load_model() const;
};

/// Parses a scenario document. Relative model paths resolve against
/// `base_dir`. Unknown keys are errors.
ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {},
                              const std::string& name = "scenario");
ScenarioConfig load_scenario(const std::filesystem::path& path);
/// Fully resolved config, every field explicit; parses back to the same run.
std::string dump_scenario(const ScenarioConfig& config);

struct LogRow {
  double t = 0.0;
  std::string phase;
  VecX ref;
  VecX meas;
  VecX tau;
  VecX grf;
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
  bool fallback = false;
  /// Largest friction-pyramid excess of the solved wrenches this tick.
  double friction_excess = 0.0;
};

struct JumpSummary {
  double liftoff_time = -1.0;
  double touchdown_time = -1.0;
  double settle_time = -1.0;
  bool reached_settled = false;
  double touchdown_discontinuity = 0.0;
  double apex = 0.0;  // highest CoM height relative to standing
  double planned_apex = 0.0;
  double standing_height = 0.0;
  /// Integral of the horizontal sole speeds over the landing phase.
  double landing_slip = 0.0;
};

struct ScenarioLog {
  std::string scenario;
  ControllerKind controller = ControllerKind::kId;
  std::vector<std::string> channels;
  std::vector<std::string> joints;
  std::vector<std::string> grf_names;
  std::vector<LogRow> rows;
  VecX effort;  // joint torque limits of the controller model
  /// Channel values the sinusoid oscillates about (squat: standing CoM).
  VecX nominal;
  /// Reference period and start time for sinusoidal scenarios (period 0
  /// otherwise).
  double period = 0.0;
  double reference_start = 0.0;
  bool aborted = false;
  std::string abort_reason;
  /// Largest excess of the solved contact wrenches over the controller's
  /// friction pyramid, over every tick.
  double max_friction_violation = 0.0;
  int qp_failures = 0;
  JumpSummary jump;
  double wall_time = 0.0;

  int channel(const std::string& name) const;
};

struct RunOptions {
  /// Writes the first control QP and every failed one (at most 100) as
  /// matrix-market blocks into this directory when non-empty.
  std::filesystem::path dump_qp;
  /// Consecutive failed ticks that abort the run.
  int max_failed_ticks = 100;
};

ScenarioLog run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace wbc
