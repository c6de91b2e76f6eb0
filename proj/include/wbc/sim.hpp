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
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wbc/dynamics.hpp"

namespace wbc {

/// Flat compliant ground at z = height: per-point normal spring-damper and
/// regularized Coulomb friction.
struct GroundModel {
  bool enabled = true;
  double height = 0.0;
  double stiffness = 1e5;        // N/m per contact point
  double damping = 5e3;          // N s/m per contact point
  double mu = 0.8;
  double regularization = 1e-3;  // m/s
  void validate() const;
};

struct AttachedMass {
  std::string link;
  double mass = 0.0;
  Vec3 offset = Vec3::Zero();
};

struct TimedWrench {
  std::string frame;
  Vec6 wrench = Vec6::Zero();  // world axes, at the frame origin
  double start = 0.0;
  double end = std::numeric_limits<double>::infinity();
};

/// Everything the controllers do not know about.
struct DisturbanceSpec {
  VecX coulomb;     // per joint, N m (empty = none)
  VecX viscous;     // per joint, N m s/rad
  VecX joint_bias;  // constant generalized force per joint
  std::vector<AttachedMass> masses;
  std::vector<TimedWrench> wrenches;
  std::map<std::string, double> force_bias;  // contact frame -> N added to the normal reading
  void validate(const RobotModel& model) const;
};

struct SensorModel {
  double position_noise = 0.0;     // m (base position) and rad (joints)
  double orientation_noise = 0.0;  // rad
  double velocity_noise = 0.0;
  double force_noise = 0.0;        // N
  int delay_ticks = 0;
  /// v_f = c v_f,prev + (1 - c) v_raw on all velocity channels.
  double velocity_filter = 0.0;
  void validate() const;
};

struct CraneSpec {
  enum class Mode { kOff, kSpring, kWelded };
  Mode mode = Mode::kOff;
  Pose anchor;
  Vec6 stiffness = (Vec6() << 1e5, 1e5, 1e5, 1e4, 1e4, 1e4).finished();
  Vec6 damping = (Vec6() << 2e3, 2e3, 2e3, 2e2, 2e2, 2e2).finished();
};

struct PlantConfig {
  double dt = 1e-4;
  GroundModel ground;
  DisturbanceSpec disturbance;
  CraneSpec crane;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

/// The physical robot. Owns its own copy of the model (with unmodeled masses
/// attached), so the controller-side model is never touched.
class Plant {
 public:
  Plant(const RobotModel& nominal, PlantConfig config, SystemState initial);

  /// One physics step with joint torques held over dt.
  void step(const VecX& tau);

  double time() const { return time_; }
  const SystemState& state() const { return state_; }
  const RobotModel& model() const { return model_; }
  const PlantConfig& config() const { return config_; }

  /// Net ground wrench on each contact frame (world axes, frame origin),
  /// in model.contact_frames() order, from the last step.
  const std::vector<Vec6>& contact_wrenches() const { return wrenches_; }
  const std::vector<std::string>& contact_frames() const { return frames_; }
  /// Largest |f_t| - mu f_n over all points in the last step.
  double max_friction_excess() const { return friction_excess_; }

 private:
  RobotModel model_;
  PlantConfig config_;
  SystemState state_;
  double time_ = 0.0;
  std::vector<std::string> frames_;
  std::vector<Vec6> wrenches_;
  double friction_excess_ = 0.0;
};

/// Steady sag of a spring crane holding a model at rest: weight / stiffness.
double crane_sag(const RobotModel& model, const CraneSpec& crane);

struct Measurement {
  double time = 0.0;
  SystemState state;
  std::vector<Vec6> contact_wrenches;  // with bias and noise
};

/// Noise, delay, filtering and force bias on top of the plant state.
/// Deterministic for a given seed.
class Sensor {
 public:
  Sensor(SensorModel model, std::uint64_t seed, std::map<std::string, double> force_bias = {});

  Measurement measure(const Plant& plant);

 private:
  SensorModel model_;
  std::mt19937_64 rng_;
  std::map<std::string, double> bias_;
  std::deque<Measurement> buffer_;
  VecX filtered_;
};

}  // namespace wbc
