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

#include <array>
#include <string>
#include <vector>

#include "wbc/types.hpp"

namespace wbc {

struct TrajectoryPoint {
  double pos = 0.0;
  double vel = 0.0;
  double acc = 0.0;
};

/// offset + (amplitude_pp / 2) sin(2 pi f t) with its first two derivatives.
TrajectoryPoint sinusoid(double amplitude_pp, double frequency, double t, double offset = 0.0);

enum class PolynomialOrder { kSixthMinJerk, kQuintic };

const char* to_string(PolynomialOrder order);
PolynomialOrder polynomial_order_from_string(const std::string& name);

/// p(t) = sum c_i t^i on [0, T]. Beyond T the end state is extrapolated with
/// constant acceleration; before 0 the start state is held.
class PolynomialTrajectory {
 public:
  PolynomialTrajectory() = default;

  /// Meets position, velocity and acceleration at both ends. The sixth-order
  /// fit spends its extra coefficient on minimum integral of squared jerk.
  static PolynomialTrajectory fit(const TrajectoryPoint& start, const TrajectoryPoint& end, double duration,
                                  PolynomialOrder order = PolynomialOrder::kSixthMinJerk);

  TrajectoryPoint evaluate(double t) const;
  double duration() const { return duration_; }
  const std::array<double, 7>& coefficients() const { return c_; }
  const TrajectoryPoint& start() const { return start_; }
  const TrajectoryPoint& end() const { return end_; }
  /// Largest absolute mismatch between the evaluated ends and the fitted
  /// boundary conditions.
  double boundary_residual() const;
  /// Integral of squared jerk over [0, T].
  double jerk_cost() const;

 private:
  std::array<double, 7> c_{};
  double duration_ = 0.0;
  TrajectoryPoint start_, end_;
};

enum class JumpPhase { kStanceJump, kFlight, kLanding, kSettled };

const char* to_string(JumpPhase phase);

struct JumpThresholds {
  double height_margin = 0.005;  // above standing CoM height
  double force = 5.0;            // per-leg normal force
  double foot_height = 0.002;
};

struct JumpConfig {
  double standing_height = 0.0;
  double start_time = 0.5;
  double push_duration = 0.5;
  double landing_duration = 0.5;
  /// CoM apex above the standing height and the CoM rise at takeoff.
  double apex = 0.05;
  double takeoff_height = 0.04;
  double gravity = 9.81;
  PolynomialOrder order = PolynomialOrder::kSixthMinJerk;
  JumpThresholds thresholds;

  void validate() const;
};

struct JumpInputs {
  double time = 0.0;
  double com_height = 0.0;
  double com_velocity = 0.0;
  std::vector<double> foot_heights;
  std::vector<double> leg_forces;
};

/// Hybrid phase logic for a vertical jump. Phases only advance along
/// stance-jump, flight, landing, settled, one step per update.
class JumpPhaseMachine {
 public:
  explicit JumpPhaseMachine(const JumpConfig& config);

  JumpPhase update(const JumpInputs& in);
  JumpPhase phase() const { return phase_; }
  const JumpConfig& config() const { return config_; }

  /// Vertical CoM command at time t. In flight the measured height and
  /// velocity pass through with ballistic acceleration.
  TrajectoryPoint command(double t, double measured_height, double measured_velocity) const;

  const PolynomialTrajectory& push() const { return push_; }
  const PolynomialTrajectory& landing() const { return landing_; }
  double liftoff_time() const { return liftoff_time_; }
  double touchdown_time() const { return touchdown_time_; }
  double settle_time() const { return settle_time_; }
  /// Largest jump in commanded position, velocity or acceleration at the
  /// touchdown switch; zero before touchdown.
  double touchdown_discontinuity() const { return touchdown_jump_; }

 private:
  JumpConfig config_;
  JumpPhase phase_ = JumpPhase::kStanceJump;
  PolynomialTrajectory push_, landing_;
  double liftoff_time_ = -1.0;
  double touchdown_time_ = -1.0;
  double settle_time_ = -1.0;
  double touchdown_jump_ = 0.0;
};

}  // namespace wbc
