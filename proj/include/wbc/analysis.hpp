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

#include <optional>
#include <string>
#include <vector>

#include "wbc/scenario.hpp"

namespace wbc {

/// One task axis under PD control with a constant disturbance force.
struct OdeParams {
  double mass = 1.0;
  double kp = 1.0;
  double kd = 0.0;
  double tau_dist = 0.0;
  double e0 = 0.0;
  double de0 = 0.0;

  void validate() const;
};

/// Error of e'' + kd e' + kp e = -tau_dist / m (acceleration-space PD).
double ode_response_id(const OdeParams& p, double t);
/// Error of m e'' + kd e' + kp e = -tau_dist (force-space PD).
double ode_response_pb(const OdeParams& p, double t);
double steady_state_error_id(const OdeParams& p);
double steady_state_error_pb(const OdeParams& p);

/// Response of a e'' + b e' + c e = -f from (e0, de0). Under-, over- and
/// critically damped cases share one real closed form.
double second_order_response(double a, double b, double c, double f, double e0, double de0, double t);

/// Constant disturbance that explains a steady-state error: error m kp (ID)
/// or error kp (PB). ID mode needs the task inertia.
double estimate_disturbance(double steady_error, double kp, ControllerKind mode,
                            std::optional<double> mass = std::nullopt);

/// Force-space gains matching acceleration-space gains: id * inertia.
Vec6 translate_gains(const Vec6& id_gains, const Vec6& inertia);
double translate_gains(double id_gain, double inertia);

/// Locked rotational inertia about the CoM (angular block of the CoM-frame
/// mass matrix) stacked under the total mass: per-axis task inertia of the
/// centroidal rows.
Vec6 centroidal_task_inertia(const RobotModel& model, const SystemState& state);

/// Centroidal block of J^-T M J^-1 for the square stance stack (centroidal
/// rows plus rigidly held contacts): the inertia the ID closed loop sees.
Mat6 stance_task_inertia(const RobotModel& model, const SystemState& state, const std::vector<std::string>& contacts);

/// Static-equilibrium map of a generalized force (in the nu coordinates of
/// the model) onto the centroidal rows of the stance stack.
Vec6 stance_task_wrench(const RobotModel& model, const SystemState& state, const std::vector<std::string>& contacts,
                        const VecX& generalized_force);

/// Steady-state centroidal errors (ref - meas) under a constant centroidal
/// disturbance wrench: -Lambda^-1 w / kp for ID, -w / kp for PB.
Vec6 predicted_stance_error(ControllerKind mode, const Mat6& inertia, const Vec6& wrench, const Vec6& kp);

/// Biped crouch whose CoM sits at `com_height` (bisection on the bend angle).
SystemState crouch_for_com_height(const RobotModel& biped, double com_height);

struct MetricsWindow {
  /// Fraction of an aperiodic run (taken from the end) used for steady state.
  double fraction = 0.25;
  /// Periods skipped at the start of a sinusoidal run.
  int skip_periods = 1;
};

struct ChannelMetrics {
  std::string name;
  double steady_state_error = 0.0;  // mean of ref - meas at the samples
  double rms = 0.0;
  double overshoot = 0.0;   // max(meas - ref), >= 0
  double undershoot = 0.0;  // max(ref - meas), >= 0
};

struct RunMetrics {
  std::vector<ChannelMetrics> channels;
  double peak_grf = 0.0;  // largest normal force over all contacts and ticks
  int constraint_violations = 0;
  int qp_failures = 0;
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;  // steady-state samples per channel

  const ChannelMetrics& channel(const std::string& name) const;
};

/// Sinusoidal runs sample the error at every top extremum of the reference
/// after the skipped periods and average; the RMS covers the same span.
/// Other runs average over the last `fraction` of the log.
RunMetrics compute_metrics(const ScenarioLog& log, const MetricsWindow& window = {});

/// Root-mean-square difference of one channel between two logs of equal
/// length over [t0, t1].
double rms_difference(const ScenarioLog& a, const ScenarioLog& b, const std::string& channel, double t0, double t1);

}  // namespace wbc
