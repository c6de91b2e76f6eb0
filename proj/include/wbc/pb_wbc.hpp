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

#include "wbc/contact.hpp"
#include "wbc/qp_solver.hpp"
#include "wbc/task.hpp"

namespace wbc {

enum class PbPhase { kStance, kJump, kFlight, kLanding };

std::string to_string(PbPhase phase);

/// Full-rank task stack in CoM coordinates nu_p = (v_c, w_b, qdot): the
/// centroidal rows, the stationary contact rows, then impedance rows (the
/// enabled components of each impedance task, in order).
/// Gains are in force units (N/m, N s/m, N m/rad, N m s/rad).
struct PbTaskStack {
  TaskSpec centroidal{"centroidal", kComTask};
  /// Flight: the centroidal rows follow the measurement and carry no wrench.
  bool track_centroidal = true;
  ContactSet contacts;
  std::vector<TaskSpec> impedance;
  VecX desired_grf;  // 6 n_c, empty means zero
  Vec6 qc = Vec6::Ones();
  Vec6 qf = (Vec6() << 1e-5, 1e-5, 1e-8, 1e-8, 1e-8, 1e-8).finished();
  Vec6 landing_damping = Vec6::Zero();  // per contact, N s/m and N m s/rad
  double condition_bound = 1e6;
  /// Welded base: the stack covers the joints only and the base rows are dropped.
  bool fixed_base = false;

  int dim(const RobotModel& model) const { return fixed_base ? model.num_joints() : model.nv(); }
  void validate(const RobotModel& model) const;
};

struct StackJacobian {
  MatX J;
  MatX J_dot;
  double condition = 1.0;
  /// Row offsets of the contact and impedance blocks.
  int contact_row = 0;
  int impedance_row = 0;
};

/// Stacked Jacobian (and its time derivative along the measured motion) in
/// the coordinates of the stack. Throws when the stack is not square.
StackJacobian stack_jacobian(const Kinematics& kin, const ComDynamics& com, const PbTaskStack& stack);
StackJacobian stack_jacobian(const RobotModel& model, const SystemState& state, const PbTaskStack& stack);

/// Stacked impedance forces K_p (x - x_ref) + K_d (xd - xd_ref) over the
/// enabled components of every impedance task.
VecX impedance_forces(const Kinematics& kin, const PbTaskStack& stack);

struct DesiredMotion {
  VecX velocity;      // nu_d = J^-1 xd_d
  VecX acceleration;  // nud_d = J^-1 (xdd_d - Jdot nu_d)
  bool damped = false;
};

/// Stacked task velocity/acceleration references (centroidal, contacts at
/// rest, impedance references). In flight the centroidal velocity rows take
/// `measured_centroidal` and the linear acceleration rows take gravity.
void stack_references(const PbTaskStack& stack, const Vec6& measured_centroidal, const Vec3& gravity, VecX& xd,
                      VecX& xdd);

/// Falls back to a damped inverse (lambda = 1e-6) above `condition_bound`.
DesiredMotion desired_generalized_motion(const StackJacobian& sj, const VecX& xd_desired, const VecX& xdd_desired,
                                         double condition_bound = 1e6);

/// GRF QP over the stacked contact wrenches f_grf.
QpProblem grf_qp(const ComDynamics& com, const StackJacobian& sj, const PbTaskStack& stack, const DesiredMotion& dm,
                 const Vec6& w_imp, const VecX& f_imp, const std::vector<Mat3>& contact_rotations);

/// tau = M_2 nud_d + C_2 nu_d - [J_grf,j^T J_imp,j^T](f_grf, f_imp), minus
/// J_grf,j^T D xd_grf during landing. `mass`/`coriolis` are in stack
/// coordinates; `joint_gravity` is added as is (only non-empty for a welded
/// base, where gravity has no centroidal special form).
VecX compute_torque(const MatX& mass, const MatX& coriolis, const StackJacobian& sj, const DesiredMotion& dm,
                    const VecX& f_grf, const VecX& f_imp, PbPhase phase, const Vec6& landing_damping,
                    const VecX& contact_velocity, const VecX& joint_gravity = VecX());

struct PbSettings {
  int max_hold_ticks = 10;
  double fallback_damping = 5.0;
  QpSettings qp;
};

struct PbOutput {
  VecX tau;
  VecX grf;
  Vec6 w_imp = Vec6::Zero();
  VecX f_imp;
  DesiredMotion motion;
  VecX delta_c;  // residual of the first six rows at the QP optimum
  double condition = 1.0;
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
  bool fallback = false;
};

class PbController {
 public:
  explicit PbController(PbSettings settings = {}) : settings_(settings), solver_(settings.qp) {}

  PbOutput tick(const RobotModel& model, const SystemState& state, const PbTaskStack& stack, PbPhase phase);

  const QpProblem& last_problem() const { return problem_; }

 private:
  PbSettings settings_;
  QpSolver solver_;
  QpProblem problem_;
  std::optional<QpSolution> previous_;
  VecX last_grf_;
  VecX last_tau_;
  int failures_ = 0;
};

}  // namespace wbc
