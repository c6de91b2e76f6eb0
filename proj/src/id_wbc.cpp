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

#include "wbc/id_wbc.hpp"

namespace wbc {

QpProblem assemble_qp(const RobotModel& model, const SystemState& state, const std::vector<TaskSpec>& tasks,
                      const ContactSet& contacts, const IdSettings& settings) {
  if (tasks.empty()) throw Error("id-wbc: empty task list");
  if (state.velocity.size() != model.nv()) throw Error("id-wbc: state dimension mismatch");
  contacts.validate(model);
  for (const auto& t : tasks) t.validate(model);

  IdLayout L{model.nv(), model.num_joints(), contacts.size()};
  const Kinematics kin(model, state);
  const DynamicsTerms dyn = compute_dynamics(kin);

  QpProblem p;
  p.H = MatX::Zero(L.size(), L.size());
  p.g = VecX::Zero(L.size());
  for (const auto& t : tasks) {
    const TaskKinematics tk = task_kinematics(kin, t.frame);
    const Vec6 a = desired_task_acceleration(t, tk);
    for (int r = 0; r < 6; ++r) {
      if (!t.enabled(r) || t.weight[r] == 0.0) continue;
      const auto J = tk.jacobian.row(r);
      p.H.topLeftCorner(L.nv, L.nv).noalias() += t.weight[r] * J.transpose() * J;
      p.g.head(L.nv).noalias() += t.weight[r] * (tk.drift[r] - a[r]) * J.transpose();
    }
  }
  p.H.diagonal().segment(L.tau(), L.n + 6 * L.nc).array() += settings.regularization;

  // Contact Jacobians and drifts.
  MatX Jc(6 * L.nc, L.nv);
  VecX drift_c(6 * L.nc);
  std::vector<Mat3> rotations;
  for (int i = 0; i < L.nc; ++i) {
    Jc.middleRows<6>(6 * i) = kin.frame_jacobian(contacts.frames[i]);
    drift_c.segment<6>(6 * i) = kin.frame_drift(contacts.frames[i]);
    rotations.push_back(kin.frame_pose(contacts.frames[i]).rotation);
  }

  const int dyn_rows = settings.fixed_base ? L.n : L.nv;
  const int pin_rows = settings.fixed_base ? 6 : 0;
  p.A_eq = MatX::Zero(dyn_rows + pin_rows + 6 * L.nc, L.size());
  p.b_eq = VecX::Zero(p.A_eq.rows());
  // M nu_dot - S tau - J_c^T f = -h
  p.A_eq.block(0, L.acc(), dyn_rows, L.nv) = dyn.mass.bottomRows(dyn_rows);
  p.A_eq.block(dyn_rows - L.n, L.tau(), L.n, L.n) = -MatX::Identity(L.n, L.n);
  if (L.nc) p.A_eq.block(0, L.force(), dyn_rows, 6 * L.nc) = -Jc.transpose().bottomRows(dyn_rows);
  p.b_eq.head(dyn_rows) = -dyn.bias.tail(dyn_rows);
  if (pin_rows) p.A_eq.block(dyn_rows, 0, 6, 6).setIdentity();
  // J_c nu_dot = -Jdot_c nu
  if (L.nc) {
    p.A_eq.block(dyn_rows + pin_rows, L.acc(), 6 * L.nc, L.nv) = Jc;
    p.b_eq.tail(6 * L.nc) = -drift_c;
  }

  const ContactConstraints cc = contact_constraints(contacts, rotations);
  const VecX effort = model.effort_limits();
  p.A_in = MatX::Zero(L.n + cc.A.rows(), L.size());
  p.lower.resize(p.A_in.rows());
  p.upper.resize(p.A_in.rows());
  p.A_in.block(0, L.tau(), L.n, L.n).setIdentity();
  p.lower.head(L.n) = -effort;
  p.upper.head(L.n) = effort;
  if (L.nc) {
    p.A_in.block(L.n, L.force(), cc.A.rows(), 6 * L.nc) = cc.A;
    p.lower.tail(cc.A.rows()) = cc.lower;
    p.upper.tail(cc.A.rows()) = cc.upper;
  }
  return p;
}

ControlOutput IdController::tick(const RobotModel& model, const SystemState& state,
                                 const std::vector<TaskSpec>& tasks, const ContactSet& contacts) {
  problem_ = assemble_qp(model, state, tasks, contacts, settings_);
  const IdLayout L{model.nv(), model.num_joints(), contacts.size()};
  if (previous_ && previous_->x.size() == problem_.dim() && previous_->y_eq.size() == problem_.num_eq() &&
      previous_->y_in.size() == problem_.num_in()) {
    problem_.warm_x = previous_->x;
    problem_.warm_y_eq = previous_->y_eq;
    problem_.warm_y_in = previous_->y_in;
  }
  const QpSolution sol = solver_.solve(problem_);

  ControlOutput out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.polished = sol.polished;
  if (sol.status == QpStatus::kOptimal) {
    failures_ = 0;
    previous_ = sol;
    out.acceleration = sol.x.segment(L.acc(), L.nv);
    out.tau = sol.x.segment(L.tau(), L.n);
    out.contact_wrenches = sol.x.segment(L.force(), 6 * L.nc);
    last_tau_ = out.tau;
    return out;
  }
  ++failures_;
  previous_.reset();
  out.fallback = true;
  out.acceleration = VecX::Zero(L.nv);
  out.contact_wrenches = VecX::Zero(6 * L.nc);
  if (failures_ <= settings_.max_hold_ticks && last_tau_.size() == L.n) {
    out.tau = last_tau_;
  } else {
    out.tau = -settings_.fallback_damping * state.velocity.tail(L.n);
  }
  return out;
}

ControlOutput control_tick(const RobotModel& model, const SystemState& state, const std::vector<TaskSpec>& tasks,
                           const ContactSet& contacts, const IdSettings& settings) {
  IdController c(settings);
  return c.tick(model, state, tasks, contacts);
}

}  // namespace wbc
