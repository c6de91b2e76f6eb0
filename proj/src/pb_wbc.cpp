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

#include "wbc/pb_wbc.hpp"

#include <Eigen/SVD>

namespace wbc {

std::string to_string(PbPhase phase) {
  switch (phase) {
    case PbPhase::kStance: return "stance";
    case PbPhase::kJump: return "jump";
    case PbPhase::kFlight: return "flight";
    case PbPhase::kLanding: return "landing";
  }
  return "unknown";
}

void PbTaskStack::validate(const RobotModel& model) const {
  contacts.validate(model);
  if (fixed_base && contacts.size() > 0) throw Error("pb-wbc: a welded base cannot carry contact rows");
  if (!fixed_base) centroidal.validate(model);
  int imp_rows = 0;
  for (const auto& t : impedance) {
    t.validate(model);
    imp_rows += t.num_enabled();
  }
  if ((qc.array() < 0).any() || (qf.array() < 0).any() || (landing_damping.array() < 0).any()) {
    throw Error("pb-wbc: weights and damping must be non-negative");
  }
  if (desired_grf.size() != 0 && desired_grf.size() != 6 * contacts.size()) {
    throw Error("pb-wbc: desired GRF dimension mismatch");
  }
  const int rows = (fixed_base ? 0 : 6) + 6 * contacts.size() + imp_rows;
  if (rows != dim(model)) {
    throw Error("pb-wbc: task stack has " + std::to_string(rows) + " rows for " + std::to_string(dim(model)) +
                " coordinates");
  }
}

StackJacobian stack_jacobian(const Kinematics& kin, const ComDynamics& com, const PbTaskStack& stack) {
  const RobotModel& model = kin.model();
  stack.validate(model);
  const int d = stack.dim(model);
  const int n = model.num_joints();
  StackJacobian sj;
  sj.J = MatX::Zero(d, d);
  sj.J_dot = MatX::Zero(d, d);
  int row = 0;
  if (!stack.fixed_base) {
    sj.J.topLeftCorner<6, 6>().setIdentity();
    row = 6;
  }
  auto put = [&](const std::string& frame, std::uint8_t mask) {
    const Mat6X J = kin.frame_jacobian(frame);
    const Mat6X Jd = kin.frame_jacobian_dot(frame);
    for (int r = 0; r < 6; ++r) {
      if (!((mask >> r) & 1)) continue;
      if (stack.fixed_base) {
        sj.J.row(row) = J.row(r).tail(n);
        sj.J_dot.row(row) = Jd.row(r).tail(n);
      } else {
        sj.J.row(row) = J.row(r) * com.inverse_map;
        sj.J_dot.row(row) = Jd.row(r) * com.inverse_map + J.row(r) * com.inverse_map_dot;
      }
      ++row;
    }
  };
  sj.contact_row = row;
  for (const auto& f : stack.contacts.frames) put(f, 0x3f);
  sj.impedance_row = row;
  for (const auto& t : stack.impedance) put(t.frame, t.mask);
  const Eigen::JacobiSVD<MatX> svd(sj.J);
  const VecX& s = svd.singularValues();
  sj.condition = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
  return sj;
}

VecX impedance_forces(const Kinematics& kin, const PbTaskStack& stack) {
  int rows = 0;
  for (const auto& t : stack.impedance) rows += t.num_enabled();
  VecX f(rows);
  int row = 0;
  for (const auto& t : stack.impedance) {
    const Vec6 w = impedance_wrench(t, task_kinematics(kin, t.frame));
    for (int r = 0; r < 6; ++r)
      if (t.enabled(r)) f[row++] = w[r];
  }
  return f;
}

StackJacobian stack_jacobian(const RobotModel& model, const SystemState& state, const PbTaskStack& stack) {
  const Kinematics kin(model, state);
  const ComDynamics com = stack.fixed_base ? ComDynamics{} : com_dynamics(kin, compute_dynamics(kin));
  return stack_jacobian(kin, com, stack);
}

void stack_references(const PbTaskStack& stack, const Vec6& measured_centroidal, const Vec3& gravity, VecX& xd,
                      VecX& xdd) {
  int rows = (stack.fixed_base ? 0 : 6) + 6 * stack.contacts.size();
  for (const auto& t : stack.impedance) rows += t.num_enabled();
  xd = VecX::Zero(rows);
  xdd = VecX::Zero(rows);
  int row = 0;
  if (!stack.fixed_base) {
    if (stack.track_centroidal) {
      xd.head<6>() = stack.centroidal.ref_velocity;
      xdd.head<6>() = stack.centroidal.ref_acceleration;
    } else {
      xd.head<6>() = measured_centroidal;
      xdd.head<3>() = gravity;
    }
    row = 6;
  }
  row += 6 * stack.contacts.size();
  for (const auto& t : stack.impedance) {
    for (int r = 0; r < 6; ++r) {
      if (!t.enabled(r)) continue;
      xd[row] = t.ref_velocity[r];
      xdd[row] = t.ref_acceleration[r];
      ++row;
    }
  }
}

DesiredMotion desired_generalized_motion(const StackJacobian& sj, const VecX& xd_desired, const VecX& xdd_desired,
                                         double condition_bound) {
  DesiredMotion dm;
  if (sj.condition <= condition_bound) {
    const Eigen::PartialPivLU<MatX> lu(sj.J);
    dm.velocity = lu.solve(xd_desired);
    dm.acceleration = lu.solve(xdd_desired - sj.J_dot * dm.velocity);
  } else {
    const double lambda = 1e-6;
    const MatX JtJ = sj.J.transpose() * sj.J + lambda * MatX::Identity(sj.J.cols(), sj.J.cols());
    const Eigen::LDLT<MatX> ldlt(JtJ);
    dm.velocity = ldlt.solve(sj.J.transpose() * xd_desired);
    dm.acceleration = ldlt.solve(sj.J.transpose() * (xdd_desired - sj.J_dot * dm.velocity));
    dm.damped = true;
  }
  return dm;
}

QpProblem grf_qp(const ComDynamics& com, const StackJacobian& sj, const PbTaskStack& stack, const DesiredMotion& dm,
                 const Vec6& w_imp, const VecX& f_imp, const std::vector<Mat3>& contact_rotations) {
  const int nc = stack.contacts.size();
  const int ni = static_cast<int>(f_imp.size());
  const MatX A = sj.J.block(sj.contact_row, 0, 6 * nc, 6).transpose();
  Vec6 b = com.mass.topRows<6>() * dm.acceleration + com.coriolis.topRows<6>() * dm.velocity - com.gravity_wrench -
           w_imp;
  if (ni) b -= sj.J.block(sj.impedance_row, 0, ni, 6).transpose() * f_imp;

  VecX qf(6 * nc);
  for (int i = 0; i < nc; ++i) qf.segment<6>(6 * i) = stack.qf;
  const VecX fd = stack.desired_grf.size() ? stack.desired_grf : VecX::Zero(6 * nc);

  QpProblem p = QpProblem::unconstrained(A.transpose() * stack.qc.asDiagonal() * A, VecX::Zero(6 * nc));
  p.H.diagonal() += qf;
  p.g = -(A.transpose() * stack.qc.asDiagonal() * b + qf.cwiseProduct(fd));
  const ContactConstraints cc = contact_constraints(stack.contacts, contact_rotations);
  p.A_in = cc.A;
  p.lower = cc.lower;
  p.upper = cc.upper;
  return p;
}

VecX compute_torque(const MatX& mass, const MatX& coriolis, const StackJacobian& sj, const DesiredMotion& dm,
                    const VecX& f_grf, const VecX& f_imp, PbPhase phase, const Vec6& landing_damping,
                    const VecX& contact_velocity, const VecX& joint_gravity) {
  const int d = static_cast<int>(mass.rows());
  const int n = joint_gravity.size() ? d : d - 6;
  const int off = d - n;
  VecX tau = mass.bottomRows(n) * dm.acceleration + coriolis.bottomRows(n) * dm.velocity;
  const int ng = static_cast<int>(f_grf.size());
  const int ni = static_cast<int>(f_imp.size());
  if (ng) {
    const MatX Jgj = sj.J.block(sj.contact_row, off, ng, n);
    tau -= Jgj.transpose() * f_grf;
    if (phase == PbPhase::kLanding) {
      VecX damping(ng);
      for (int i = 0; i < ng / 6; ++i) damping.segment<6>(6 * i) = landing_damping;
      tau -= Jgj.transpose() * damping.cwiseProduct(contact_velocity);
    }
  }
  if (ni) tau -= sj.J.block(sj.impedance_row, off, ni, n).transpose() * f_imp;
  if (joint_gravity.size()) tau += joint_gravity;
  return tau;
}

PbOutput PbController::tick(const RobotModel& model, const SystemState& state, const PbTaskStack& stack,
                            PbPhase phase) {
  const Kinematics kin(model, state);
  const DynamicsTerms dyn = compute_dynamics(kin);
  const int n = model.num_joints();
  const int nc = stack.contacts.size();
  const ComDynamics com = stack.fixed_base ? ComDynamics{} : com_dynamics(kin, dyn);
  const StackJacobian sj = stack_jacobian(kin, com, stack);

  PbOutput out;
  out.condition = sj.condition;
  const TaskKinematics tk_com = task_kinematics(kin, kComTask);
  VecX xd, xdd;
  stack_references(stack, tk_com.velocity, model.gravity(), xd, xdd);
  out.motion = desired_generalized_motion(sj, xd, xdd, stack.condition_bound);
  if (!stack.fixed_base && stack.track_centroidal) out.w_imp = impedance_wrench(stack.centroidal, tk_com);
  out.f_imp = impedance_forces(kin, stack);

  std::vector<Mat3> rotations;
  VecX contact_velocity(6 * nc);
  for (int i = 0; i < nc; ++i) {
    rotations.push_back(kin.frame_pose(stack.contacts.frames[i]).rotation);
    contact_velocity.segment<6>(6 * i) = kin.frame_velocity(stack.contacts.frames[i]);
  }

  out.grf = VecX::Zero(6 * nc);
  bool failed = false;
  if (nc) {
    problem_ = grf_qp(com, sj, stack, out.motion, out.w_imp, out.f_imp, rotations);
    if (previous_ && previous_->x.size() == problem_.dim()) {
      problem_.warm_x = previous_->x;
      problem_.warm_y_in = previous_->y_in;
    }
    const QpSolution sol = solver_.solve(problem_);
    out.status = sol.status;
    out.iterations = sol.iterations;
    if (sol.status == QpStatus::kOptimal) {
      out.grf = sol.x;
      previous_ = sol;
      last_grf_ = sol.x;
    } else {
      failed = true;
      previous_.reset();
      if (last_grf_.size() == 6 * nc) out.grf = last_grf_;
    }
    const MatX A = sj.J.block(sj.contact_row, 0, 6 * nc, 6).transpose();
    VecX b = com.mass.topRows<6>() * out.motion.acceleration + com.coriolis.topRows<6>() * out.motion.velocity -
             com.gravity_wrench - out.w_imp;
    if (!stack.impedance.empty()) b -= sj.J.block(sj.impedance_row, 0, out.f_imp.size(), 6).transpose() * out.f_imp;
    out.delta_c = A * out.grf - b;
  }

  if (failed) {
    ++failures_;
    out.fallback = true;
    if (failures_ > settings_.max_hold_ticks || last_tau_.size() != n) {
      out.tau = -settings_.fallback_damping * state.velocity.tail(n);
      return out;
    }
  } else {
    failures_ = 0;
  }

  if (stack.fixed_base) {
    out.tau = compute_torque(dyn.mass.bottomRightCorner(n, n), dyn.coriolis.bottomRightCorner(n, n), sj, out.motion,
                             out.grf, out.f_imp, phase, stack.landing_damping, contact_velocity,
                             dyn.gravity.tail(n));
  } else {
    out.tau = compute_torque(com.mass, com.coriolis, sj, out.motion, out.grf, out.f_imp, phase,
                             stack.landing_damping, contact_velocity);
  }
  last_tau_ = out.tau;
  return out;
}

}  // namespace wbc
