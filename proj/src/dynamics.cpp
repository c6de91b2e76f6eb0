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

#include "wbc/dynamics.hpp"

#include <cmath>

#include "wbc/spatial.hpp"

namespace wbc {

Kinematics::Kinematics(const RobotModel& model, const SystemState& state) : model_(&model), state_(&state) {
  const int nl = model.num_links();
  const int nj = model.num_joints();
  if (state.joint_positions.size() != nj || state.velocity.size() != model.nv()) {
    throw Error("state dimensions do not match the model");
  }
  rot_.resize(nl);
  pos_.resize(nl);
  omega_.resize(nl);
  vel_.resize(nl);
  axis_.resize(nj);
  anchor_.resize(nj);

  rot_[0] = state.base_rotation();
  pos_[0] = state.base_position;
  vel_[0] = state.velocity.segment<3>(0);
  omega_[0] = state.velocity.segment<3>(3);

  for (int i = 1; i < nl; ++i) {
    const int k = i - 1;
    const int p = model.parent(i);
    const Joint& j = model.joint(k);
    const double q = state.joint_positions[k];
    const double qd = state.velocity[6 + k];
    const Mat3 R_joint = rot_[p] * j.origin_rotation;
    const Vec3 o = pos_[p] + rot_[p] * j.origin_position;
    const Vec3 a = R_joint * j.axis;
    axis_[k] = a;
    anchor_[k] = o;
    if (j.type == JointType::kRevolute) {
      rot_[i] = R_joint * Eigen::AngleAxisd(q, j.axis).toRotationMatrix();
      pos_[i] = o;
      omega_[i] = omega_[p] + a * qd;
      vel_[i] = vel_[p] + omega_[p].cross(o - pos_[p]);
    } else {
      rot_[i] = R_joint;
      pos_[i] = o + a * q;
      omega_[i] = omega_[p];
      vel_[i] = vel_[p] + omega_[p].cross(pos_[i] - pos_[p]) + a * qd;
    }
  }
}

Vec3 Kinematics::link_com(int link) const { return pos_[link] + rot_[link] * model_->link(link).com; }

Vec3 Kinematics::point_velocity(int link, const Vec3& p) const {
  return vel_[link] + omega_[link].cross(p - pos_[link]);
}

Mat6X Kinematics::point_jacobian(int link, const Vec3& p) const {
  Mat6X J = Mat6X::Zero(6, model_->nv());
  J.block<3, 3>(0, 0).setIdentity();
  J.block<3, 3>(0, 3) = -skew(p - pos_[0]);
  J.block<3, 3>(3, 3).setIdentity();
  for (int l = link; l > 0; l = model_->parent(l)) {
    const int k = l - 1;
    const Vec3& a = axis_[k];
    if (model_->joint(k).type == JointType::kRevolute) {
      J.block<3, 1>(0, 6 + k) = a.cross(p - anchor_[k]);
      J.block<3, 1>(3, 6 + k) = a;
    } else {
      J.block<3, 1>(0, 6 + k) = a;
    }
  }
  return J;
}

Mat6X Kinematics::point_jacobian_dot(int link, const Vec3& p) const {
  Mat6X Jd = Mat6X::Zero(6, model_->nv());
  const Vec3 pd = point_velocity(link, p);
  Jd.block<3, 3>(0, 3) = -skew(pd - vel_[0]);
  for (int l = link; l > 0; l = model_->parent(l)) {
    const int k = l - 1;
    const Vec3& a = axis_[k];
    const Vec3 ad = omega_[model_->parent(l)].cross(a);
    if (model_->joint(k).type == JointType::kRevolute) {
      // the anchor of a revolute joint is the child link origin
      Jd.block<3, 1>(0, 6 + k) = ad.cross(p - anchor_[k]) + a.cross(pd - vel_[l]);
      Jd.block<3, 1>(3, 6 + k) = ad;
    } else {
      Jd.block<3, 1>(0, 6 + k) = ad;
    }
  }
  return Jd;
}

Pose Kinematics::frame_pose(const std::string& name) const {
  const Frame& f = model_->frame(name);
  const int l = model_->link_index(f.link);
  return Pose{rot_[l] * f.rotation, pos_[l] + rot_[l] * f.position};
}

Mat6X Kinematics::frame_jacobian(const std::string& name) const {
  const Frame& f = model_->frame(name);
  const int l = model_->link_index(f.link);
  return point_jacobian(l, pos_[l] + rot_[l] * f.position);
}

Vec6 Kinematics::frame_velocity(const std::string& name) const {
  const Frame& f = model_->frame(name);
  const int l = model_->link_index(f.link);
  Vec6 v;
  v << point_velocity(l, pos_[l] + rot_[l] * f.position), omega_[l];
  return v;
}

Mat6X Kinematics::frame_jacobian_dot(const std::string& name) const {
  const Frame& f = model_->frame(name);
  const int l = model_->link_index(f.link);
  return point_jacobian_dot(l, pos_[l] + rot_[l] * f.position);
}

Vec6 Kinematics::frame_drift(const std::string& name) const {
  const Frame& f = model_->frame(name);
  const int l = model_->link_index(f.link);
  return point_jacobian_dot(l, pos_[l] + rot_[l] * f.position) * state_->velocity;
}

Vec3 Kinematics::com() const {
  Vec3 c = Vec3::Zero();
  for (int i = 0; i < model_->num_links(); ++i) c += model_->link(i).mass * link_com(i);
  return c / model_->total_mass();
}

Vec3 Kinematics::com_velocity() const {
  Vec3 v = Vec3::Zero();
  for (int i = 0; i < model_->num_links(); ++i) v += model_->link(i).mass * point_velocity(i, link_com(i));
  return v / model_->total_mass();
}

Mat3X Kinematics::com_jacobian() const {
  Mat3X J = Mat3X::Zero(3, model_->nv());
  for (int i = 0; i < model_->num_links(); ++i) {
    J += model_->link(i).mass * point_jacobian(i, link_com(i)).topRows<3>();
  }
  return J / model_->total_mass();
}

Mat3X Kinematics::com_jacobian_dot() const {
  Mat3X J = Mat3X::Zero(3, model_->nv());
  for (int i = 0; i < model_->num_links(); ++i) {
    J += model_->link(i).mass * point_jacobian_dot(i, link_com(i)).topRows<3>();
  }
  return J / model_->total_mass();
}

double Kinematics::kinetic_energy() const {
  double T = 0.0;
  for (int i = 0; i < model_->num_links(); ++i) {
    const Link& L = model_->link(i);
    const Vec3 v = point_velocity(i, link_com(i));
    const Mat3 Iw = rot_[i] * L.inertia * rot_[i].transpose();
    T += 0.5 * L.mass * v.squaredNorm() + 0.5 * omega_[i].dot(Iw * omega_[i]);
  }
  return T;
}

double Kinematics::potential_energy() const {
  double V = 0.0;
  for (int i = 0; i < model_->num_links(); ++i) V -= model_->link(i).mass * model_->gravity().dot(link_com(i));
  return V;
}

DynamicsTerms compute_dynamics(const Kinematics& kin) {
  const RobotModel& model = kin.model();
  const int nv = model.nv();
  DynamicsTerms out;
  out.mass = MatX::Zero(nv, nv);
  out.coriolis = MatX::Zero(nv, nv);
  out.gravity = VecX::Zero(nv);
  for (int i = 0; i < model.num_links(); ++i) {
    const Link& L = model.link(i);
    const Vec3 c = kin.link_com(i);
    const Mat6X J = kin.point_jacobian(i, c);
    const Mat6X Jd = kin.point_jacobian_dot(i, c);
    const Mat3 Iw = kin.rotation(i) * L.inertia * kin.rotation(i).transpose();
    const Vec3& w = kin.angular_velocity(i);
    const auto Jv = J.topRows<3>();
    const auto Jw = J.bottomRows<3>();
    out.mass.noalias() += L.mass * Jv.transpose() * Jv + Jw.transpose() * Iw * Jw;
    out.coriolis.noalias() += L.mass * Jv.transpose() * Jd.topRows<3>() +
                              Jw.transpose() * (Iw * Jd.bottomRows<3>() + skew(w) * Iw * Jw);
    out.gravity.noalias() -= L.mass * Jv.transpose() * model.gravity();
  }
  out.mass = 0.5 * (out.mass + out.mass.transpose());
  out.bias = out.coriolis * kin.state().velocity + out.gravity;
  return out;
}

MatX mass_matrix(const RobotModel& model, const SystemState& state) {
  return compute_dynamics(Kinematics(model, state)).mass;
}

MatX coriolis_matrix(const RobotModel& model, const SystemState& state) {
  return compute_dynamics(Kinematics(model, state)).coriolis;
}

VecX gravity_vector(const RobotModel& model, const SystemState& state) {
  return compute_dynamics(Kinematics(model, state)).gravity;
}

VecX bias_forces(const RobotModel& model, const SystemState& state) {
  return inverse_dynamics(model, state, VecX::Zero(model.nv()), true);
}

VecX inverse_dynamics(const RobotModel& model, const SystemState& state, const VecX& acc, bool with_gravity) {
  const Kinematics kin(model, state);
  const int nl = model.num_links();
  std::vector<Vec3> alpha(nl), accel(nl), force(nl), moment(nl);
  alpha[0] = acc.segment<3>(3);
  accel[0] = acc.segment<3>(0);
  for (int i = 1; i < nl; ++i) {
    const int k = i - 1;
    const int p = model.parent(i);
    const Vec3& a = kin.joint_axis(k);
    const Vec3& wp = kin.angular_velocity(p);
    const double qd = state.velocity[6 + k];
    const double qdd = acc[6 + k];
    const Vec3 r = kin.position(i) - kin.position(p);
    const Vec3 base = accel[p] + alpha[p].cross(r) + wp.cross(wp.cross(r));
    if (model.joint(k).type == JointType::kRevolute) {
      alpha[i] = alpha[p] + a * qdd + wp.cross(a) * qd;
      accel[i] = base;
    } else {
      alpha[i] = alpha[p];
      accel[i] = base + 2.0 * wp.cross(a) * qd + a * qdd;
    }
  }
  const Vec3 g = with_gravity ? model.gravity() : Vec3::Zero();
  for (int i = 0; i < nl; ++i) {
    const Link& L = model.link(i);
    const Vec3 d = kin.link_com(i) - kin.position(i);
    const Vec3& w = kin.angular_velocity(i);
    const Vec3 a_com = accel[i] + alpha[i].cross(d) + w.cross(w.cross(d));
    const Mat3 Iw = kin.rotation(i) * L.inertia * kin.rotation(i).transpose();
    force[i] = L.mass * (a_com - g);
    moment[i] = Iw * alpha[i] + w.cross(Iw * w) + d.cross(force[i]);
  }
  VecX tau = VecX::Zero(model.nv());
  for (int i = nl - 1; i > 0; --i) {
    const int k = i - 1;
    const int p = model.parent(i);
    tau[6 + k] = model.joint(k).type == JointType::kRevolute ? kin.joint_axis(k).dot(moment[i])
                                                             : kin.joint_axis(k).dot(force[i]);
    force[p] += force[i];
    moment[p] += moment[i] + (kin.position(i) - kin.position(p)).cross(force[i]);
  }
  tau.segment<3>(0) = force[0];
  tau.segment<3>(3) = moment[0];
  return tau;
}

Mat6X frame_jacobian(const RobotModel& model, const SystemState& state, const std::string& frame) {
  return Kinematics(model, state).frame_jacobian(frame);
}

Vec6 frame_acceleration_drift(const RobotModel& model, const SystemState& state, const std::string& frame) {
  return Kinematics(model, state).frame_drift(frame);
}

Pose frame_pose(const RobotModel& model, const SystemState& state, const std::string& frame) {
  return Kinematics(model, state).frame_pose(frame);
}

VecX ComDynamics::gravity() const {
  VecX g = VecX::Zero(mass.rows());
  g.head<6>() = -gravity_wrench;
  return g;
}

ComDynamics com_dynamics(const Kinematics& kin, const DynamicsTerms& terms) {
  const RobotModel& model = kin.model();
  const int nv = model.nv();
  const int n = model.num_joints();
  ComDynamics out;
  out.total_mass = model.total_mass();
  out.com = kin.com();
  out.com_velocity = kin.com_velocity();
  const Vec3 r = out.com - kin.position(0);
  const Vec3 rd = out.com_velocity - kin.origin_velocity(0);
  const Mat3X Jc = kin.com_jacobian();
  const Mat3X Jcd = kin.com_jacobian_dot();

  out.velocity_map = MatX::Identity(nv, nv);
  out.velocity_map.block(0, 3, 3, 3) = -skew(r);
  out.velocity_map.block(0, 6, 3, n) = Jc.rightCols(n);
  out.inverse_map = MatX::Identity(nv, nv);
  out.inverse_map.block(0, 3, 3, 3) = skew(r);
  out.inverse_map.block(0, 6, 3, n) = -Jc.rightCols(n);
  out.inverse_map_dot = MatX::Zero(nv, nv);
  out.inverse_map_dot.block(0, 3, 3, 3) = skew(rd);
  out.inverse_map_dot.block(0, 6, 3, n) = -Jcd.rightCols(n);

  const MatX& Ti = out.inverse_map;
  out.mass = Ti.transpose() * terms.mass * Ti;
  out.mass = 0.5 * (out.mass + out.mass.transpose());
  out.coriolis = Ti.transpose() * (terms.coriolis * Ti + terms.mass * out.inverse_map_dot);
  out.gravity_wrench.setZero();
  out.gravity_wrench.head<3>() = out.total_mass * model.gravity();
  out.velocity = out.velocity_map * kin.state().velocity;
  return out;
}

ComDynamics com_dynamics(const RobotModel& model, const SystemState& state) {
  const Kinematics kin(model, state);
  return com_dynamics(kin, compute_dynamics(kin));
}

VecX wrench_to_generalized(const Kinematics& kin, const ExternalWrench& w) {
  return kin.frame_jacobian(w.frame).transpose() * w.wrench;
}

VecX forward_dynamics(const RobotModel& model, const SystemState& state, const VecX& tau,
                      const std::vector<ExternalWrench>& external) {
  if (tau.size() != model.num_joints()) throw Error("forward_dynamics: torque dimension mismatch");
  const Kinematics kin(model, state);
  const DynamicsTerms terms = compute_dynamics(kin);
  VecX rhs = -terms.bias;
  rhs.tail(model.num_joints()) += tau;
  for (const auto& w : external) rhs += wrench_to_generalized(kin, w);
  Eigen::LLT<MatX> llt(terms.mass);
  if (llt.info() != Eigen::Success) throw Error("forward_dynamics: mass matrix is not positive definite");
  return llt.solve(rhs);
}

SystemState displace(const SystemState& state, const VecX& nu, double dt) {
  SystemState out = state;
  out.base_position += nu.segment<3>(0) * dt;
  out.base_orientation = (quat_exp(nu.segment<3>(3) * dt) * state.base_orientation).normalized();
  out.joint_positions += nu.tail(nu.size() - 6) * dt;
  return out;
}

SystemState integrate(const SystemState& state, const VecX& acceleration, double dt) {
  if (!(dt > 0.0)) throw Error("integrate: dt must be positive");
  SystemState out = state;
  out.velocity = state.velocity + acceleration * dt;
  out = displace(out, out.velocity, dt);
  return out;
}

}  // namespace wbc
