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

#include "wbc/sim.hpp"

#include <cmath>

#include "wbc/spatial.hpp"

namespace wbc {
namespace {

constexpr double kJointFrictionRegularization = 1e-3;  // rad/s

struct ContactPoint {
  int frame = 0;
  Vec3 position = Vec3::Zero();
  Mat3X J;
  Vec3 velocity = Vec3::Zero();
  Vec3 explicit_force = Vec3::Zero();
  Vec3 damping = Vec3::Zero();  // diagonal (t, t, n)
};

bool finite(const SystemState& s) {
  return s.base_position.allFinite() && s.base_orientation.coeffs().allFinite() && s.joint_positions.allFinite() &&
         s.velocity.allFinite();
}

}  // namespace

void GroundModel::validate() const {
  if (!(stiffness > 0.0) || !(damping > 0.0)) throw Error("ground: stiffness and damping must be positive");
  if (!(regularization > 0.0)) throw Error("ground: regularization velocity must be positive");
  if (!(mu >= 0.0)) throw Error("ground: friction coefficient must be non-negative");
}

void DisturbanceSpec::validate(const RobotModel& model) const {
  const int n = model.num_joints();
  for (const VecX* v : {&coulomb, &viscous, &joint_bias}) {
    if (v->size() != 0 && v->size() != n) throw Error("disturbance: per-joint vector must have one entry per joint");
  }
  if ((coulomb.array() < 0).any() || (viscous.array() < 0).any()) {
    throw Error("disturbance: friction magnitudes must be non-negative");
  }
  for (const auto& m : masses) {
    if (model.link_index(m.link) < 0) throw Error("disturbance: unknown link '" + m.link + "'");
    if (!(m.mass > 0.0)) throw Error("disturbance: attached mass must be positive");
  }
  for (const auto& w : wrenches) {
    if (!model.has_frame(w.frame)) throw Error("disturbance: unknown frame '" + w.frame + "'");
  }
  for (const auto& [frame, bias] : force_bias) {
    if (!model.has_frame(frame)) throw Error("disturbance: unknown force-bias frame '" + frame + "'");
  }
}

void SensorModel::validate() const {
  if (delay_ticks < 0) throw Error("sensor: delay must be non-negative");
  if (velocity_filter < 0.0 || velocity_filter > 1.0) throw Error("sensor: filter coefficient must lie in [0, 1]");
  if (position_noise < 0.0 || orientation_noise < 0.0 || velocity_noise < 0.0 || force_noise < 0.0) {
    throw Error("sensor: noise levels must be non-negative");
  }
}

Plant::Plant(const RobotModel& nominal, PlantConfig config, SystemState initial)
    : model_(nominal), config_(std::move(config)), state_(std::move(initial)) {
  if (!(config_.dt > 0.0)) throw Error("plant: dt must be positive");
  config_.ground.validate();
  config_.disturbance.validate(nominal);
  for (const auto& m : config_.disturbance.masses) model_.attach_mass(m.link, m.mass, m.offset);
  frames_ = model_.contact_frames();
  wrenches_.assign(frames_.size(), Vec6::Zero());
  if (config_.crane.mode == CraneSpec::Mode::kWelded) {
    state_.base_position = config_.crane.anchor.position;
    state_.base_orientation = Quat(config_.crane.anchor.rotation);
    state_.velocity.head<6>().setZero();
  }
}

void Plant::step(const VecX& tau) {
  const int nv = model_.nv();
  const int n = model_.num_joints();
  if (tau.size() != n) throw Error("plant: torque dimension mismatch");
  const double dt = config_.dt;
  const VecX& nu = state_.velocity;
  const Kinematics kin(model_, state_);
  const DynamicsTerms dyn = compute_dynamics(kin);
  const DisturbanceSpec& dist = config_.disturbance;

  MatX A = dyn.mass;
  VecX rhs = -dyn.bias;
  rhs.tail(n) += tau;

  for (int k = 0; k < n; ++k) {
    const double qd = nu[6 + k];
    double b = 0.0;
    if (dist.viscous.size()) b += dist.viscous[k];
    if (dist.coulomb.size()) b += dist.coulomb[k] / std::max(std::abs(qd), kJointFrictionRegularization);
    A(6 + k, 6 + k) += dt * b;
    rhs[6 + k] -= b * qd;
    if (dist.joint_bias.size()) rhs[6 + k] += dist.joint_bias[k];
  }
  for (const auto& w : dist.wrenches) {
    if (time_ >= w.start && time_ < w.end) rhs += wrench_to_generalized(kin, {w.frame, w.wrench});
  }
  const CraneSpec& crane = config_.crane;
  if (crane.mode == CraneSpec::Mode::kSpring) {
    Vec6 e;
    e.head<3>() = state_.base_position - crane.anchor.position;
    e.tail<3>() = so3_log(state_.base_rotation() * crane.anchor.rotation.transpose());
    rhs.head<6>() -= crane.stiffness.cwiseProduct(e) + crane.damping.cwiseProduct(nu.head<6>());
    A.diagonal().head<6>() += dt * crane.damping;
  }

  // Contacts: explicit spring, linearly implicit damping and friction.
  const GroundModel& g = config_.ground;
  std::vector<ContactPoint> points;
  if (g.enabled) {
    for (size_t f = 0; f < frames_.size(); ++f) {
      const Frame& fr = model_.frame(frames_[f]);
      const int l = model_.link_index(fr.link);
      const Pose pose = kin.frame_pose(frames_[f]);
      for (const Vec3& local : fr.contact_points) {
        ContactPoint c;
        c.frame = static_cast<int>(f);
        c.position = pose.position + pose.rotation * local;
        const double phi = c.position.z() - g.height;
        if (phi >= 0.0) continue;
        c.J = kin.point_jacobian(l, c.position).topRows<3>();
        c.velocity = c.J * nu;
        c.explicit_force = Vec3(0.0, 0.0, -g.stiffness * phi);
        const double fn = std::max(0.0, -g.stiffness * phi - g.damping * c.velocity.z());
        const double bt = g.mu * fn / std::max(c.velocity.head<2>().norm(), g.regularization);
        c.damping = Vec3(bt, bt, g.damping);
        points.push_back(std::move(c));
      }
    }
  }
  const MatX A_free = A;
  const VecX rhs_free = rhs;
  for (const auto& c : points) {
    A.noalias() += dt * c.J.transpose() * c.damping.asDiagonal() * c.J;
    rhs.noalias() += c.J.transpose() * (c.explicit_force - c.damping.cwiseProduct(c.velocity));
  }

  const bool welded = crane.mode == CraneSpec::Mode::kWelded;
  auto solve = [&](const MatX& K, const VecX& r) {
    VecX acc = VecX::Zero(nv);
    if (welded) {
      acc.tail(n) = K.bottomRightCorner(n, n).llt().solve(r.tail(n));
    } else {
      acc = K.llt().solve(r);
    }
    return acc;
  };
  VecX acc = solve(A, rhs);

  wrenches_.assign(frames_.size(), Vec6::Zero());
  friction_excess_ = -std::numeric_limits<double>::infinity();
  bool clamped = false;
  std::vector<Vec3> forces;
  for (const auto& c : points) {
    const Vec3 v_next = c.velocity + dt * (c.J * acc);
    Vec3 f = c.explicit_force - c.damping.cwiseProduct(v_next);
    if (f.z() < 0.0) {
      f.setZero();
      clamped = true;
    }
    const double ft = f.head<2>().norm();
    const double limit = g.mu * f.z();
    if (ft > limit) {
      f.head<2>() *= ft > 0.0 ? limit / ft : 0.0;
      clamped = true;
    }
    forces.push_back(f);
  }
  if (clamped) {
    VecX r = rhs_free;
    for (size_t i = 0; i < points.size(); ++i) r.noalias() += points[i].J.transpose() * forces[i];
    acc = solve(A_free, r);
  }
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& c = points[i];
    const Vec3& f = forces[i];
    const Vec3 o = kin.frame_pose(frames_[c.frame]).position;
    wrenches_[c.frame].head<3>() += f;
    wrenches_[c.frame].tail<3>() += (c.position - o).cross(f);
    friction_excess_ = std::max(friction_excess_, f.head<2>().norm() - g.mu * f.z());
  }

  SystemState next = integrate(state_, acc, dt);
  if (welded) {
    next.base_position = crane.anchor.position;
    next.base_orientation = Quat(crane.anchor.rotation);
    next.velocity.head<6>().setZero();
  }
  const VecX lo = model_.lower_limits();
  const VecX hi = model_.upper_limits();
  for (int k = 0; k < n; ++k) {
    double& q = next.joint_positions[k];
    double& qd = next.velocity[6 + k];
    if (q < lo[k]) {
      q = lo[k];
      qd = std::max(qd, 0.0);
    } else if (q > hi[k]) {
      q = hi[k];
      qd = std::min(qd, 0.0);
    }
  }
  if (!finite(next)) {
    throw SimulationError("plant: non-finite state at t = " + std::to_string(time_));
  }
  state_ = std::move(next);
  time_ += dt;
}

double crane_sag(const RobotModel& model, const CraneSpec& crane) {
  return model.total_mass() * model.gravity().norm() / crane.stiffness[2];
}

Sensor::Sensor(SensorModel model, std::uint64_t seed, std::map<std::string, double> force_bias)
    : model_(model), rng_(seed), bias_(std::move(force_bias)) {
  model_.validate();
}

Measurement Sensor::measure(const Plant& plant) {
  Measurement m;
  m.time = plant.time();
  m.state = plant.state();
  m.contact_wrenches = plant.contact_wrenches();
  auto noise = [&](double sigma) { return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng_) : 0.0; };

  if (model_.position_noise > 0.0) {
    for (int i = 0; i < 3; ++i) m.state.base_position[i] += noise(model_.position_noise);
    for (int i = 0; i < m.state.joint_positions.size(); ++i) m.state.joint_positions[i] += noise(model_.position_noise);
  }
  if (model_.orientation_noise > 0.0) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = noise(model_.orientation_noise);
    m.state.base_orientation = (quat_exp(r) * m.state.base_orientation).normalized();
  }
  if (model_.velocity_noise > 0.0) {
    for (int i = 0; i < m.state.velocity.size(); ++i) m.state.velocity[i] += noise(model_.velocity_noise);
  }
  if (model_.velocity_filter > 0.0) {
    if (filtered_.size() != m.state.velocity.size()) filtered_ = m.state.velocity;
    filtered_ = model_.velocity_filter * filtered_ + (1.0 - model_.velocity_filter) * m.state.velocity;
    m.state.velocity = filtered_;
  }
  const auto& frames = plant.contact_frames();
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto it = bias_.find(frames[i]);
    if (it != bias_.end()) m.contact_wrenches[i].z() += it->second;
    if (model_.force_noise > 0.0) {
      for (int k = 0; k < 3; ++k) m.contact_wrenches[i][k] += noise(model_.force_noise);
    }
  }
  buffer_.push_back(std::move(m));
  while (static_cast<int>(buffer_.size()) > model_.delay_ticks + 1) buffer_.pop_front();
  return buffer_.front();
}

}  // namespace wbc
