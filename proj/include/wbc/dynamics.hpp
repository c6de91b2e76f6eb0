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

#include <string>
#include <utility>
#include <vector>

#include "wbc/robot_model.hpp"

namespace wbc {

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};

/// Forward position/velocity kinematics of every link, plus world-aligned
/// Jacobians and their time derivatives. All twists are (linear, angular) in
/// world coordinates, with the linear part taken at the requested point.
class Kinematics {
 public:
  Kinematics(const RobotModel& model, const SystemState& state);

  const RobotModel& model() const { return *model_; }
  const SystemState& state() const { return *state_; }

  const Mat3& rotation(int link) const { return rot_[link]; }
  const Vec3& position(int link) const { return pos_[link]; }
  const Vec3& angular_velocity(int link) const { return omega_[link]; }
  /// Velocity of the link frame origin.
  const Vec3& origin_velocity(int link) const { return vel_[link]; }
  Vec3 link_com(int link) const;
  Vec3 point_velocity(int link, const Vec3& world_point) const;

  /// World axis and world anchor point of actuated joint k.
  const Vec3& joint_axis(int k) const { return axis_[k]; }
  const Vec3& joint_point(int k) const { return anchor_[k]; }

  Mat6X point_jacobian(int link, const Vec3& world_point) const;
  Mat6X point_jacobian_dot(int link, const Vec3& world_point) const;

  Pose frame_pose(const std::string& frame) const;
  Mat6X frame_jacobian(const std::string& frame) const;
  Mat6X frame_jacobian_dot(const std::string& frame) const;
  Vec6 frame_velocity(const std::string& frame) const;
  /// Jdot * nu for the frame, i.e. its acceleration at zero generalized acceleration.
  Vec6 frame_drift(const std::string& frame) const;

  Vec3 com() const;
  Vec3 com_velocity() const;
  Mat3X com_jacobian() const;
  Mat3X com_jacobian_dot() const;

  double kinetic_energy() const;
  double potential_energy() const;

 private:
  const RobotModel* model_;
  const SystemState* state_;
  std::vector<Mat3> rot_;
  std::vector<Vec3> pos_, omega_, vel_;
  std::vector<Vec3> axis_, anchor_;
};

struct DynamicsTerms {
  MatX mass;      // M(q)
  MatX coriolis;  // C(q, nu), Christoffel-consistent
  VecX gravity;   // tau_g(q)
  VecX bias;      // h = C nu + tau_g
};

/// M, C, tau_g and h from the per-link Jacobian factorization
/// M = sum J_i^T G_i J_i.
DynamicsTerms compute_dynamics(const Kinematics& kin);

MatX mass_matrix(const RobotModel& model, const SystemState& state);
VecX bias_forces(const RobotModel& model, const SystemState& state);
MatX coriolis_matrix(const RobotModel& model, const SystemState& state);
VecX gravity_vector(const RobotModel& model, const SystemState& state);

/// Recursive Newton-Euler: returns M nu_dot + C nu + tau_g (the last term only
/// when `with_gravity`).
VecX inverse_dynamics(const RobotModel& model, const SystemState& state, const VecX& acceleration,
                      bool with_gravity = true);

Mat6X frame_jacobian(const RobotModel& model, const SystemState& state, const std::string& frame);
Vec6 frame_acceleration_drift(const RobotModel& model, const SystemState& state, const std::string& frame);
Pose frame_pose(const RobotModel& model, const SystemState& state, const std::string& frame);

/// Dynamics in CoM coordinates: velocity nu_p = (v_c, w_b, qdot) = T nu.
struct ComDynamics {
  MatX mass;                 // M_c = T^-T M T^-1
  MatX coriolis;             // C_c = T^-T (C T^-1 + M d/dt(T^-1))
  Vec6 gravity_wrench;       // w_g = (m_c g, 0)
  double total_mass = 0.0;
  Vec3 com = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
  VecX velocity;             // nu_p
  MatX velocity_map;         // T
  MatX inverse_map;          // T^-1
  MatX inverse_map_dot;      // d/dt T^-1

  /// tau_g in CoM coordinates, exactly (-w_g, 0_n).
  VecX gravity() const;
  /// Express a Jacobian w.r.t. nu as one w.r.t. nu_p.
  MatX to_com_coordinates(const MatX& jacobian) const { return jacobian * inverse_map; }
  /// Drift J_p_dot nu_p of a task given its Jacobian and drift in base coordinates.
  VecX com_drift(const MatX& jacobian, const VecX& drift) const {
    return drift + jacobian * (inverse_map_dot * velocity);
  }
};

ComDynamics com_dynamics(const Kinematics& kin, const DynamicsTerms& terms);
ComDynamics com_dynamics(const RobotModel& model, const SystemState& state);

struct ExternalWrench {
  std::string frame;
  Vec6 wrench = Vec6::Zero();  // (force, moment) in world axes at the frame origin
};

/// nu_dot = M^-1 (S tau + sum J^T f - h).
VecX forward_dynamics(const RobotModel& model, const SystemState& state, const VecX& tau,
                      const std::vector<ExternalWrench>& external = {});

/// Generalized force of a wrench applied at a frame origin.
VecX wrench_to_generalized(const Kinematics& kin, const ExternalWrench& w);

/// Semi-implicit Euler step: velocity first, then configuration on the manifold.
SystemState integrate(const SystemState& state, const VecX& acceleration, double dt);

/// Configuration displacement q (+) nu * dt with the velocity left untouched.
SystemState displace(const SystemState& state, const VecX& direction, double dt);

}  // namespace wbc
