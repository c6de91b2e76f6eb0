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
#include <string>

#include "wbc/dynamics.hpp"

namespace wbc {

/// Frame name that selects the centroidal task: CoM position for the linear
/// rows, base orientation for the angular rows.
inline constexpr const char* kComTask = "com";

/// One task controller. Components are ordered (x, y, z, rx, ry, rz); bit i of
/// `mask` enables component i.
struct TaskSpec {
  std::string name;
  std::string frame;
  std::uint8_t mask = 0x3f;
  Vec3 ref_position = Vec3::Zero();
  Mat3 ref_rotation = Mat3::Identity();
  Vec6 ref_velocity = Vec6::Zero();
  Vec6 ref_acceleration = Vec6::Zero();
  Vec6 kp = Vec6::Zero();
  Vec6 kd = Vec6::Zero();
  Vec6 weight = Vec6::Ones();

  bool enabled(int component) const { return (mask >> component) & 1; }
  int num_enabled() const;
  /// Throws Error for negative gains/weights, an empty mask or an unknown frame.
  void validate(const RobotModel& model) const;
};

/// Pose, twist, Jacobian and Jacobian derivative of a task frame.
struct TaskKinematics {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec6 velocity = Vec6::Zero();
  Mat6X jacobian;
  Mat6X jacobian_dot;
  Vec6 drift = Vec6::Zero();  // jacobian_dot * nu
};

TaskKinematics task_kinematics(const Kinematics& kin, const std::string& frame);

/// (x_ref - x, log(R_ref R^T)).
Vec6 task_error(const TaskSpec& task, const TaskKinematics& tk);

/// xdd_d = xdd_ref + K_d (xd_ref - xd) + K_p e, zero on disabled components.
Vec6 desired_task_acceleration(const TaskSpec& task, const TaskKinematics& tk);
Vec6 desired_task_acceleration(const TaskSpec& task, const RobotModel& model, const SystemState& state);

/// Impedance wrench K_p (x - x_ref) + K_d (xd - xd_ref), i.e. minus the PD
/// action, with orientation error log(R R_ref^T). Zero on disabled components.
Vec6 impedance_wrench(const TaskSpec& task, const TaskKinematics& tk);

}  // namespace wbc
