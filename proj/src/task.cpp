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

#include "wbc/task.hpp"

#include "wbc/spatial.hpp"

namespace wbc {

int TaskSpec::num_enabled() const {
  int n = 0;
  for (int i = 0; i < 6; ++i) n += enabled(i);
  return n;
}

void TaskSpec::validate(const RobotModel& model) const {
  if ((mask & 0x3f) == 0) throw Error("task '" + name + "': empty component mask");
  if ((kp.array() < 0).any() || (kd.array() < 0).any() || (weight.array() < 0).any()) {
    throw Error("task '" + name + "': gains and weights must be non-negative");
  }
  if (frame != kComTask && !model.has_frame(frame)) throw Error("task '" + name + "': unknown frame '" + frame + "'");
}

TaskKinematics task_kinematics(const Kinematics& kin, const std::string& frame) {
  TaskKinematics tk;
  const int nv = kin.model().nv();
  const VecX& nu = kin.state().velocity;
  if (frame == kComTask) {
    tk.position = kin.com();
    tk.rotation = kin.rotation(0);
    tk.jacobian = Mat6X::Zero(6, nv);
    tk.jacobian_dot = Mat6X::Zero(6, nv);
    tk.jacobian.topRows<3>() = kin.com_jacobian();
    tk.jacobian.block<3, 3>(3, 3).setIdentity();
    tk.jacobian_dot.topRows<3>() = kin.com_jacobian_dot();
  } else {
    const Pose pose = kin.frame_pose(frame);
    tk.position = pose.position;
    tk.rotation = pose.rotation;
    tk.jacobian = kin.frame_jacobian(frame);
    tk.jacobian_dot = kin.frame_jacobian_dot(frame);
  }
  tk.velocity = tk.jacobian * nu;
  tk.drift = tk.jacobian_dot * nu;
  return tk;
}

Vec6 task_error(const TaskSpec& task, const TaskKinematics& tk) {
  Vec6 e;
  e.head<3>() = task.ref_position - tk.position;
  e.tail<3>() = so3_log(task.ref_rotation * tk.rotation.transpose());
  return e;
}

Vec6 desired_task_acceleration(const TaskSpec& task, const TaskKinematics& tk) {
  const Vec6 e = task_error(task, tk);
  Vec6 a = task.ref_acceleration + task.kd.cwiseProduct(task.ref_velocity - tk.velocity) + task.kp.cwiseProduct(e);
  for (int i = 0; i < 6; ++i)
    if (!task.enabled(i)) a[i] = 0.0;
  return a;
}

Vec6 desired_task_acceleration(const TaskSpec& task, const RobotModel& model, const SystemState& state) {
  const Kinematics kin(model, state);
  return desired_task_acceleration(task, task_kinematics(kin, task.frame));
}

Vec6 impedance_wrench(const TaskSpec& task, const TaskKinematics& tk) {
  Vec6 e;
  e.head<3>() = tk.position - task.ref_position;
  e.tail<3>() = so3_log(tk.rotation * task.ref_rotation.transpose());
  Vec6 w = task.kp.cwiseProduct(e) + task.kd.cwiseProduct(tk.velocity - task.ref_velocity);
  for (int i = 0; i < 6; ++i)
    if (!task.enabled(i)) w[i] = 0.0;
  return w;
}

}  // namespace wbc
