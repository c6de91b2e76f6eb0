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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbc/types.hpp"

namespace wbc {

enum class JointType { kFreeFlyer, kRevolute, kPrismatic };

struct Link {
  std::string name;
  double mass = 0.0;            // kg
  Vec3 com = Vec3::Zero();      // m, in link frame
  Mat3 inertia = Mat3::Zero();  // kg m^2, about the CoM, link axes
};

/// A one-DoF joint between `parent` and `child`. The child frame sits at the
/// joint origin (`origin_position`, `origin_rotation` in the parent frame);
/// `axis` is expressed in that joint frame.
struct Joint {
  std::string name;
  JointType type = JointType::kRevolute;
  std::string parent;
  std::string child;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin_position = Vec3::Zero();
  Mat3 origin_rotation = Mat3::Identity();
  double lower = -1e9;
  double upper = 1e9;
  double effort = 1e9;  // N m or N
};

struct Frame {
  std::string name;
  std::string link;
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  /// Non-empty for contact sites: sole points (frame coordinates) used by the
  /// compliant ground model.
  std::vector<Vec3> contact_points;
};

/// Kinematic tree with one free-flyer root. Links are stored parent-first;
/// link 0 is the floating base and link i > 0 is the child of actuated
/// joint i - 1, whose velocity is coordinate 6 + (i - 1).
class RobotModel {
 public:
  RobotModel() = default;

  static RobotModel from_json(const nlohmann::json& doc);
  static RobotModel load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Builder entry points (validated again by finalize()).
  void set_base(Link base, std::string root_joint_name = "root");
  void add_link(Link link, Joint joint);
  void add_frame(Frame frame);
  void set_gravity(const Vec3& g) { gravity_ = g; }
  void finalize();

  int num_joints() const { return static_cast<int>(joints_.size()); }
  int nv() const { return num_joints() + 6; }
  int num_links() const { return static_cast<int>(links_.size()); }

  const Link& link(int i) const { return links_[i]; }
  const Joint& joint(int k) const { return joints_[k]; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<Frame>& frames() const { return frames_; }
  /// Parent link index of link i (-1 for the base).
  int parent(int i) const { return parents_[i]; }
  const Vec3& gravity() const { return gravity_; }
  const std::string& root_joint_name() const { return root_joint_; }

  int link_index(const std::string& name) const;
  /// -1 when the model has no joint of that name.
  int joint_index(const std::string& name) const;
  const Frame& frame(const std::string& name) const;
  bool has_frame(const std::string& name) const;
  std::vector<std::string> contact_frames() const;

  double total_mass() const;
  VecX effort_limits() const;
  VecX lower_limits() const;
  VecX upper_limits() const;

  /// Rigidly attach a point mass to a link (parallel-axis update of the link's
  /// inertial parameters).
  void attach_mass(const std::string& link, double mass, const Vec3& offset);

 private:
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::vector<int> parents_;
  std::vector<Frame> frames_;
  Vec3 gravity_ = Vec3(0.0, 0.0, -9.81);
  std::string root_joint_ = "root";
};

/// Generalized configuration and velocity. Velocity layout is
/// (v_b, w_b, qdot) with the base linear velocity of the base origin and the
/// base angular velocity both expressed in the world frame.
struct SystemState {
  Quat base_orientation = Quat::Identity();
  Vec3 base_position = Vec3::Zero();
  VecX joint_positions;
  VecX velocity;

  static SystemState zero(const RobotModel& model);
  Mat3 base_rotation() const { return base_orientation.toRotationMatrix(); }
};

}  // namespace wbc
