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

#include "wbc/builtin_models.hpp"

#include "wbc/dynamics.hpp"
#include "wbc/spatial.hpp"

namespace wbc {
namespace {

Link box_link(const std::string& name, double mass, const Vec3& com, const Vec3& size) {
  Link l;
  l.name = name;
  l.mass = mass;
  l.com = com;
  const Vec3 s2 = size.cwiseProduct(size);
  l.inertia = (mass / 12.0 * Vec3(s2.y() + s2.z(), s2.x() + s2.z(), s2.x() + s2.y())).asDiagonal();
  return l;
}

}  // namespace

RobotModel make_pendulum(double mass, double length) {
  RobotModel m;
  m.set_base(box_link("base", 1.0, Vec3::Zero(), Vec3(0.1, 0.1, 0.1)));
  Link bob;
  bob.name = "bob";
  bob.mass = mass;
  bob.com = Vec3(0.0, 0.0, -length);
  bob.inertia = 1e-9 * Mat3::Identity();
  Joint j;
  j.name = "swing";
  j.type = JointType::kRevolute;
  j.parent = "base";
  j.axis = Vec3::UnitY();
  m.add_link(bob, j);
  Frame f;
  f.name = "tip";
  f.link = "bob";
  f.position = Vec3(0.0, 0.0, -length);
  m.add_frame(f);
  m.finalize();
  return m;
}

RobotModel make_slider(double mass) {
  RobotModel m;
  m.set_base(box_link("base", 5.0, Vec3::Zero(), Vec3(0.2, 0.2, 0.2)));
  Joint j;
  j.name = "slide";
  j.type = JointType::kPrismatic;
  j.parent = "base";
  j.axis = Vec3::UnitX();
  j.origin_position = Vec3(0.0, 0.0, 0.3);
  m.add_link(box_link("carriage", mass, Vec3::Zero(), Vec3(0.3, 0.3, 0.3)), j);
  Frame f;
  f.name = "slider";
  f.link = "carriage";
  m.add_frame(f);
  m.finalize();
  return m;
}

RobotModel make_random_tree(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  auto random_vec = [&] { return Vec3(u(rng), u(rng), u(rng)); };
  auto random_link = [&](const std::string& name) {
    Link l;
    l.name = name;
    l.mass = pos(rng);
    l.com = 0.3 * random_vec();
    const Mat3 A = so3_exp(M_PI * random_vec());
    const Vec3 d(0.05 + 0.2 * std::abs(u(rng)), 0.05 + 0.2 * std::abs(u(rng)), 0.05 + 0.2 * std::abs(u(rng)));
    l.inertia = A * d.asDiagonal() * A.transpose();
    l.inertia = 0.5 * (l.inertia + l.inertia.transpose());
    return l;
  };
  RobotModel m;
  m.set_base(random_link("l0"));
  Frame f0;
  f0.name = "f0";
  f0.link = "l0";
  f0.position = 0.2 * random_vec();
  m.add_frame(f0);
  for (int i = 1; i <= n; ++i) {
    Joint j;
    j.name = "j" + std::to_string(i);
    j.type = (rng() % 4 == 0) ? JointType::kPrismatic : JointType::kRevolute;
    j.parent = "l" + std::to_string(rng() % i);
    j.axis = random_vec().normalized();
    j.origin_position = 0.5 * random_vec();
    j.origin_rotation = so3_exp(random_vec());
    m.add_link(random_link("l" + std::to_string(i)), j);
    Frame f;
    f.name = "f" + std::to_string(i);
    f.link = "l" + std::to_string(i);
    f.position = 0.3 * random_vec();
    f.rotation = so3_exp(random_vec());
    m.add_frame(f);
  }
  m.finalize();
  return m;
}

SystemState random_state(const RobotModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SystemState s = SystemState::zero(model);
  s.base_orientation = Quat(u(rng), u(rng), u(rng), u(rng)).normalized();
  s.base_position = Vec3(u(rng), u(rng), u(rng));
  for (int k = 0; k < model.num_joints(); ++k) s.joint_positions[k] = u(rng);
  for (int k = 0; k < model.nv(); ++k) s.velocity[k] = u(rng);
  return s;
}

SystemState standing_state(const RobotModel& biped, double bend) {
  SystemState s = SystemState::zero(biped);
  for (const char* side : {"l_", "r_"}) {
    const std::string p(side);
    auto index = [&](const std::string& name) {
      const int k = biped.joint_index(name);
      if (k < 0) throw Error("standing_state: model has no joint '" + name + "'");
      return k;
    };
    s.joint_positions[index(p + "hip_pitch")] = -bend;
    s.joint_positions[index(p + "knee")] = 2.0 * bend;
    s.joint_positions[index(p + "ankle_pitch")] = -bend;
  }
  s.base_position.z() = -frame_pose(biped, s, "l_sole").position.z();
  return s;
}

std::filesystem::path default_biped_path() { return std::filesystem::path(WBC_SOURCE_DIR) / "models" / "biped.json"; }

}  // namespace wbc
