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

#include "wbc/contact.hpp"

#include <cmath>
#include <limits>

namespace wbc {

void ContactSet::validate(const RobotModel& model) const {
  if (!(mu > 0.0)) throw Error("contact set: friction coefficient must be positive");
  for (const auto& f : frames) {
    if (!model.has_frame(f)) throw Error("contact set: unknown frame '" + f + "'");
  }
  if (cop_box && ((*cop_box).array() < 0.0).any()) throw Error("contact set: negative CoP box");
}

ContactConstraints contact_constraints(const ContactSet& contacts, const std::vector<Mat3>& rotations) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int nc = contacts.size();
  const int per = contacts.cop_box ? 11 : 5;
  ContactConstraints c;
  c.A = MatX::Zero(per * nc, 6 * nc);
  c.lower = VecX::Constant(per * nc, -kInf);
  c.upper = VecX::Zero(per * nc);
  const double k = contacts.mu / std::sqrt(2.0);
  for (int i = 0; i < nc; ++i) {
    // Local rows acting on (f_local, n_local), mapped back through R^T.
    Eigen::Matrix<double, Eigen::Dynamic, 6> L = Eigen::Matrix<double, Eigen::Dynamic, 6>::Zero(per, 6);
    L.row(0) << 1, 0, -k, 0, 0, 0;
    L.row(1) << -1, 0, -k, 0, 0, 0;
    L.row(2) << 0, 1, -k, 0, 0, 0;
    L.row(3) << 0, -1, -k, 0, 0, 0;
    L.row(4) << 0, 0, 1, 0, 0, 0;
    if (contacts.cop_box) {
      const double X = (*contacts.cop_box)[0];
      const double Y = (*contacts.cop_box)[1];
      const double t = contacts.mu * (X + Y);
      L.row(5) << 0, 0, -Y, 1, 0, 0;
      L.row(6) << 0, 0, -Y, -1, 0, 0;
      L.row(7) << 0, 0, -X, 0, 1, 0;
      L.row(8) << 0, 0, -X, 0, -1, 0;
      L.row(9) << 0, 0, -t, 0, 0, 1;
      L.row(10) << 0, 0, -t, 0, 0, -1;
    }
    Mat6 Rt = Mat6::Zero();
    Rt.topLeftCorner<3, 3>() = rotations[i].transpose();
    Rt.bottomRightCorner<3, 3>() = rotations[i].transpose();
    c.A.block(per * i, 6 * i, per, 6) = L * Rt;
    c.lower[per * i + 4] = 0.0;
    c.upper[per * i + 4] = kInf;
  }
  return c;
}

double friction_violation(double mu, const Mat3& rotation, const Vec6& wrench) {
  const Vec3 f = rotation.transpose() * wrench.head<3>();
  const double k = mu / std::sqrt(2.0);
  return std::max({std::abs(f.x()) - k * f.z(), std::abs(f.y()) - k * f.z(), -f.z()});
}

Vec2 footprint_half_extents(const Frame& frame) {
  Vec2 h = Vec2::Zero();
  for (const Vec3& p : frame.contact_points) h = h.cwiseMax(p.head<2>().cwiseAbs());
  return h;
}

}  // namespace wbc
