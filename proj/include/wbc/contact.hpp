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

#include <optional>
#include <string>
#include <vector>

#include "wbc/robot_model.hpp"

namespace wbc {

/// Active contacts, each carrying a 6D wrench (force, moment) expressed in
/// world axes at the contact frame origin.
struct ContactSet {
  std::vector<std::string> frames;
  double mu = 0.5;
  /// Half extents (x, y) of the admissible centre-of-pressure rectangle in the
  /// contact frame. When set, moments are bounded by it as well.
  std::optional<Vec2> cop_box;

  int size() const { return static_cast<int>(frames.size()); }
  void validate(const RobotModel& model) const;
};

/// Inequalities lower <= A f <= upper on the stacked contact wrenches f.
struct ContactConstraints {
  MatX A;
  VecX lower;
  VecX upper;
};

/// Friction pyramid |f_x|, |f_y| <= mu f_z / sqrt(2), f_z >= 0 and the optional
/// CoP box, all in the local axes given by `rotations` (one per contact).
ContactConstraints contact_constraints(const ContactSet& contacts, const std::vector<Mat3>& rotations);

/// Largest violation of the pyramid by one wrench (<= 0 when satisfied).
double friction_violation(double mu, const Mat3& rotation, const Vec6& wrench);

/// Half extents of the contact-point footprint of a frame.
Vec2 footprint_half_extents(const Frame& frame);

}  // namespace wbc
