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

#include "wbc/types.hpp"

namespace wbc {

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// Rodrigues formula, exp: so(3) -> SO(3).
Mat3 so3_exp(const Vec3& rotation_vector);

/// Principal logarithm SO(3) -> so(3), valid up to and including angle pi.
Vec3 so3_log(const Mat3& rotation);

/// Quaternion for a rotation vector (axis * angle).
Quat quat_exp(const Vec3& rotation_vector);

/// Roll-pitch-yaw (fixed XYZ axes) to rotation matrix, R = Rz(y) Ry(p) Rx(r).
Mat3 rpy_to_matrix(const Vec3& rpy);

}  // namespace wbc
