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
#include <vector>

#include "wbc/robot_model.hpp"

namespace wbc {

struct PropertyCheck {
  std::string name;
  double value = 0.0;      // worst error found
  double tolerance = 0.0;
  bool passed = false;
};

struct ModelCheckOptions {
  int samples = 100;       // random states for the per-state checks
  double energy_horizon = 10.0;  // s of passive free flight
  double energy_dt = 1e-3;
  std::uint64_t seed = 1;
};

/// Mass-matrix symmetry, Mdot - 2C skew symmetry, CoM gravity form, passive
/// energy drift and frame Jacobians against finite differences.
std::vector<PropertyCheck> check_model(const RobotModel& model, const ModelCheckOptions& options = {});

}  // namespace wbc
