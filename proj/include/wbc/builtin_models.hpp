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
#include <filesystem>
#include <random>

#include "wbc/robot_model.hpp"

namespace wbc {

/// Base link plus one revolute joint about y carrying a near-point mass at
/// distance `length` along -z.
RobotModel make_pendulum(double mass = 1.0, double length = 1.0);

/// Base link plus one prismatic joint along x carrying a body of `mass` kg;
/// frame "slider" sits at the carried body's origin.
RobotModel make_slider(double mass = 41.0);

/// Random tree of `n` mixed revolute/prismatic joints on a free-flyer base.
/// Every link gets a frame named "f<i>".
RobotModel make_random_tree(std::mt19937_64& rng, int n);

/// Random state with unit quaternion, joint positions in [-1, 1] and
/// velocities in [-1, 1].
SystemState random_state(const RobotModel& model, std::mt19937_64& rng);

/// Path of the shipped biped model (models/biped.json in the source tree).
std::filesystem::path default_biped_path();

/// Symmetric crouch of the default biped: hip pitch -bend, knee 2 bend, ankle
/// pitch -bend, base raised so both soles rest flat at z = 0.
SystemState standing_state(const RobotModel& biped, double bend);

}  // namespace wbc
