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
#include <vector>

#include "wbc/contact.hpp"
#include "wbc/qp_solver.hpp"
#include "wbc/task.hpp"

namespace wbc {

struct IdSettings {
  /// Diagonal cost on torques and contact wrenches; picks the internal-force
  /// split that tasks leave free.
  double regularization = 1e-12;
  /// Base welded to the world: base accelerations are pinned to zero and only
  /// the joint rows of the dynamics are imposed.
  bool fixed_base = false;
  int max_hold_ticks = 10;
  double fallback_damping = 5.0;  // N m s/rad
  QpSettings qp;
};

/// Decision vector layout (nu_dot, tau, f_c): nv + n + 6 n_c entries.
struct IdLayout {
  int nv = 0;
  int n = 0;
  int nc = 0;
  int acc() const { return 0; }
  int tau() const { return nv; }
  int force() const { return nv + n; }
  int size() const { return nv + n + 6 * nc; }
};

QpProblem assemble_qp(const RobotModel& model, const SystemState& state, const std::vector<TaskSpec>& tasks,
                      const ContactSet& contacts, const IdSettings& settings = {});

struct ControlOutput {
  VecX tau;
  VecX acceleration;
  VecX contact_wrenches;
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
  bool polished = false;
  bool fallback = false;
};

/// Task-acceleration whole-body controller. Keeps the previous solution for
/// warm starting and for the hold-then-damp fallback.
class IdController {
 public:
  explicit IdController(IdSettings settings = {}) : settings_(settings), solver_(settings.qp) {}

  ControlOutput tick(const RobotModel& model, const SystemState& state, const std::vector<TaskSpec>& tasks,
                     const ContactSet& contacts);

  const IdSettings& settings() const { return settings_; }
  const QpProblem& last_problem() const { return problem_; }

 private:
  IdSettings settings_;
  QpSolver solver_;
  QpProblem problem_;
  std::optional<QpSolution> previous_;
  VecX last_tau_;
  int failures_ = 0;
};

/// Convenience wrapper: one stateless tick.
ControlOutput control_tick(const RobotModel& model, const SystemState& state, const std::vector<TaskSpec>& tasks,
                           const ContactSet& contacts, const IdSettings& settings = {});

}  // namespace wbc
