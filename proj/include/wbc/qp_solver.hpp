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

#include <iosfwd>
#include <optional>
#include <string>

#include "wbc/types.hpp"

namespace wbc {

/// minimize 1/2 x^T H x + g^T x  s.t.  A_eq x = b_eq,  lower <= A_in x <= upper.
/// Infinite bounds are allowed on either side of an inequality row.
struct QpProblem {
  MatX H;
  VecX g;
  MatX A_eq;
  VecX b_eq;
  MatX A_in;
  VecX lower;
  VecX upper;

  std::optional<VecX> warm_x;
  std::optional<VecX> warm_y_eq;
  std::optional<VecX> warm_y_in;

  int dim() const { return static_cast<int>(g.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }
  int num_in() const { return static_cast<int>(lower.size()); }

  /// Empty problem of dimension d with no constraints.
  static QpProblem unconstrained(const MatX& H, const VecX& g);
  /// Throws Error when dimensions, symmetry or bound ordering are violated.
  void validate() const;
  double objective(const VecX& x) const { return 0.5 * x.dot(H * x) + g.dot(x); }
};

enum class QpStatus { kOptimal, kPrimalInfeasible, kMaxIterations };

std::string to_string(QpStatus status);

struct QpSettings {
  double eps_abs = 1e-6;
  int max_iterations = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eps_primal_infeasible = 1e-7;
  double regularization = 1e-9;  // added to H when it is only semidefinite
  bool adaptive_rho = true;
  int adaptive_rho_interval = 25;
  bool polish = true;
};

/// Duals follow the convention H x + g + A_eq^T y_eq + A_in^T y_in = 0 with
/// y_in > 0 on active upper bounds and y_in < 0 on active lower bounds.
/// For a primal-infeasible problem y_in/y_eq hold the certificate direction.
struct QpSolution {
  VecX x;
  VecX y_eq;
  VecX y_in;
  QpStatus status = QpStatus::kMaxIterations;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  int iterations = 0;
  bool polished = false;
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
};

/// Infinity norms of stationarity, feasibility and complementary slackness.
/// A dual that pushes against an infinite bound counts as a dual violation.
KktResiduals kkt_residuals(const QpProblem& problem, const VecX& x, const VecX& y_eq, const VecX& y_in);

/// ADMM operator-splitting solver with rho adaptation and an active-set
/// polish. Holds its own workspace; one instance per control thread.
class QpSolver {
 public:
  explicit QpSolver(QpSettings settings = {}) : settings_(settings) {}

  QpSolution solve(const QpProblem& problem);

  const QpSettings& settings() const { return settings_; }
  QpSettings& settings() { return settings_; }

 private:
  bool try_polish(const QpProblem& p, const VecX& z, const VecX& y, QpSolution& out) const;

  QpSettings settings_;
  MatX A_;
  VecX l_, u_, rho_;
};

/// Plain-text, matrix-market style dump of a problem (one block per matrix).
void write_problem(std::ostream& os, const QpProblem& problem);

}  // namespace wbc
