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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "wbc/qp_solver.hpp"

namespace wbc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem make_problem(int d, int me, int mi) {
  QpProblem p = QpProblem::unconstrained(MatX::Identity(d, d), VecX::Zero(d));
  p.A_eq = MatX::Zero(me, d);
  p.b_eq = VecX::Zero(me);
  p.A_in = MatX::Zero(mi, d);
  p.lower = VecX::Constant(mi, -kInf);
  p.upper = VecX::Constant(mi, kInf);
  return p;
}

// Brute-force oracle: enumerate every active set, solve the equality KKT
// system and keep the feasible, sign-consistent candidate of lowest cost.
struct Oracle {
  bool found = false;
  VecX x;
  double cost = kInf;
};

Oracle enumerate(const QpProblem& p) {
  const int d = p.dim(), me = p.num_eq(), mi = p.num_in();
  Oracle best;
  int combos = 1;
  for (int i = 0; i < mi; ++i) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(mi);
    int c = code;
    bool valid = true;
    for (int i = 0; i < mi; ++i) {
      state[i] = c % 3;
      c /= 3;
      if (state[i] == 1 && !std::isfinite(p.lower[i])) valid = false;
      if (state[i] == 2 && !std::isfinite(p.upper[i])) valid = false;
    }
    if (!valid) continue;
    std::vector<int> rows;
    for (int i = 0; i < mi; ++i)
      if (state[i]) rows.push_back(i);
    const int na = me + static_cast<int>(rows.size());
    if (na > d) continue;
    MatX K = MatX::Zero(d + na, d + na);
    VecX b = VecX::Zero(d + na);
    K.topLeftCorner(d, d) = p.H;
    b.head(d) = -p.g;
    MatX A(na, d);
    for (int i = 0; i < me; ++i) {
      A.row(i) = p.A_eq.row(i);
      b[d + i] = p.b_eq[i];
    }
    for (size_t k = 0; k < rows.size(); ++k) {
      A.row(me + k) = p.A_in.row(rows[k]);
      b[d + me + k] = state[rows[k]] == 1 ? p.lower[rows[k]] : p.upper[rows[k]];
    }
    K.topRightCorner(d, na) = A.transpose();
    K.bottomLeftCorner(na, d) = A;
    Eigen::FullPivLU<MatX> lu(K);
    if (!lu.isInvertible()) continue;
    const VecX sol = lu.solve(b);
    const VecX x = sol.head(d);
    const VecX ax = p.A_in * x;
    bool ok = true;
    for (int i = 0; i < mi; ++i) {
      if (ax[i] < p.lower[i] - 1e-9 || ax[i] > p.upper[i] + 1e-9) ok = false;
    }
    for (size_t k = 0; k < rows.size(); ++k) {
      const double y = sol[d + me + k];
      if (state[rows[k]] == 1 && y > 1e-9) ok = false;
      if (state[rows[k]] == 2 && y < -1e-9) ok = false;
    }
    if (!ok) continue;
    const double cost = p.objective(x);
    if (cost < best.cost) {
      best.found = true;
      best.cost = cost;
      best.x = x;
    }
  }
  return best;
}

QpProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.0, 1.0);
  const int d = dim(rng);
  const int me = std::uniform_int_distribution<int>(0, std::min(3, d - 1))(rng);
  const int mi = std::uniform_int_distribution<int>(0, 6)(rng);
  QpProblem p = make_problem(d, me, mi);
  MatX B(d, d);
  for (int i = 0; i < B.size(); ++i) B.data()[i] = u(rng);
  p.H = B * B.transpose() + 0.1 * MatX::Identity(d, d);
  for (int i = 0; i < d; ++i) p.g[i] = 3.0 * u(rng);
  VecX x0(d);
  for (int i = 0; i < d; ++i) x0[i] = u(rng);
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < d; ++j) p.A_eq(i, j) = u(rng);
  }
  p.b_eq = p.A_eq * x0;
  for (int i = 0; i < mi; ++i) {
    for (int j = 0; j < d; ++j) p.A_in(i, j) = u(rng);
    const double ax = p.A_in.row(i).dot(x0);
    const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    if (kind != 1) p.lower[i] = ax - gap(rng);
    if (kind != 2) p.upper[i] = ax + gap(rng);
  }
  return p;
}

TEST(QpSolver, UnconstrainedScalar) {
  QpProblem p = QpProblem::unconstrained(MatX::Identity(1, 1), VecX::Constant(1, -1.0));
  const QpSolution s = QpSolver().solve(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-9);
}

TEST(QpSolver, EqualityOnSimplexLine) {
  QpProblem p = make_problem(2, 1, 0);
  p.A_eq << 1.0, 1.0;
  p.b_eq << 1.0;
  const QpSolution s = QpSolver().solve(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], 0.5, 1e-9);
  EXPECT_NEAR(s.x[1], 0.5, 1e-9);
  EXPECT_NEAR(s.y_eq[0], -0.5, 1e-9);
}

TEST(QpSolver, ActiveUpperBoundHasPositiveDual) {
  QpProblem p = make_problem(1, 0, 1);
  p.g << -2.0;
  p.A_in << 1.0;
  p.upper << 1.0;
  const QpSolution s = QpSolver().solve(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-9);
  EXPECT_NEAR(s.y_in[0], 1.0, 1e-9);
}

TEST(QpSolver, ActiveLowerBoundHasNegativeDual) {
  QpProblem p = make_problem(1, 0, 1);
  p.g << 2.0;
  p.A_in << 1.0;
  p.lower << -1.0;
  const QpSolution s = QpSolver().solve(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], -1.0, 1e-9);
  EXPECT_NEAR(s.y_in[0], -1.0, 1e-9);
}

TEST(QpSolver, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(7);
  QpSolver solver;
  int worst_iters = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const QpProblem p = random_problem(rng);
    const Oracle o = enumerate(p);
    ASSERT_TRUE(o.found) << "trial " << trial;
    const QpSolution s = solver.solve(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal) << "trial " << trial;
    EXPECT_LE((s.x - o.x).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
    EXPECT_NEAR(p.objective(s.x), o.cost, 1e-6 * std::max(1.0, std::abs(o.cost))) << "trial " << trial;
    const KktResiduals r = kkt_residuals(p, s.x, s.y_eq, s.y_in);
    EXPECT_LE(r.primal, 1e-6);
    EXPECT_LE(r.dual, 1e-6);
    EXPECT_LE(r.complementarity, 1e-6);
    worst_iters = std::max(worst_iters, s.iterations);
  }
  EXPECT_LT(worst_iters, 4000);
}

TEST(QpSolver, SemidefiniteHessian) {
  // minimize x0 subject to x0 + x1 = 1, 0 <= x <= 2: optimum x0 = 0.
  QpProblem p = make_problem(2, 1, 2);
  p.H.setZero();
  p.g << 1.0, 0.0;
  p.A_eq << 1.0, 1.0;
  p.b_eq << 1.0;
  p.A_in.setIdentity();
  p.lower.setZero();
  p.upper.setConstant(2.0);
  const QpSolution s = QpSolver().solve(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.x[0], 0.0, 1e-6);
  EXPECT_NEAR(s.x[1], 1.0, 1e-6);
}

TEST(QpSolver, DetectsInfeasibleBounds) {
  // x >= 1 and x <= 0 expressed as two rows.
  QpProblem p = make_problem(1, 0, 2);
  p.A_in << 1.0, 1.0;
  p.lower << 1.0, -kInf;
  p.upper << kInf, 0.0;
  const QpSolution s = QpSolver().solve(p);
  EXPECT_EQ(s.status, QpStatus::kPrimalInfeasible);
}

TEST(QpSolver, DetectsInconsistentEqualities) {
  QpProblem p = make_problem(2, 2, 0);
  p.A_eq << 1.0, 1.0, 1.0, 1.0;
  p.b_eq << 0.0, 1.0;
  const QpSolution s = QpSolver().solve(p);
  EXPECT_EQ(s.status, QpStatus::kPrimalInfeasible);
}

TEST(QpSolver, Deterministic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const QpProblem p = random_problem(rng);
    const QpSolution a = QpSolver().solve(p);
    const QpSolution b = QpSolver().solve(p);
    ASSERT_EQ(a.iterations, b.iterations);
    for (int i = 0; i < p.dim(); ++i) ASSERT_EQ(a.x[i], b.x[i]);
  }
}

TEST(QpSolver, WarmStartAtOptimumPolishesImmediately) {
  std::mt19937_64 rng(3);
  QpSolver solver;
  for (int trial = 0; trial < 50; ++trial) {
    QpProblem p = random_problem(rng);
    const QpSolution cold = solver.solve(p);
    ASSERT_EQ(cold.status, QpStatus::kOptimal);
    p.warm_x = cold.x;
    p.warm_y_eq = cold.y_eq;
    p.warm_y_in = cold.y_in;
    const QpSolution warm = solver.solve(p);
    ASSERT_EQ(warm.status, QpStatus::kOptimal);
    EXPECT_EQ(warm.iterations, 0);
    EXPECT_LE((warm.x - cold.x).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(KktResiduals, HandComputedExample) {
  QpProblem p = make_problem(2, 1, 1);
  p.g << -1.0, 0.0;
  p.A_eq << 1.0, -1.0;
  p.b_eq << 0.0;
  p.A_in << 1.0, 0.0;
  p.lower << 0.0;
  p.upper << 0.25;
  // x = (0.3, 0.2): eq residual 0.1, upper violation 0.05.
  VecX x(2), ye(1), yi(1);
  x << 0.3, 0.2;
  ye << 0.5;
  yi << 2.0;
  const KktResiduals r = kkt_residuals(p, x, ye, yi);
  EXPECT_NEAR(r.primal, 0.1, 1e-12);
  // stationarity: (0.3 - 1 + 0.5 + 2, 0.2 - 0.5) = (1.8, -0.3)
  EXPECT_NEAR(r.dual, 1.8, 1e-12);
  EXPECT_NEAR(r.complementarity, 2.0 * 0.05, 1e-12);
}

TEST(KktResiduals, DualAgainstInfiniteBoundCounts) {
  QpProblem p = make_problem(1, 0, 1);
  p.A_in << 1.0;
  p.lower << 0.0;
  VecX x = VecX::Zero(1), ye(0), yi(1);
  yi << 0.3;
  EXPECT_NEAR(kkt_residuals(p, x, ye, yi).complementarity, 0.3, 1e-15);
}

TEST(KktResiduals, StationarityIsLinearInDuals) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    QpProblem p = random_problem(rng);
    p.lower.setConstant(-kInf);
    p.upper.setConstant(kInf);
    const VecX x = VecX::Random(p.dim());
    const VecX ye = VecX::Random(p.num_eq());
    const VecX base = p.H * x + p.g;
    const double r = kkt_residuals(p, x, ye, VecX::Zero(p.num_in())).dual;
    const VecX expected = base + p.A_eq.transpose() * ye;
    EXPECT_NEAR(r, expected.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(QpProblem, ValidateRejectsBadInput) {
  QpProblem p = make_problem(2, 0, 1);
  p.lower << 1.0;
  p.upper << 0.0;
  EXPECT_THROW(p.validate(), Error);
  QpProblem q = make_problem(2, 0, 0);
  q.H(0, 1) = 1.0;
  EXPECT_THROW(q.validate(), Error);
}

TEST(QpProblem, DumpContainsEveryBlock) {
  QpProblem p = make_problem(2, 1, 1);
  std::ostringstream os;
  write_problem(os, p);
  const std::string s = os.str();
  for (const char* name : {"% H", "% g", "% A_eq", "% b_eq", "% A_in", "% lower", "% upper"}) {
    EXPECT_NE(s.find(name), std::string::npos) << name;
  }
}

}  // namespace
}  // namespace wbc
