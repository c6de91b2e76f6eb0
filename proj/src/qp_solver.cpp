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

#include "wbc/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace wbc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VecX& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

VecX clip(const VecX& v, const VecX& l, const VecX& u) { return v.cwiseMax(l).cwiseMin(u); }

}  // namespace

std::string to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kPrimalInfeasible: return "primal-infeasible";
    case QpStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

QpProblem QpProblem::unconstrained(const MatX& H, const VecX& g) {
  QpProblem p;
  p.H = H;
  p.g = g;
  p.A_eq = MatX::Zero(0, g.size());
  p.b_eq = VecX::Zero(0);
  p.A_in = MatX::Zero(0, g.size());
  p.lower = VecX::Zero(0);
  p.upper = VecX::Zero(0);
  return p;
}

void QpProblem::validate() const {
  const int d = dim();
  if (H.rows() != d || H.cols() != d) throw Error("qp: H must be d x d");
  if (A_eq.cols() != d || A_eq.rows() != b_eq.size()) throw Error("qp: equality block dimensions mismatch");
  if (A_in.cols() != d || A_in.rows() != lower.size() || upper.size() != lower.size()) {
    throw Error("qp: inequality block dimensions mismatch");
  }
  const double scale = std::max(1.0, H.size() ? H.cwiseAbs().maxCoeff() : 0.0);
  if (H.size() && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw Error("qp: H is not symmetric");
  for (int i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw Error("qp: lower bound above upper bound in row " + std::to_string(i));
    }
  }
  if (warm_x && warm_x->size() != d) throw Error("qp: warm start dimension mismatch");
}

KktResiduals kkt_residuals(const QpProblem& p, const VecX& x, const VecX& y_eq, const VecX& y_in) {
  KktResiduals r;
  VecX stat = p.H * x + p.g;
  if (p.num_eq() > 0) {
    stat += p.A_eq.transpose() * y_eq;
    r.primal = std::max(r.primal, inf_norm(p.A_eq * x - p.b_eq));
  }
  if (p.num_in() > 0) {
    stat += p.A_in.transpose() * y_in;
    const VecX ax = p.A_in * x;
    for (int i = 0; i < ax.size(); ++i) {
      r.primal = std::max({r.primal, p.lower[i] - ax[i], ax[i] - p.upper[i]});
      const double y = y_in[i];
      double c = 0.0;
      if (y > 0.0) {
        c = std::isfinite(p.upper[i]) ? y * std::abs(p.upper[i] - ax[i]) : y;
      } else if (y < 0.0) {
        c = std::isfinite(p.lower[i]) ? -y * std::abs(ax[i] - p.lower[i]) : -y;
      }
      r.complementarity = std::max(r.complementarity, c);
    }
  }
  r.dual = inf_norm(stat);
  return r;
}

bool QpSolver::try_polish(const QpProblem& p, const VecX& z, const VecX& y, QpSolution& out) const {
  const int d = p.dim();
  const int me = p.num_eq();
  const int m = static_cast<int>(l_.size());
  std::vector<int> rows;
  std::vector<double> rhs;
  for (int i = 0; i < m; ++i) {
    if (i < me) {
      rows.push_back(i);
      rhs.push_back(l_[i]);
    } else if (std::isfinite(l_[i]) && z[i] - l_[i] < -y[i]) {
      rows.push_back(i);
      rhs.push_back(l_[i]);
    } else if (std::isfinite(u_[i]) && u_[i] - z[i] < y[i]) {
      rows.push_back(i);
      rhs.push_back(u_[i]);
    }
  }
  const int na = static_cast<int>(rows.size());
  const double delta = 1e-11;
  MatX K = MatX::Zero(d + na, d + na);
  K.topLeftCorner(d, d) = p.H;
  for (int a = 0; a < na; ++a) {
    K.block(d + a, 0, 1, d) = A_.row(rows[a]);
    K.block(0, d + a, d, 1) = A_.row(rows[a]).transpose();
  }
  MatX K_reg = K;
  K_reg.topLeftCorner(d, d).diagonal().array() += delta;
  K_reg.bottomRightCorner(na, na).diagonal().array() -= delta;
  VecX b(d + na);
  b.head(d) = -p.g;
  for (int a = 0; a < na; ++a) b[d + a] = rhs[a];
  Eigen::PartialPivLU<MatX> lu(K_reg);
  VecX sol = lu.solve(b);
  for (int refine = 0; refine < 5; ++refine) sol += lu.solve(b - K * sol);
  if (!sol.allFinite()) return false;

  VecX x = sol.head(d);
  VecX y_full = VecX::Zero(m);
  for (int a = 0; a < na; ++a) y_full[rows[a]] = sol[d + a];
  const VecX y_eq = y_full.head(me);
  const VecX y_in = y_full.tail(m - me);
  const KktResiduals r = kkt_residuals(p, x, y_eq, y_in);
  const double tol = settings_.eps_abs;
  if (r.primal > tol || r.dual > tol || r.complementarity > tol) return false;
  out.x = x;
  out.y_eq = y_eq;
  out.y_in = y_in;
  out.primal_residual = r.primal;
  out.dual_residual = r.dual;
  out.complementarity = r.complementarity;
  out.status = QpStatus::kOptimal;
  out.polished = true;
  return true;
}

QpSolution QpSolver::solve(const QpProblem& p) {
  p.validate();
  const int d = p.dim();
  const int me = p.num_eq();
  const int mi = p.num_in();
  const int m = me + mi;
  const QpSettings& s = settings_;

  A_.resize(m, d);
  if (me) A_.topRows(me) = p.A_eq;
  if (mi) A_.bottomRows(mi) = p.A_in;
  l_.resize(m);
  u_.resize(m);
  l_ << p.b_eq, p.lower;
  u_ << p.b_eq, p.upper;

  MatX P = p.H;
  if (Eigen::LLT<MatX>(P).info() != Eigen::Success) P.diagonal().array() += s.regularization;

  auto row_rho = [&](int i, double rho) {
    if (l_[i] == u_[i]) return rho * 1e3;
    if (!std::isfinite(l_[i]) && !std::isfinite(u_[i])) return 1e-6;
    return rho;
  };
  double rho = s.rho;
  rho_.resize(m);
  for (int i = 0; i < m; ++i) rho_[i] = row_rho(i, rho);

  VecX x = p.warm_x.value_or(VecX::Zero(d));
  VecX y = VecX::Zero(m);
  if (p.warm_y_eq && p.warm_y_eq->size() == me) y.head(me) = *p.warm_y_eq;
  if (p.warm_y_in && p.warm_y_in->size() == mi) y.tail(mi) = *p.warm_y_in;
  VecX z = clip(A_ * x, l_, u_);

  QpSolution out;
  out.x = x;
  out.y_eq = y.head(me);
  out.y_in = y.tail(mi);

  if (s.polish && p.warm_x && try_polish(p, z, y, out)) {
    out.iterations = 0;
    return out;
  }

  auto factor = [&] {
    MatX K = P;
    K.diagonal().array() += s.sigma;
    K.noalias() += A_.transpose() * rho_.asDiagonal() * A_;
    return Eigen::LLT<MatX>(K);
  };
  Eigen::LLT<MatX> llt = factor();

  int last_polish = -1000;
  for (int it = 1; it <= s.max_iterations; ++it) {
    const VecX rhs = s.sigma * x - p.g + A_.transpose() * (rho_.cwiseProduct(z) - y);
    const VecX xt = llt.solve(rhs);
    const VecX zt = A_ * xt;
    const VecX x_new = s.alpha * xt + (1.0 - s.alpha) * x;
    const VecX zr = s.alpha * zt + (1.0 - s.alpha) * z;
    const VecX z_new = clip(zr + y.cwiseQuotient(rho_), l_, u_);
    const VecX y_new = y + rho_.cwiseProduct(zr - z_new);
    const VecX dy = y_new - y;
    x = x_new;
    z = z_new;
    y = y_new;
    out.iterations = it;

    const VecX Ax = A_ * x;
    const VecX Px = P * x;
    const VecX Aty = A_.transpose() * y;
    const double r_p = m ? inf_norm(Ax - z) : 0.0;
    const double r_d = inf_norm(Px + p.g + Aty);

    // primal infeasibility certificate
    const double dy_norm = inf_norm(dy);
    if (m && dy_norm > 1e-10) {
      double support = 0.0;
      for (int i = 0; i < m; ++i) {
        if (dy[i] > 0.0) support += std::isfinite(u_[i]) ? u_[i] * dy[i] : kInf;
        else if (dy[i] < 0.0) support += std::isfinite(l_[i]) ? l_[i] * dy[i] : kInf;
      }
      if (inf_norm(A_.transpose() * dy) <= s.eps_primal_infeasible * dy_norm &&
          support < -s.eps_primal_infeasible * dy_norm) {
        out.status = QpStatus::kPrimalInfeasible;
        out.x = x;
        out.y_eq = dy.head(me) / dy_norm;
        out.y_in = dy.tail(mi) / dy_norm;
        out.primal_residual = r_p;
        out.dual_residual = r_d;
        return out;
      }
    }

    const double prim_scale = std::max({1.0, inf_norm(Ax), inf_norm(z)});
    const double dual_scale = std::max({1.0, inf_norm(Px), inf_norm(Aty), inf_norm(p.g)});
    const bool converged = r_p <= s.eps_abs && r_d <= s.eps_abs;
    const bool close = r_p <= 1e-3 * prim_scale && r_d <= 1e-3 * dual_scale;
    if (s.polish && (converged || (close && it - last_polish >= 10))) {
      last_polish = it;
      if (try_polish(p, z, y, out)) return out;
    }
    if (converged) {
      const KktResiduals r = kkt_residuals(p, x, y.head(me), y.tail(mi));
      if (r.primal <= s.eps_abs && r.dual <= s.eps_abs && r.complementarity <= s.eps_abs) {
        out.x = x;
        out.y_eq = y.head(me);
        out.y_in = y.tail(mi);
        out.status = QpStatus::kOptimal;
        out.primal_residual = r.primal;
        out.dual_residual = r.dual;
        out.complementarity = r.complementarity;
        return out;
      }
    }

    if (s.adaptive_rho && m && it % s.adaptive_rho_interval == 0) {
      const double ratio = std::sqrt((r_p / prim_scale + 1e-30) / (r_d / dual_scale + 1e-30));
      const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
      if (new_rho > 5.0 * rho || new_rho < 0.2 * rho) {
        rho = new_rho;
        for (int i = 0; i < m; ++i) rho_[i] = row_rho(i, rho);
        llt = factor();
      }
    }
  }

  const KktResiduals r = kkt_residuals(p, x, y.head(me), y.tail(mi));
  out.x = x;
  out.y_eq = y.head(me);
  out.y_in = y.tail(mi);
  out.status = QpStatus::kMaxIterations;
  out.primal_residual = r.primal;
  out.dual_residual = r.dual;
  out.complementarity = r.complementarity;
  return out;
}

void write_problem(std::ostream& os, const QpProblem& p) {
  auto block = [&](const std::string& name, const MatX& M) {
    os << "% " << name << "\n%%MatrixMarket matrix array real general\n" << M.rows() << ' ' << M.cols() << '\n';
    for (int c = 0; c < M.cols(); ++c) {
      for (int r = 0; r < M.rows(); ++r) os << M(r, c) << '\n';
    }
  };
  os << std::setprecision(17);
  block("H", p.H);
  block("g", p.g);
  block("A_eq", p.A_eq);
  block("b_eq", p.b_eq);
  block("A_in", p.A_in);
  block("lower", p.lower);
  block("upper", p.upper);
}

}  // namespace wbc
