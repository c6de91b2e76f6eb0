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

#include "wbc/analysis.hpp"

#include <cmath>

#include "wbc/builtin_models.hpp"
#include "wbc/dynamics.hpp"
#include "wbc/pb_wbc.hpp"

namespace wbc {

void OdeParams::validate() const {
  if (!(mass > 0.0)) throw Error("ode: mass must be positive");
  if (!(kp > 0.0)) throw Error("ode: kp must be positive");
  if (!(kd >= 0.0)) throw Error("ode: kd must be non-negative");
  if (!std::isfinite(tau_dist) || !std::isfinite(e0) || !std::isfinite(de0)) throw Error("ode: non-finite input");
}

double second_order_response(double a, double b, double c, double f, double e0, double de0, double t) {
  const double ess = -f / c;
  const double x0 = e0 - ess;
  const double alpha = -b / (2.0 * a);
  const double disc = b * b - 4.0 * a * c;
  // x(t) = x0 E(t) + (de0 - alpha x0) S(t) with E = e^{alpha t} cosh(beta t)
  // and S = e^{alpha t} sinh(beta t) / beta; beta is imaginary when
  // underdamped and the series branch covers the critical limit.
  double E, S;
  if (disc >= 0.0) {
    const double beta = std::sqrt(disc) / (2.0 * a);
    const double bt = beta * t;
    if (bt < 1e-4) {
      const double ea = std::exp(alpha * t);
      E = ea * (1.0 + bt * bt / 2.0);
      S = ea * t * (1.0 + bt * bt / 6.0);
    } else {
      const double ep = std::exp((alpha + beta) * t), em = std::exp((alpha - beta) * t);
      E = 0.5 * (ep + em);
      S = (ep - em) / (2.0 * beta);
    }
  } else {
    const double omega = std::sqrt(-disc) / (2.0 * a);
    const double wt = omega * t;
    const double ea = std::exp(alpha * t);
    E = ea * std::cos(wt);
    S = wt < 1e-4 ? ea * t * (1.0 - wt * wt / 6.0) : ea * std::sin(wt) / omega;
  }
  return ess + x0 * E + (de0 - alpha * x0) * S;
}

double ode_response_id(const OdeParams& p, double t) {
  p.validate();
  return second_order_response(1.0, p.kd, p.kp, p.tau_dist / p.mass, p.e0, p.de0, t);
}

double ode_response_pb(const OdeParams& p, double t) {
  p.validate();
  return second_order_response(p.mass, p.kd, p.kp, p.tau_dist, p.e0, p.de0, t);
}

double steady_state_error_id(const OdeParams& p) {
  p.validate();
  return -p.tau_dist / (p.mass * p.kp);
}

double steady_state_error_pb(const OdeParams& p) {
  p.validate();
  return -p.tau_dist / p.kp;
}

double estimate_disturbance(double steady_error, double kp, ControllerKind mode, std::optional<double> mass) {
  if (!(kp > 0.0)) throw Error("estimate_disturbance: kp must be positive");
  if (mode == ControllerKind::kPb) return steady_error * kp;
  if (!mass) throw Error("estimate_disturbance: ID mode needs the task inertia");
  if (!(*mass > 0.0)) throw Error("estimate_disturbance: mass must be positive");
  return steady_error * *mass * kp;
}

double translate_gains(double id_gain, double inertia) {
  if (!(inertia > 0.0)) throw Error("translate_gains: inertia must be positive");
  return id_gain * inertia;
}

Vec6 translate_gains(const Vec6& id_gains, const Vec6& inertia) {
  Vec6 out;
  for (int i = 0; i < 6; ++i) out[i] = translate_gains(id_gains[i], inertia[i]);
  return out;
}

Vec6 centroidal_task_inertia(const RobotModel& model, const SystemState& state) {
  const ComDynamics com = com_dynamics(model, state);
  return com.mass.topLeftCorner<6, 6>().diagonal();
}

namespace {

struct StanceStack {
  ComDynamics com;
  MatX J;
};

StanceStack stance_stack(const RobotModel& model, const SystemState& state, const std::vector<std::string>& contacts) {
  PbTaskStack stack;
  stack.contacts.frames = contacts;
  return {com_dynamics(model, state), stack_jacobian(model, state, stack).J};
}

}  // namespace

Mat6 stance_task_inertia(const RobotModel& model, const SystemState& state, const std::vector<std::string>& contacts) {
  const StanceStack s = stance_stack(model, state, contacts);
  const Eigen::PartialPivLU<MatX> lu(s.J);
  // Columns 0..5 of J^-1 span the centroidal directions.
  const MatX N = lu.solve(MatX::Identity(s.J.rows(), 6));
  return N.transpose() * s.com.mass * N;
}

Vec6 stance_task_wrench(const RobotModel& model, const SystemState& state, const std::vector<std::string>& contacts,
                        const VecX& generalized_force) {
  const StanceStack s = stance_stack(model, state, contacts);
  // Generalized force in CoM coordinates, then onto the stack rows.
  const VecX gp = s.com.inverse_map.transpose() * generalized_force;
  const VecX w = s.J.transpose().partialPivLu().solve(gp);
  return w.head<6>();
}

Vec6 predicted_stance_error(ControllerKind mode, const Mat6& inertia, const Vec6& wrench, const Vec6& kp) {
  const Vec6 force = mode == ControllerKind::kId ? Vec6(inertia.ldlt().solve(wrench)) : wrench;
  return -force.cwiseQuotient(kp);
}

SystemState crouch_for_com_height(const RobotModel& biped, double com_height) {
  auto height = [&](double bend) { return Kinematics(biped, standing_state(biped, bend)).com().z(); };
  double lo = 0.0, hi = 1.4;
  if (com_height > height(lo) || com_height < height(hi)) throw Error("crouch_for_com_height: height out of range");
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (height(mid) > com_height ? lo : hi) = mid;
  }
  return standing_state(biped, 0.5 * (lo + hi));
}

const ChannelMetrics& RunMetrics::channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c;
  }
  throw Error("metrics have no channel '" + name + "'");
}

namespace {

int nearest_row(const ScenarioLog& log, double t) {
  // Rows are uniformly spaced in time.
  const double dt = log.rows.size() > 1 ? log.rows[1].t - log.rows[0].t : 1.0;
  const long k = std::lround((t - log.rows.front().t) / dt);
  return static_cast<int>(std::clamp<long>(k, 0, static_cast<long>(log.rows.size()) - 1));
}

}  // namespace

RunMetrics compute_metrics(const ScenarioLog& log, const MetricsWindow& window) {
  if (log.rows.empty()) throw Error("compute_metrics: empty log");
  if (!(window.fraction > 0.0 && window.fraction <= 1.0)) throw Error("compute_metrics: fraction must be in (0, 1]");
  RunMetrics m;
  const double t_end = log.rows.back().t;
  std::vector<int> samples;
  int first = 0;
  if (log.period > 0.0) {
    const double t0 = log.reference_start + window.skip_periods * log.period;
    for (int k = window.skip_periods;; ++k) {
      const double tp = log.reference_start + (k + 0.25) * log.period;
      if (tp > t_end) break;
      samples.push_back(nearest_row(log, tp));
    }
    first = nearest_row(log, t0);
    m.window_start = log.rows[first].t;
  } else {
    first = static_cast<int>(std::floor((1.0 - window.fraction) * (log.rows.size() - 1)));
    for (int i = first; i < static_cast<int>(log.rows.size()); ++i) samples.push_back(i);
    m.window_start = log.rows[first].t;
  }
  m.window_end = t_end;
  m.samples = static_cast<int>(samples.size());

  for (std::size_t c = 0; c < log.channels.size(); ++c) {
    ChannelMetrics cm;
    cm.name = log.channels[c];
    double sum = 0.0, sq = 0.0;
    for (int i : samples) sum += log.rows[i].ref[c] - log.rows[i].meas[c];
    cm.steady_state_error = samples.empty() ? 0.0 : sum / samples.size();
    int count = 0;
    for (std::size_t i = first; i < log.rows.size(); ++i) {
      const double e = log.rows[i].ref[c] - log.rows[i].meas[c];
      sq += e * e;
      ++count;
      cm.overshoot = std::max(cm.overshoot, -e);
      cm.undershoot = std::max(cm.undershoot, e);
    }
    cm.rms = count ? std::sqrt(sq / count) : 0.0;
    m.channels.push_back(cm);
  }

  for (const auto& row : log.rows) {
    for (std::size_t g = 0; g < log.grf_names.size(); ++g) {
      if (log.grf_names[g].size() > 3 && log.grf_names[g].ends_with("_fz")) m.peak_grf = std::max(m.peak_grf, row.grf[g]);
    }
    bool violated = row.friction_excess > 1e-6;
    for (int k = 0; k < row.tau.size() && k < log.effort.size(); ++k) {
      if (std::abs(row.tau[k]) > log.effort[k] * (1.0 + 1e-9)) violated = true;
    }
    if (violated) ++m.constraint_violations;
    if (row.status != QpStatus::kOptimal) ++m.qp_failures;
  }
  return m;
}

double rms_difference(const ScenarioLog& a, const ScenarioLog& b, const std::string& channel, double t0, double t1) {
  const int ca = a.channel(channel), cb = b.channel(channel);
  double sq = 0.0;
  int n = 0;
  const std::size_t rows = std::min(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (a.rows[i].t < t0 || a.rows[i].t > t1) continue;
    if (std::abs(a.rows[i].t - b.rows[i].t) > 1e-9) throw Error("rms_difference: logs are not aligned in time");
    const double d = a.rows[i].meas[ca] - b.rows[i].meas[cb];
    sq += d * d;
    ++n;
  }
  if (!n) throw Error("rms_difference: empty window");
  return std::sqrt(sq / n);
}

}  // namespace wbc
