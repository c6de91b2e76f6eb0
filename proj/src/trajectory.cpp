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

#include "wbc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wbc {

TrajectoryPoint sinusoid(double amplitude_pp, double frequency, double t, double offset) {
  const double a = 0.5 * amplitude_pp;
  const double w = 2.0 * std::numbers::pi * frequency;
  return {offset + a * std::sin(w * t), a * w * std::cos(w * t), -a * w * w * std::sin(w * t)};
}

const char* to_string(PolynomialOrder order) {
  return order == PolynomialOrder::kQuintic ? "quintic" : "sixth";
}

PolynomialOrder polynomial_order_from_string(const std::string& name) {
  if (name == "sixth") return PolynomialOrder::kSixthMinJerk;
  if (name == "quintic") return PolynomialOrder::kQuintic;
  throw Error("unknown polynomial order '" + name + "' (expected sixth or quintic)");
}

namespace {

// Row k of the boundary matrix: d^k/ds^k of s^i at s, scaled to unit time.
double derivative_of_power(int i, int k, double s) {
  if (k > i) return 0.0;
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= i - j;
  return f * std::pow(s, i - k);
}

}  // namespace

PolynomialTrajectory PolynomialTrajectory::fit(const TrajectoryPoint& start, const TrajectoryPoint& end,
                                               double duration, PolynomialOrder order) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw Error("polynomial duration must be positive");
  // Solve in normalized time s = t / T where derivatives scale by T^k.
  const double T = duration;
  const int nc = order == PolynomialOrder::kQuintic ? 6 : 7;
  MatX B(6, nc);
  VecX r(6);
  const double bs[3] = {start.pos, start.vel * T, start.acc * T * T};
  const double be[3] = {end.pos, end.vel * T, end.acc * T * T};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < nc; ++i) {
      B(k, i) = derivative_of_power(i, k, 0.0);
      B(3 + k, i) = derivative_of_power(i, k, 1.0);
    }
    r[k] = bs[k];
    r[3 + k] = be[k];
  }
  VecX a;
  if (nc == 6) {
    a = B.fullPivLu().solve(r);
  } else {
    // Jerk Gram matrix: G_ij = int_0^1 (s^i)''' (s^j)''' ds.
    MatX G = MatX::Zero(nc, nc);
    for (int i = 3; i < nc; ++i) {
      for (int j = 3; j < nc; ++j) {
        const double fi = i * (i - 1) * (i - 2), fj = j * (j - 1) * (j - 2);
        G(i, j) = fi * fj / (i + j - 5);
      }
    }
    MatX K = MatX::Zero(nc + 6, nc + 6);
    K.topLeftCorner(nc, nc) = 2.0 * G;
    K.topRightCorner(nc, 6) = B.transpose();
    K.bottomLeftCorner(6, nc) = B;
    VecX rhs = VecX::Zero(nc + 6);
    rhs.tail(6) = r;
    a = K.fullPivLu().solve(rhs).head(nc);
  }
  PolynomialTrajectory p;
  p.duration_ = T;
  p.start_ = start;
  p.end_ = end;
  for (int i = 0; i < nc; ++i) p.c_[i] = a[i] / std::pow(T, i);
  return p;
}

TrajectoryPoint PolynomialTrajectory::evaluate(double t) const {
  if (t <= 0.0) return {c_[0], c_[1], 2.0 * c_[2]};
  const double tc = std::min(t, duration_);
  TrajectoryPoint out;
  for (int i = 6; i >= 0; --i) out.pos = out.pos * tc + c_[i];
  for (int i = 6; i >= 1; --i) out.vel = out.vel * tc + i * c_[i];
  for (int i = 6; i >= 2; --i) out.acc = out.acc * tc + i * (i - 1) * c_[i];
  if (t > duration_) {
    const double dt = t - duration_;
    out.pos += out.vel * dt + 0.5 * out.acc * dt * dt;
    out.vel += out.acc * dt;
  }
  return out;
}

double PolynomialTrajectory::boundary_residual() const {
  auto diff = [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
    return std::max({std::abs(a.pos - b.pos), std::abs(a.vel - b.vel), std::abs(a.acc - b.acc)});
  };
  // Evaluate the polynomial itself at the ends, not the clamped branches.
  TrajectoryPoint s{c_[0], c_[1], 2.0 * c_[2]};
  TrajectoryPoint e;
  for (int i = 6; i >= 0; --i) e.pos = e.pos * duration_ + c_[i];
  for (int i = 6; i >= 1; --i) e.vel = e.vel * duration_ + i * c_[i];
  for (int i = 6; i >= 2; --i) e.acc = e.acc * duration_ + i * (i - 1) * c_[i];
  return std::max(diff(s, start_), diff(e, end_));
}

double PolynomialTrajectory::jerk_cost() const {
  double cost = 0.0;
  for (int i = 3; i <= 6; ++i) {
    for (int j = 3; j <= 6; ++j) {
      const double fi = i * (i - 1) * (i - 2), fj = j * (j - 1) * (j - 2);
      cost += c_[i] * c_[j] * fi * fj * std::pow(duration_, i + j - 5) / (i + j - 5);
    }
  }
  return cost;
}

const char* to_string(JumpPhase phase) {
  switch (phase) {
    case JumpPhase::kStanceJump: return "stance_jump";
    case JumpPhase::kFlight: return "flight";
    case JumpPhase::kLanding: return "landing";
    case JumpPhase::kSettled: return "settled";
  }
  return "?";
}

void JumpConfig::validate() const {
  if (!(push_duration > 0.0) || !(landing_duration > 0.0)) throw Error("jump: phase durations must be positive");
  if (start_time < 0.0) throw Error("jump: start_time must be non-negative");
  if (!(gravity > 0.0)) throw Error("jump: gravity must be positive");
  if (thresholds.force < 0.0 || thresholds.foot_height < 0.0) throw Error("jump: thresholds must be non-negative");
}

JumpPhaseMachine::JumpPhaseMachine(const JumpConfig& config) : config_(config) {
  config_.validate();
  const double h0 = config_.standing_height;
  TrajectoryPoint end;
  if (config_.apex > config_.takeoff_height) {
    end = {h0 + config_.takeoff_height, std::sqrt(2.0 * config_.gravity * (config_.apex - config_.takeoff_height)),
           -config_.gravity};
  } else {
    end = {h0 + config_.apex, 0.0, 0.0};
  }
  push_ = PolynomialTrajectory::fit({h0, 0.0, 0.0}, end, config_.push_duration, config_.order);
}

JumpPhase JumpPhaseMachine::update(const JumpInputs& in) {
  const auto& th = config_.thresholds;
  const double max_force = in.leg_forces.empty() ? 0.0 : *std::max_element(in.leg_forces.begin(), in.leg_forces.end());
  const double min_foot =
      in.foot_heights.empty() ? 0.0 : *std::min_element(in.foot_heights.begin(), in.foot_heights.end());
  switch (phase_) {
    case JumpPhase::kStanceJump:
      if (in.time >= config_.start_time && in.com_height > config_.standing_height + th.height_margin &&
          in.com_velocity > 0.0 && max_force < th.force) {
        phase_ = JumpPhase::kFlight;
        liftoff_time_ = in.time;
      }
      break;
    case JumpPhase::kFlight:
      if (in.com_velocity < 0.0 && min_foot < th.foot_height && max_force > th.force) {
        const TrajectoryPoint flight = command(in.time, in.com_height, in.com_velocity);
        landing_ = PolynomialTrajectory::fit(flight, {config_.standing_height, 0.0, 0.0}, config_.landing_duration,
                                             config_.order);
        phase_ = JumpPhase::kLanding;
        touchdown_time_ = in.time;
        const TrajectoryPoint land = command(in.time, in.com_height, in.com_velocity);
        touchdown_jump_ = std::max(
            {std::abs(land.pos - flight.pos), std::abs(land.vel - flight.vel), std::abs(land.acc - flight.acc)});
      }
      break;
    case JumpPhase::kLanding:
      if (in.time - touchdown_time_ >= config_.landing_duration) {
        phase_ = JumpPhase::kSettled;
        settle_time_ = in.time;
      }
      break;
    case JumpPhase::kSettled:
      break;
  }
  return phase_;
}

TrajectoryPoint JumpPhaseMachine::command(double t, double measured_height, double measured_velocity) const {
  switch (phase_) {
    case JumpPhase::kStanceJump:
      return push_.evaluate(t - config_.start_time);
    case JumpPhase::kFlight:
      return {measured_height, measured_velocity, -config_.gravity};
    case JumpPhase::kLanding:
      return landing_.evaluate(t - touchdown_time_);
    case JumpPhase::kSettled:
      return {config_.standing_height, 0.0, 0.0};
  }
  return {};
}

}  // namespace wbc
