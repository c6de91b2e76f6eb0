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

#include "wbc/model_check.hpp"

#include <cmath>
#include <random>

#include "wbc/builtin_models.hpp"
#include "wbc/dynamics.hpp"
#include "wbc/spatial.hpp"

namespace wbc {

namespace {

// Classical RK4 with configuration updates through the manifold displacement.
SystemState rk4_step(const RobotModel& model, const SystemState& s, const VecX& tau, double h) {
  auto stage = [&](const VecX& dq, const VecX& v, double c) {
    SystemState x = displace(s, dq, c);
    x.velocity = v;
    return x;
  };
  const VecX v1 = s.velocity, a1 = forward_dynamics(model, s, tau);
  const VecX v2 = v1 + 0.5 * h * a1;
  const VecX a2 = forward_dynamics(model, stage(v1, v2, 0.5 * h), tau);
  const VecX v3 = v1 + 0.5 * h * a2;
  const VecX a3 = forward_dynamics(model, stage(v2, v3, 0.5 * h), tau);
  const VecX v4 = v1 + h * a3;
  const VecX a4 = forward_dynamics(model, stage(v3, v4, h), tau);
  SystemState out = displace(s, (v1 + 2 * v2 + 2 * v3 + v4) / 6.0, h);
  out.velocity = v1 + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
  return out;
}

PropertyCheck make(const std::string& name, double value, double tol) { return {name, value, tol, value <= tol}; }

}  // namespace

std::vector<PropertyCheck> check_model(const RobotModel& model, const ModelCheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::vector<SystemState> states;
  for (int i = 0; i < o.samples; ++i) states.push_back(random_state(model, rng));

  double sym = 0.0, skew = 0.0, grav = 0.0, jac = 0.0;
  const double eps = 1e-6;
  for (const auto& s : states) {
    const MatX M = mass_matrix(model, s);
    sym = std::max(sym, (M - M.transpose()).cwiseAbs().maxCoeff());

    const MatX Mdot =
        (mass_matrix(model, displace(s, s.velocity, eps)) - mass_matrix(model, displace(s, s.velocity, -eps))) /
        (2 * eps);
    const MatX N = Mdot - 2.0 * coriolis_matrix(model, s);
    skew = std::max(skew, (N + N.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, Mdot.cwiseAbs().maxCoeff()));

    const ComDynamics cd = com_dynamics(model, s);
    const VecX gp = cd.inverse_map.transpose() * gravity_vector(model, s);
    grav = std::max(grav, (gp - cd.gravity()).cwiseAbs().maxCoeff() / std::max(1.0, cd.gravity().norm()));

    for (const auto& f : model.frames()) {
      const Mat6X J = frame_jacobian(model, s, f.name);
      const Pose a = frame_pose(model, displace(s, s.velocity, -eps), f.name);
      const Pose b = frame_pose(model, displace(s, s.velocity, eps), f.name);
      Vec6 fd;
      fd << (b.position - a.position) / (2 * eps), so3_log(b.rotation * a.rotation.transpose()) / (2 * eps);
      const Vec6 an = J * s.velocity;
      jac = std::max(jac, (fd - an).norm() / std::max(1.0, an.norm()));
    }
  }

  // Passive free flight: total energy is conserved.
  SystemState s = states.front();
  s.velocity *= 0.5;
  auto energy = [&](const SystemState& x) {
    const Kinematics k(model, x);
    return k.kinetic_energy() + k.potential_energy();
  };
  const double e0 = energy(s);
  const double scale = std::max(Kinematics(model, s).kinetic_energy(), 1e-9);
  const VecX zero = VecX::Zero(model.num_joints());
  double drift = 0.0;
  const int steps = static_cast<int>(std::lround(o.energy_horizon / o.energy_dt));
  for (int i = 0; i < steps; ++i) {
    s = rk4_step(model, s, zero, o.energy_dt);
    drift = std::max(drift, std::abs(energy(s) - e0) / scale);
  }

  return {make("mass matrix symmetry", sym, 1e-10), make("Mdot - 2C skew symmetry", skew, 1e-6),
          make("CoM gravity special form", grav, 1e-9), make("passive energy drift (relative)", drift, 5e-3),
          make("frame Jacobian vs finite differences", jac, 1e-6)};
}

}  // namespace wbc
