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

#include <chrono>
#include <cmath>

#include "wbc/builtin_models.hpp"
#include "wbc/sim.hpp"

namespace wbc {
namespace {

class SimTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model = RobotModel::load(default_biped_path());
    stance = standing_state(model, 0.5);
  }

  // Stiff joint PD around the stance posture: the robot behaves as a rigid
  // body resting on its soles.
  VecX hold_torque(const Plant& plant) const {
    const SystemState& s = plant.state();
    const int n = model.num_joints();
    return 2000.0 * (stance.joint_positions - s.joint_positions) - 20.0 * s.velocity.tail(n);
  }

  RobotModel model;
  SystemState stance;
};

TEST_F(SimTest, FreeFallHasNoGroundForce) {
  SystemState s = stance;
  s.base_position.z() += 1.0;
  PlantConfig cfg;
  Plant plant(model, cfg, s);
  const Vec3 c0 = Kinematics(model, s).com();
  const int steps = 1000;
  for (int k = 0; k < steps; ++k) {
    plant.step(VecX::Zero(model.num_joints()));
    for (const Vec6& w : plant.contact_wrenches()) EXPECT_EQ(w.norm(), 0.0);
  }
  const Kinematics kin(plant.model(), plant.state());
  EXPECT_NEAR(kin.com_velocity().z(), -9.81 * steps * cfg.dt, 1e-9);
  // Semi-implicit Euler: z_k = z_0 - g dt^2 k (k + 1) / 2.
  EXPECT_NEAR(kin.com().z(), c0.z() - 9.81 * cfg.dt * cfg.dt * steps * (steps + 1) / 2.0, 1e-9);
}

TEST_F(SimTest, StaticStanceCarriesTotalWeight) {
  PlantConfig cfg;
  cfg.disturbance.masses.push_back({"torso", 5.0, Vec3(0.0, 0.0, 0.1)});
  // Implicit joint damping settles the sway mode of the PD-held posture.
  cfg.disturbance.viscous = VecX::Constant(model.num_joints(), 200.0);
  Plant plant(model, cfg, stance);
  for (int k = 0; k < 30000; ++k) plant.step(hold_torque(plant));
  double fz = 0.0;
  for (const Vec6& w : plant.contact_wrenches()) fz += w[2];
  const double weight = (model.total_mass() + 5.0) * 9.81;
  EXPECT_NEAR(fz, weight, 1e-3 * weight);
  EXPECT_LT(plant.state().velocity.norm(), 1e-3);
}

TEST_F(SimTest, TangentialForceWithinFrictionCone) {
  PlantConfig cfg;
  cfg.ground.mu = 0.3;
  TimedWrench push;
  push.frame = "torso";
  push.wrench << 150.0, 40.0, 0.0, 0.0, 0.0, 0.0;
  push.start = 0.1;
  push.end = 0.4;
  cfg.disturbance.wrenches.push_back(push);
  Plant plant(model, cfg, stance);
  double worst = -1.0;
  for (int k = 0; k < 5000; ++k) {
    plant.step(hold_torque(plant));
    worst = std::max(worst, plant.max_friction_excess());
  }
  EXPECT_LE(worst, 1e-9);
  // The push exceeded the available friction, so the robot slid.
  EXPECT_GT(plant.state().base_position.x(), 0.01);
}

TEST_F(SimTest, ControllerModelUntouchedByAttachedMass) {
  const std::string before = model.to_json().dump();
  PlantConfig cfg;
  cfg.disturbance.masses.push_back({"torso", 5.0, Vec3::Zero()});
  Plant plant(model, cfg, stance);
  EXPECT_EQ(model.to_json().dump(), before);
  EXPECT_NEAR(plant.model().total_mass(), model.total_mass() + 5.0, 1e-12);
}

TEST_F(SimTest, SpringCraneSagsByWeightOverStiffness) {
  PlantConfig cfg;
  cfg.ground.enabled = false;
  cfg.crane.mode = CraneSpec::Mode::kSpring;
  cfg.crane.anchor.position = Vec3(0.0, 0.0, 1.5);
  cfg.disturbance.viscous = VecX::Constant(model.num_joints(), 2.0);
  SystemState s = SystemState::zero(model);
  s.base_position = cfg.crane.anchor.position;
  Plant plant(model, cfg, s);
  for (int k = 0; k < 30000; ++k) plant.step(VecX::Zero(model.num_joints()));
  const double sag = cfg.crane.anchor.position.z() - plant.state().base_position.z();
  EXPECT_NEAR(sag, crane_sag(model, cfg.crane), 0.02 * crane_sag(model, cfg.crane));
}

TEST_F(SimTest, WeldedCraneHoldsBaseExactly) {
  PlantConfig cfg;
  cfg.ground.enabled = false;
  cfg.crane.mode = CraneSpec::Mode::kWelded;
  cfg.crane.anchor.position = Vec3(0.0, 0.0, 1.5);
  Plant plant(model, cfg, SystemState::zero(model));
  for (int k = 0; k < 2000; ++k) plant.step(VecX::Constant(model.num_joints(), 1.0));
  EXPECT_EQ(plant.state().base_position, cfg.crane.anchor.position);
  EXPECT_EQ(plant.state().velocity.head<6>().norm(), 0.0);
  EXPECT_GT(plant.state().velocity.tail(model.num_joints()).norm(), 0.0);
}

TEST_F(SimTest, CraneOffMatchesDefaultPlant) {
  PlantConfig a;
  PlantConfig b;
  b.crane.mode = CraneSpec::Mode::kOff;
  b.crane.anchor.position = Vec3(5.0, 5.0, 5.0);
  Plant pa(model, a, stance), pb(model, b, stance);
  for (int k = 0; k < 500; ++k) {
    pa.step(hold_torque(pa));
    pb.step(hold_torque(pb));
  }
  EXPECT_EQ(pa.state().velocity, pb.state().velocity);
}

TEST_F(SimTest, NonFiniteStateAborts) {
  Plant plant(model, PlantConfig{}, stance);
  VecX tau = VecX::Zero(model.num_joints());
  tau[0] = std::nan("");
  EXPECT_THROW(plant.step(tau), SimulationError);
}

TEST_F(SimTest, IdealSensorReturnsPlantState) {
  Plant plant(model, PlantConfig{}, stance);
  Sensor sensor(SensorModel{}, 1);
  for (int k = 0; k < 20; ++k) plant.step(hold_torque(plant));
  const Measurement m = sensor.measure(plant);
  EXPECT_EQ(m.state.velocity, plant.state().velocity);
  EXPECT_EQ(m.state.joint_positions, plant.state().joint_positions);
  EXPECT_EQ(m.state.base_position, plant.state().base_position);
  EXPECT_EQ(m.contact_wrenches, plant.contact_wrenches());
}

TEST_F(SimTest, LegForceBiasShowsInReadings) {
  Plant plant(model, PlantConfig{}, stance);
  for (int k = 0; k < 20000; ++k) plant.step(hold_torque(plant));
  Sensor sensor(SensorModel{}, 1, {{"l_sole", 70.0}});
  const Measurement m = sensor.measure(plant);
  const auto& frames = plant.contact_frames();
  const int l = frames[0] == "l_sole" ? 0 : 1;
  const int r = 1 - l;
  EXPECT_NEAR(m.contact_wrenches[l][2] - m.contact_wrenches[r][2], 70.0, 1e-6);
}

TEST_F(SimTest, SeededSensorsAreReproducible) {
  SensorModel sm;
  sm.position_noise = 1e-3;
  sm.orientation_noise = 1e-3;
  sm.velocity_noise = 1e-2;
  sm.force_noise = 1.0;
  sm.velocity_filter = 0.3;
  Plant plant(model, PlantConfig{}, stance);
  Sensor a(sm, 42), b(sm, 42), c(sm, 43);
  for (int k = 0; k < 10; ++k) {
    plant.step(hold_torque(plant));
    const Measurement ma = a.measure(plant), mb = b.measure(plant), mc = c.measure(plant);
    EXPECT_EQ(ma.state.velocity, mb.state.velocity);
    EXPECT_EQ(ma.state.base_orientation.coeffs(), mb.state.base_orientation.coeffs());
    EXPECT_EQ(ma.contact_wrenches, mb.contact_wrenches);
    EXPECT_NE(ma.state.velocity, mc.state.velocity);
  }
}

TEST_F(SimTest, DelayReturnsOlderSample) {
  SensorModel sm;
  sm.delay_ticks = 3;
  Plant plant(model, PlantConfig{}, stance);
  Sensor sensor(sm, 0);
  std::vector<VecX> history;
  for (int k = 0; k < 10; ++k) {
    plant.step(hold_torque(plant));
    history.push_back(plant.state().velocity);
    const Measurement m = sensor.measure(plant);
    EXPECT_EQ(m.state.velocity, history[std::max(0, k - 3)]);
  }
}

TEST(SensorModelValidation, RejectsBadFilter) {
  SensorModel sm;
  sm.velocity_filter = 1.5;
  EXPECT_THROW(sm.validate(), Error);
  sm.velocity_filter = 0.5;
  sm.delay_ticks = -1;
  EXPECT_THROW(sm.validate(), Error);
}

}  // namespace
}  // namespace wbc
