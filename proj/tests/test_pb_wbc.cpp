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
#include <random>

#include "wbc/builtin_models.hpp"
#include "wbc/pb_wbc.hpp"
#include "wbc/spatial.hpp"

namespace wbc {
namespace {

TaskSpec hold(const Kinematics& kin, const std::string& frame, double kp, double kd) {
  TaskSpec t{frame, frame};
  const TaskKinematics tk = task_kinematics(kin, frame);
  t.ref_position = tk.position;
  t.ref_rotation = tk.rotation;
  t.kp.setConstant(kp);
  t.kd.setConstant(kd);
  return t;
}

class PbWbcTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model = RobotModel::load(default_biped_path());
    state = standing_state(model, 0.6);
  }

  PbTaskStack standing_stack(const SystemState& s) const {
    const Kinematics kin(model, s);
    PbTaskStack stack;
    stack.centroidal = hold(kin, kComTask, 6000.0, 1000.0);
    stack.contacts.frames = {"l_sole", "r_sole"};
    stack.contacts.mu = 0.7;
    stack.contacts.cop_box = footprint_half_extents(model.frame("l_sole"));
    return stack;
  }

  RobotModel model;
  SystemState state;
};

TEST_F(PbWbcTest, StackHasIdentityCentroidalBlock) {
  const StackJacobian sj = stack_jacobian(model, state, standing_stack(state));
  ASSERT_EQ(sj.J.rows(), model.nv());
  EXPECT_EQ(sj.J.topLeftCorner(6, 6), MatX::Identity(6, 6));
  EXPECT_EQ(sj.J.topRightCorner(6, model.num_joints()), MatX::Zero(6, model.num_joints()));
  EXPECT_LT(sj.condition, 1e6);
}

TEST(PbWbc, SingleBodyStackIsIdentity) {
  RobotModel body;
  Link l;
  l.name = "body";
  l.mass = 3.0;
  l.inertia = Vec3(0.1, 0.2, 0.3).asDiagonal();
  body.set_base(l);
  body.finalize();
  SystemState s = SystemState::zero(body);
  s.velocity << 0.1, -0.2, 0.3, 0.4, 0.5, -0.6;
  PbTaskStack stack;
  const StackJacobian sj = stack_jacobian(body, s, stack);
  EXPECT_EQ(sj.J, MatX::Identity(6, 6));
  const VecX xd = (VecX(6) << 1, 2, 3, 4, 5, 6).finished();
  const DesiredMotion dm = desired_generalized_motion(sj, xd, VecX::Zero(6));
  EXPECT_EQ(dm.velocity, xd);
}

TEST_F(PbWbcTest, StackVelocityMatchesFrameVelocities) {
  std::mt19937_64 rng(17);
  PbTaskStack stack = standing_stack(state);
  stack.contacts.frames = {"l_sole"};
  const Kinematics kin0(model, state);
  stack.impedance = {hold(kin0, "r_sole", 100.0, 10.0)};
  for (int trial = 0; trial < 100; ++trial) {
    const SystemState s = random_state(model, rng);
    const Kinematics kin(model, s);
    const ComDynamics com = com_dynamics(kin, compute_dynamics(kin));
    const StackJacobian sj = stack_jacobian(kin, com, stack);
    const VecX xd = sj.J * com.velocity;
    const TaskKinematics tc = task_kinematics(kin, kComTask);
    EXPECT_LE((xd.head<6>() - tc.velocity).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((xd.segment<6>(6) - kin.frame_velocity("l_sole")).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((xd.segment<6>(12) - kin.frame_velocity("r_sole")).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_F(PbWbcTest, StackDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(23);
  PbTaskStack stack = standing_stack(state);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemState s = random_state(model, rng);
    const double eps = 1e-6;
    const StackJacobian a = stack_jacobian(model, displace(s, s.velocity, -eps), stack);
    const StackJacobian b = stack_jacobian(model, displace(s, s.velocity, eps), stack);
    const StackJacobian c = stack_jacobian(model, s, stack);
    const MatX fd = (b.J - a.J) / (2.0 * eps);
    EXPECT_LE((fd - c.J_dot).cwiseAbs().maxCoeff(), 1e-4) << "trial " << trial;
  }
}

TEST_F(PbWbcTest, DesiredMotionSolvesStack) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PbTaskStack stack = standing_stack(state);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemState s = random_state(model, rng);
    const StackJacobian sj = stack_jacobian(model, s, stack);
    VecX xd(model.nv()), xdd(model.nv());
    for (int i = 0; i < model.nv(); ++i) {
      xd[i] = u(rng);
      xdd[i] = u(rng);
    }
    const DesiredMotion dm = desired_generalized_motion(sj, xd, xdd);
    EXPECT_LE((sj.J * dm.velocity - xd).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((sj.J * dm.acceleration + sj.J_dot * dm.velocity - xdd).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST_F(PbWbcTest, StationaryReferencesGiveZeroMotion) {
  const PbTaskStack stack = standing_stack(state);
  VecX xd, xdd;
  stack_references(stack, Vec6::Zero(), model.gravity(), xd, xdd);
  const DesiredMotion dm = desired_generalized_motion(stack_jacobian(model, state, stack), xd, xdd);
  EXPECT_EQ(dm.velocity.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(dm.acceleration.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(PbWbcTest, FlightFollowsMeasuredCentroidalVelocity) {
  PbTaskStack stack = standing_stack(state);
  stack.track_centroidal = false;
  const Vec6 measured = (Vec6() << 0.1, 0.0, 0.5, 0.0, 0.2, 0.0).finished();
  VecX xd, xdd;
  stack_references(stack, measured, model.gravity(), xd, xdd);
  EXPECT_EQ(xd.head<6>(), measured);
  EXPECT_EQ(xdd.head<3>(), model.gravity());
}

TEST_F(PbWbcTest, SymmetricStandingSplitsWeight) {
  PbController controller;
  const PbOutput out = controller.tick(model, state, standing_stack(state), PbPhase::kStance);
  ASSERT_EQ(out.status, QpStatus::kOptimal);
  const double half = 0.5 * model.total_mass() * 9.81;
  EXPECT_NEAR(out.grf[2], half, 1e-4);
  EXPECT_NEAR(out.grf[8], half, 1e-4);
  EXPECT_LE(out.delta_c.cwiseAbs().maxCoeff(), 1e-4);
}

TEST_F(PbWbcTest, LateralGrfWeightActsAsDamping) {
  // A lateral impedance wrench must be carried by lateral GRF; the Q_f term
  // shrinks the lateral force relative to an unweighted solve.
  SystemState s = state;
  PbTaskStack stack = standing_stack(s);
  stack.centroidal.ref_position.x() += 0.01;
  stack.qf << 1e-5, 1e-5, 1e-8, 1e-8, 1e-8, 1e-8;
  PbController a;
  const PbOutput damped = a.tick(model, s, stack, PbPhase::kStance);
  stack.qf << 1e-8, 1e-8, 1e-8, 1e-8, 1e-8, 1e-8;
  PbController b;
  const PbOutput plain = b.tick(model, s, stack, PbPhase::kStance);
  ASSERT_EQ(damped.status, QpStatus::kOptimal);
  ASSERT_EQ(plain.status, QpStatus::kOptimal);
  EXPECT_LT(std::abs(damped.grf[0] + damped.grf[6]), std::abs(plain.grf[0] + plain.grf[6]));
}

TEST_F(PbWbcTest, LandingDampingMatchesHandComputedTorque) {
  SystemState s = state;
  PbTaskStack stack = standing_stack(s);
  stack.landing_damping << 20, 20, 30, 0, 0, 0;
  const Kinematics kin(model, s);
  const ComDynamics com = com_dynamics(kin, compute_dynamics(kin));
  const StackJacobian sj = stack_jacobian(kin, com, stack);
  DesiredMotion dm{VecX::Zero(model.nv()), VecX::Zero(model.nv())};
  const VecX f_grf = VecX::Zero(12);
  VecX xd_grf = VecX::Zero(12);
  xd_grf[0] = 0.1;  // left foot sliding forward
  const VecX base = compute_torque(com.mass, com.coriolis, sj, dm, f_grf, VecX(), PbPhase::kStance,
                                   stack.landing_damping, xd_grf);
  const VecX landing = compute_torque(com.mass, com.coriolis, sj, dm, f_grf, VecX(), PbPhase::kLanding,
                                      stack.landing_damping, xd_grf);
  VecX force = VecX::Zero(12);
  force[0] = 2.0;
  const VecX expected = -sj.J.block(6, 6, 12, model.num_joints()).transpose() * force;
  EXPECT_LE((landing - base - expected).cwiseAbs().maxCoeff(), 1e-12);
  for (PbPhase p : {PbPhase::kJump, PbPhase::kFlight}) {
    const VecX without = compute_torque(com.mass, com.coriolis, sj, dm, f_grf, VecX(), p, Vec6::Zero(), xd_grf);
    const VecX with = compute_torque(com.mass, com.coriolis, sj, dm, f_grf, VecX(), p, stack.landing_damping, xd_grf);
    EXPECT_EQ(with, without);
  }
}

TEST_F(PbWbcTest, FixedBaseHoldIsGravityCompensation) {
  const Kinematics kin(model, state);
  PbTaskStack stack;
  stack.fixed_base = true;
  stack.impedance = {hold(kin, "l_sole", 500.0, 20.0), hold(kin, "r_sole", 500.0, 20.0)};
  PbController controller;
  const PbOutput out = controller.tick(model, state, stack, PbPhase::kStance);
  EXPECT_LE((out.tau - gravity_vector(model, state).tail(model.num_joints())).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(PbWbcTest, ImpedanceWrenchOpposesError) {
  const Kinematics kin(model, state);
  TaskSpec t = hold(kin, "l_sole", 100.0, 10.0);
  t.ref_position.x() += 0.1;
  const Vec6 w = impedance_wrench(t, task_kinematics(kin, "l_sole"));
  EXPECT_NEAR(w[0], -10.0, 1e-12);
}

TEST_F(PbWbcTest, RejectsNonSquareStack) {
  PbTaskStack stack = standing_stack(state);
  stack.contacts.frames = {"l_sole"};
  EXPECT_THROW(stack_jacobian(model, state, stack), Error);
}

}  // namespace
}  // namespace wbc
