#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "handover/effort.hpp"
#include "handover/errors.hpp"
#include "handover/random.hpp"

using namespace handover;

namespace {

const Vec3 kShoulder(0.1, 1.4, -0.2);

Scene setup(const std::string& name) {
  return load_scene(std::string(HANDOVER_DATA_DIR) + "/scenes/" + name + ".json");
}

}  // namespace

TEST(Arm, FullExtensionIsZeroAngles) {
  ArmModel arm;
  const auto c = solve_arm(arm, kShoulder, kShoulder + Vec3(arm.total_length(), 0, 0));
  for (double q : c.angles) EXPECT_NEAR(q, 0.0, 1e-6);
}

TEST(Arm, StraightDown) {
  ArmModel arm;
  const auto c = solve_arm(arm, kShoulder, kShoulder + Vec3(0, -arm.total_length(), 0));
  EXPECT_NEAR(c.angles[0], -std::numbers::pi / 2, 1e-6);
  EXPECT_NEAR(c.angles[1], 0.0, 1e-6);
  EXPECT_NEAR(c.angles[2], 0.0, 1e-6);
  const auto fk = forward_kinematics(arm, kShoulder, c);
  EXPECT_NEAR((fk[3] - (kShoulder + Vec3(0, -arm.total_length(), 0))).norm(), 0.0, 1e-6);
}

TEST(Arm, ForwardKinematicsRoundTrip) {
  ArmModel arm;
  Rng rng(11);
  int solved = 0, tried = 0;
  while (solved < 100 && tried < 1000) {
    ++tried;
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    dir.normalize();
    const Vec3 target = kShoulder + rng.uniform(0.25, arm.total_length()) * dir;
    try {
      const auto c = solve_arm(arm, kShoulder, target);
      const auto fk = forward_kinematics(arm, kShoulder, c);
      EXPECT_LT((fk[3] - target).norm(), 1e-6);
      ++solved;
    } catch (const LimitViolation&) {
    } catch (const Unreachable&) {
    }
  }
  EXPECT_EQ(solved, 100);
}

TEST(Arm, Errors) {
  ArmModel arm;
  EXPECT_THROW(solve_arm(arm, kShoulder, kShoulder + Vec3(1.0, 0, 0)), Unreachable);
  ArmModel tight = arm;
  tight.joint_limits[0] = {-0.1, 0.1};
  EXPECT_THROW(solve_arm(tight, kShoulder, kShoulder + Vec3(0, -0.7, 0)), LimitViolation);
  ArmModel bad = arm;
  bad.link_masses[1] = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Effort, HangingArmHasNoTorque) {
  ArmModel arm;
  const Vec3 down = kShoulder + Vec3(0, -arm.total_length(), 0);
  EXPECT_NEAR(joint_effort(arm, kShoulder, down, down), 0.0, 1e-9);
}

TEST(Effort, ZeroMotionEqualsStaticHold) {
  ArmModel arm;
  const Vec3 t = kShoulder + Vec3(0.4, -0.2, 0.1);
  const auto c = solve_arm(arm, kShoulder, t);
  const auto tau = gravity_torques(arm, c.angles);
  const double hold = std::abs(tau[0]) + std::abs(tau[1]) + std::abs(tau[2]);
  EXPECT_NEAR(joint_effort(arm, kShoulder, t, t), hold, 1e-12);
}

TEST(Effort, HorizontalArmTorqueByHand) {
  ArmModel arm;
  const auto tau = gravity_torques(arm, {0, 0, 0});
  const auto& l = arm.link_lengths;
  const auto& m = arm.link_masses;
  const double g = arm.gravity;
  const double shoulder = g * (m[0] * l[0] / 2 + m[1] * (l[0] + l[1] / 2) + m[2] * (l[0] + l[1] + l[2] / 2));
  const double wrist = g * m[2] * l[2] / 2;
  EXPECT_NEAR(tau[0], shoulder, 1e-12);
  EXPECT_NEAR(tau[2], wrist, 1e-12);
}

TEST(Effort, LinearInMass) {
  ArmModel arm;
  ArmModel heavy = arm;
  for (auto& m : heavy.link_masses) m *= 2.0;
  const Vec3 a = kShoulder + Vec3(0.3, -0.3, 0.1);
  const Vec3 b = kShoulder + Vec3(0.55, -0.1, -0.1);
  const double e1 = joint_effort(arm, kShoulder, a, b);
  const double e2 = joint_effort(heavy, kShoulder, a, b);
  EXPECT_NEAR(e2 / e1, 2.0, 1e-9);
}

TEST(Methods, ParseAndPrint) {
  for (auto m : kMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("a"), MethodId::MethodA);
  EXPECT_EQ(parse_method("OURS"), MethodId::Ours);
  EXPECT_THROW(parse_method("C"), ParseError);
}

TEST(Methods, BodyRelativeDistances) {
  Scene s = setup("setup_1");
  s.human.torso = Pose::at(0, 0, 0);
  s.robot_base = Pose::at(2, 0, 1);
  const Vec3 a = body_relative_point(s, kMethodADistance);
  const Vec3 b = body_relative_point(s, kMethodBDistance);
  EXPECT_NEAR(a.norm(), 0.75, 1e-9);
  EXPECT_NEAR(b.norm(), 0.50, 1e-9);
  EXPECT_NEAR(a.y(), 0.0, 1e-12);
  EXPECT_NEAR(a.x() / a.z(), 2.0, 1e-9);
}

TEST(Methods, DefaultTorsoBehindHand) {
  const Scene s = setup("setup_1");
  const Vec3 torso = torso_position(s);
  const Vec3 d = s.human.hand.position - torso;
  EXPECT_NEAR(d.norm(), 0.25, 1e-12);
  EXPECT_NEAR(d.y(), 0.0, 1e-12);
}

TEST(Methods, OursIsWithinReachOfHand) {
  const Scene s = setup("example");
  RadialBandReach reach;
  const Vec3 p = method_transfer_point(MethodId::Ours, s, reach, SamplerConfig{});
  EXPECT_LE((p - s.human.hand.position).norm(), kReachThreshold);
}

TEST(Compare, DeterministicSingleTrial) {
  const Scene s = setup("setup_2");
  RadialBandReach reach;
  EffortOptions opts;
  opts.trials = 1;
  const auto a = compare_methods(s, "s2", reach, opts);
  const auto b = compare_methods(s, "s2", reach, opts);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].effort_nm, b[i].effort_nm);
  opts.trials = 0;
  EXPECT_THROW(compare_methods(s, "s2", reach, opts), std::invalid_argument);
}

TEST(Compare, OrderingInEverySetup) {
  RadialBandReach reach;
  EffortOptions opts;
  for (const char* name : {"setup_1", "setup_2", "setup_3"}) {
    const auto samples = compare_methods(setup(name), name, reach, opts);
    ASSERT_EQ(samples.size(), 15u);
    const auto mean = mean_effort(samples, name);
    EXPECT_GT(mean[0], mean[1]) << name;
    EXPECT_GT(mean[1], mean[2]) << name;
  }
}

TEST(Compare, CsvHeader) {
  RadialBandReach reach;
  EffortOptions opts;
  opts.trials = 2;
  const auto csv = effort_csv(compare_methods(setup("setup_3"), "s3", reach, opts), OutputMeta{});
  EXPECT_EQ(csv.rfind("# schema_version=1 seed=42\nmethod,setup_id,trial,effort_nm\n", 0), 0u);
}
