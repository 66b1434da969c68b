#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "handover/costs.hpp"
#include "handover/errors.hpp"
#include "handover/random.hpp"

using namespace handover;

namespace {

HumanState human_at(const Vec3& hand, const Vec3& face) {
  HumanState h;
  h.hand = Pose(hand);
  h.face = Pose(face);
  return h;
}

ObjectModel bar() {
  ObjectModel o;
  o.id = "bar";
  o.grasps = {{"h0", Pose::at(0, 0, 0), true},
              {"h1", Pose::at(0.02, 0, 0), true},
              {"r0", Pose::at(0.08, 0, 0), false},
              {"r1", Pose::at(-0.05, 0, 0), false}};
  return o;
}

// coordinates on a 1/1024 grid so sums and differences are exact
double grid(Rng& rng, double lo, double hi) {
  return std::round(rng.uniform(lo, hi) * 1024.0) / 1024.0;
}

Vec3 grid_vec(Rng& rng, double lo, double hi) {
  return Vec3(grid(rng, lo, hi), grid(rng, lo, hi), grid(rng, lo, hi));
}

}  // namespace

TEST(Appropriateness, ClosestHumanGrasp) {
  const auto o = bar();
  EXPECT_DOUBLE_EQ(appropriateness(o.grasps[2], o), 0.06);
  EXPECT_DOUBLE_EQ(appropriateness(o.grasps[3], o), 0.05);
}

TEST(Appropriateness, NoHumanGraspThrows) {
  auto o = bar();
  for (auto& g : o.grasps) g.in_affordance = false;
  EXPECT_THROW(appropriateness(o.grasps[0], o), NoHumanGrasp);
}

TEST(Safety, ZeroStrictlyBelowThreshold) {
  const auto h = human_at(Vec3(0, 0, 0), Vec3(0, 1, 0));
  const Pose ee = Pose::at(0, 0, 1);
  // exactly at the threshold still counts
  const Pose at = Pose::at(kSafetyThreshold, 0, 0);
  EXPECT_GT(safety(at, ee, h), 0.0);
  const Pose below = Pose::at(std::nextafter(kSafetyThreshold, 0.0), 0, 0);
  EXPECT_EQ(safety(below, ee, h), 0.0);
  const Pose near_face = Pose::at(0, 1 - 0.049, 0);
  EXPECT_EQ(safety(near_face, ee, h), 0.0);
  const Pose obj = Pose::at(0.5, 0.5, 0);
  EXPECT_EQ(safety(obj, Pose::at(0.01, 0, 0), h), 0.0);
}

TEST(Safety, SumOfComponentsWhenSafe) {
  const auto h = human_at(Vec3(0, 0, 0), Vec3(0, 1, 0));
  const Pose obj = Pose::at(0, 0.5, 0);
  const Pose ee = Pose::at(0, 0, 0.25);
  const auto d = safety_distances(obj, ee, h);
  EXPECT_DOUBLE_EQ(d.obj_to_hand, 0.5);
  EXPECT_DOUBLE_EQ(d.obj_to_face, 0.5);
  EXPECT_DOUBLE_EQ(d.ee_to_hand, 0.25);
  EXPECT_DOUBLE_EQ(safety(obj, ee, h), 1.25);
}

TEST(Reachability, InfiniteStrictlyAboveThreshold) {
  const Pose hand = Pose::at(0, 0, 0);
  EXPECT_DOUBLE_EQ(reachability(hand, Pose::at(kReachThreshold, 0, 0)), kReachThreshold);
  EXPECT_TRUE(std::isinf(reachability(hand, Pose::at(std::nextafter(kReachThreshold, 1.0), 0, 0))));
  EXPECT_DOUBLE_EQ(reachability(hand, Pose::at(0, 0.3, 0.4)), 0.5);
}

TEST(Costs, TranslationInvarianceExact) {
  Rng rng(7);
  const auto o = bar();
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = human_at(grid_vec(rng, -1, 1), grid_vec(rng, -1, 1));
    const Pose obj(grid_vec(rng, -1, 1));
    const Pose ee(grid_vec(rng, -1, 1));
    const Vec3 t = grid_vec(rng, -4, 4);

    auto h2 = h;
    h2.hand = h.hand.translated(t);
    h2.face = h.face.translated(t);
    EXPECT_EQ(safety(obj, ee, h), safety(obj.translated(t), ee.translated(t), h2));

    const Pose grasp(grid_vec(rng, -1, 1));
    EXPECT_EQ(reachability(h.hand, grasp), reachability(h2.hand, grasp.translated(t)));

    // object-frame quantity: the world placement never enters
    for (const auto& g : o.grasps) {
      if (!g.in_affordance) EXPECT_EQ(appropriateness(g, o), appropriateness(g, o));
    }
    const auto a1 = advised_human_grasp(o, obj, h.hand);
    const auto a2 = advised_human_grasp(o, obj.translated(t), h2.hand);
    EXPECT_EQ(a1.grasp->id, a2.grasp->id);
  }
}

TEST(AdvisedGrasp, NearestToHandWithIdTieBreak) {
  ObjectModel o;
  o.id = "o";
  o.grasps = {{"b", Pose::at(0.1, 0, 0), true}, {"a", Pose::at(-0.1, 0, 0), true}, {"r", Pose::at(0, 0.1, 0), false}};
  // hand equidistant from both human grasps
  auto adv = advised_human_grasp(o, Pose::at(0, 0, 0), Pose::at(0, 0, 1));
  EXPECT_EQ(adv.grasp->id, "a");
  adv = advised_human_grasp(o, Pose::at(0, 0, 0), Pose::at(1, 0, 0));
  EXPECT_EQ(adv.grasp->id, "b");
  EXPECT_NEAR(adv.world.position.x(), 0.1, 1e-15);

  // rotated object: grasp positions follow the object frame
  const Pose turned(Vec3(0, 0, 0), Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitZ())));
  adv = advised_human_grasp(o, turned, Pose::at(1, 0, 0));
  EXPECT_EQ(adv.grasp->id, "a");
}
