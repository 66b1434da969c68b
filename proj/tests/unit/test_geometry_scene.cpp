#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "handover/errors.hpp"
#include "handover/geometry.hpp"
#include "handover/scene.hpp"

using namespace handover;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example_text() { return read_file(std::string(HANDOVER_DATA_DIR) + "/scenes/example.json"); }

Quat axis_angle(double deg, const Vec3& axis) {
  return Quat(Eigen::AngleAxisd(deg * M_PI / 180.0, axis.normalized()));
}

}  // namespace

TEST(Geometry, AngularDistanceBasics) {
  EXPECT_NEAR(angular_distance(Quat::Identity(), axis_angle(90, Vec3::UnitZ())), 90.0, 1e-9);
  EXPECT_NEAR(angular_distance(Quat::Identity(), axis_angle(180, Vec3::UnitX())), 180.0, 1e-9);
  // double cover
  const Quat q = axis_angle(37, Vec3(1, 2, 3));
  const Quat neg(-q.w(), -q.x(), -q.y(), -q.z());
  EXPECT_NEAR(angular_distance(q, neg), 0.0, 1e-9);
  EXPECT_NEAR(angular_distance(q, q), 0.0, 1e-12);
}

TEST(Geometry, AngularDistanceSymmetricAndBounded) {
  for (int i = 0; i < 50; ++i) {
    const Quat a = axis_angle(i * 7.3, Vec3(1, i % 3, 2));
    const Quat b = axis_angle(i * 11.1 + 3, Vec3(-1, 1, i % 5));
    const double ab = angular_distance(a, b);
    EXPECT_NEAR(ab, angular_distance(b, a), 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 180.0 + 1e-9);
  }
}

TEST(Geometry, ComposeAppliesRotationThenTranslation) {
  const Pose parent(Vec3(1, 2, 3), axis_angle(90, Vec3::UnitY()));
  const Pose child = Pose::at(1, 0, 0);
  const Pose w = parent.compose(child);
  EXPECT_NEAR(w.position.x(), 1.0, 1e-12);
  EXPECT_NEAR(w.position.y(), 2.0, 1e-12);
  EXPECT_NEAR(w.position.z(), 2.0, 1e-12);
}

TEST(Geometry, PointDistanceIgnoresOrientation) {
  const Pose a(Vec3(0, 0, 0), axis_angle(30, Vec3::UnitX()));
  const Pose b = Pose::at(3, 4, 0);
  EXPECT_DOUBLE_EQ(point_distance(a, b), 5.0);
}

TEST(VoxelMapTest, IndexingIsLowerInclusiveUpperExclusive) {
  const VoxelMap map(Vec3(0, 0, 0), 0.125, {3, 3, 3});
  EXPECT_EQ(map.index_of(Vec3(0, 0, 0)), (VoxelIndex{0, 0, 0}));
  EXPECT_EQ(map.index_of(Vec3(0.25, 0.125, 0.05)), (VoxelIndex{2, 1, 0}));
  EXPECT_THROW(map.index_of(Vec3(0.375, 0.1, 0.1)), OutOfBounds);
  EXPECT_THROW(map.index_of(Vec3(-1e-9, 0.1, 0.1)), OutOfBounds);
  EXPECT_FALSE(map.contains(Vec3(0.1, 0.375, 0.1)));
  EXPECT_TRUE(map.contains(Vec3(0.1, std::nextafter(0.375, 0.0), 0.1)));
}

TEST(VoxelMapTest, CenterRoundTrip) {
  const VoxelMap map(Vec3(-0.4, 0.2, 1.0), 0.05, {4, 5, 6});
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 5; ++y)
      for (int z = 0; z < 6; ++z) EXPECT_EQ(map.index_of(map.center({x, y, z})), (VoxelIndex{x, y, z}));
}

TEST(VoxelMapTest, RejectsBadConstruction) {
  EXPECT_THROW(VoxelMap(Vec3::Zero(), 0.0, {1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(VoxelMap(Vec3::Zero(), 0.1, {1, 0, 1}), std::invalid_argument);
}

TEST(VoxelMapTest, ProximityOrderIsSortedAndComplete) {
  const VoxelMap map(Vec3(0, 0, 0), 0.1, {4, 3, 5});
  const Pose hand = Pose::at(0.17, 0.05, 0.33);
  const auto order = voxels_by_hand_proximity(map, hand);
  ASSERT_EQ(order.size(), map.size());
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double a = point_distance(map.center(order[i - 1]), hand.position);
    const double b = point_distance(map.center(order[i]), hand.position);
    EXPECT_TRUE(a < b || (a == b && order[i - 1] < order[i]));
  }
}

TEST(VoxelMapTest, ProximityTiesBreakLexicographically) {
  // hand on the shared face of two voxels
  const VoxelMap map(Vec3(0, 0, 0), 1.0, {2, 1, 1});
  const auto order = voxels_by_hand_proximity(map, Pose::at(1.0, 0.5, 0.5));
  EXPECT_EQ(order[0], (VoxelIndex{0, 0, 0}));
  EXPECT_EQ(order[1], (VoxelIndex{1, 0, 0}));
}

TEST(SceneTest, LabelsRoundTrip) {
  for (auto l : kMobilityLevels) EXPECT_EQ(parse_mobility(to_string(l)), l);
  for (auto s : kShapeContexts) EXPECT_EQ(parse_shape(to_string(s)), s);
  EXPECT_THROW(parse_mobility("medium"), ParseError);
  EXPECT_THROW(parse_shape("conic"), ParseError);
}

TEST(SceneTest, ParsesShippedExample) {
  const Scene s = parse_scene(example_text());
  EXPECT_EQ(s.object.id, "mug");
  EXPECT_EQ(s.object.shape, ShapeContext::Cylindrical);
  EXPECT_EQ(s.human.mobility, MobilityLevel::L);
  EXPECT_EQ(s.object.grasps.size(), 5u);
  EXPECT_EQ(human_grasps(s.object).size(), 2u);
  EXPECT_EQ(robot_grasp_candidates(s.object).size(), 3u);
}

TEST(SceneTest, GlassDrinkFixture) {
  const Scene s = load_scene(std::string(HANDOVER_DATA_DIR) + "/scenes/glass_drink.json");
  EXPECT_EQ(s.object.task, "drink");
  EXPECT_EQ(s.object.shape, ShapeContext::Cylindrical);
}

TEST(SceneTest, SerializationRoundTrip) {
  const Scene s = parse_scene(example_text());
  const Scene t = parse_scene(scene_to_json(s));
  EXPECT_EQ(scene_to_json(s), scene_to_json(t));
  EXPECT_EQ(t.object.grasps.size(), s.object.grasps.size());
  EXPECT_TRUE(t.human.hand.position.isApprox(s.human.hand.position, 0.0));
}

TEST(SceneTest, MinimalTwoGraspScene) {
  Scene s = parse_scene(example_text());
  s.object.grasps = {s.object.grasps[0], s.object.grasps[1]};
  const Scene t = parse_scene(scene_to_json(s));
  EXPECT_EQ(t.object.grasps.size(), 2u);
}

TEST(SceneTest, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_scene("{\"map\": "), ParseError);
}

TEST(SceneTest, ValidationNamesTheField) {
  Scene s = parse_scene(example_text());

  Scene no_human = s;
  for (auto& g : no_human.object.grasps) g.in_affordance = false;
  try {
    parse_scene(scene_to_json(no_human));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "object.grasps");
  }

  Scene outside = s;
  outside.human.hand.position = Vec3(10, 10, 10);
  try {
    validate_scene(outside);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "human.hand");
  }

  Scene bad_quat = s;
  bad_quat.human.face.orientation = Quat(1.0, 0.1, 0.0, 0.0);
  EXPECT_THROW(validate_scene(bad_quat), ValidationError);

  Scene dup = s;
  dup.object.grasps[1].id = dup.object.grasps[0].id;
  EXPECT_THROW(validate_scene(dup), ValidationError);
}

TEST(SceneTest, SchemaRejectsUnknownMobility) {
  std::string text = example_text();
  const auto at = text.find("\"L\"");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 3, "\"X\"");
  EXPECT_THROW(parse_scene(text), ValidationError);
}
