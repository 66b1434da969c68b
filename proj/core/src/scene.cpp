#include "handover/scene.hpp"

#include <set>

#include "handover/errors.hpp"
#include "json_io.hpp"
#include "json_schema.hpp"

namespace handover {
namespace {

using nlohmann::json;

constexpr std::string_view kSchemaText =
#include "scene_schema.inc"
    ;

const json& schema_json() {
  static const json schema = json::parse(kSchemaText);
  return schema;
}

void check_pose(const Pose& p, const std::string& path) {
  if (!p.position.allFinite()) throw ValidationError(path + ".position", "must be finite");
  if (!p.orientation.coeffs().allFinite() || std::abs(p.orientation.norm() - 1.0) > 1e-9) {
    throw ValidationError(path + ".orientation", "quaternion must have unit norm (1e-9)");
  }
}

}  // namespace

std::string_view to_string(MobilityLevel level) {
  switch (level) {
    case MobilityLevel::H: return "H";
    case MobilityLevel::HM: return "H-M";
    case MobilityLevel::LM: return "L-M";
    case MobilityLevel::L: return "L";
  }
  return "?";
}

std::string_view to_string(ShapeContext shape) {
  switch (shape) {
    case ShapeContext::Cubic: return "cubic";
    case ShapeContext::Spherical: return "spherical";
    case ShapeContext::Irregular: return "irregular";
    case ShapeContext::Cylindrical: return "cylindrical";
  }
  return "?";
}

MobilityLevel parse_mobility(std::string_view text) {
  for (auto level : kMobilityLevels) {
    if (to_string(level) == text) return level;
  }
  throw ParseError("unknown mobility level '" + std::string(text) + "'");
}

ShapeContext parse_shape(std::string_view text) {
  for (auto shape : kShapeContexts) {
    if (to_string(shape) == text) return shape;
  }
  throw ParseError("unknown shape context '" + std::string(text) + "'");
}

const GraspCandidate* ObjectModel::find_grasp(std::string_view grasp_id) const {
  for (const auto& g : grasps) {
    if (g.id == grasp_id) return &g;
  }
  return nullptr;
}

std::vector<GraspCandidate> human_grasps(const ObjectModel& obj) {
  std::vector<GraspCandidate> out;
  for (const auto& g : obj.grasps) {
    if (g.in_affordance) out.push_back(g);
  }
  return out;
}

std::vector<GraspCandidate> robot_grasp_candidates(const ObjectModel& obj) {
  std::vector<GraspCandidate> out;
  for (const auto& g : obj.grasps) {
    if (!g.in_affordance) out.push_back(g);
  }
  return out;
}

void validate_scene(const Scene& scene) {
  check_pose(scene.human.hand, "human.hand");
  check_pose(scene.human.face, "human.face");
  if (scene.human.torso) check_pose(*scene.human.torso, "human.torso");
  check_pose(scene.robot_base, "robot_base");
  if (point_distance(scene.human.hand, scene.human.face) == 0.0) {
    throw ValidationError("human.face", "hand and face must be distinct landmarks");
  }
  if (!scene.map.contains(scene.human.hand.position)) {
    throw ValidationError("human.hand", "hand position lies outside the voxel map");
  }

  const auto& obj = scene.object;
  if (!(obj.bounding_radius > 0.0)) {
    throw ValidationError("object.bounding_radius", "must be positive");
  }
  std::set<std::string> ids;
  bool any_human = false;
  bool any_robot = false;
  for (std::size_t i = 0; i < obj.grasps.size(); ++i) {
    const auto& g = obj.grasps[i];
    const std::string path = "object.grasps[" + std::to_string(i) + "]";
    if (!ids.insert(g.id).second) throw ValidationError(path + ".id", "duplicate grasp id " + g.id);
    check_pose(g.pose, path + ".pose");
    if (g.pose.position.norm() > obj.bounding_radius + 1e-12) {
      throw ValidationError(path + ".pose", "grasp lies outside the object's bounding radius");
    }
    any_human = any_human || g.in_affordance;
    any_robot = any_robot || !g.in_affordance;
  }
  if (!any_human) {
    throw ValidationError("object.grasps", "needs at least one in_affordance (human) grasp");
  }
  if (!any_robot) {
    throw ValidationError("object.grasps", "needs at least one non-affordance (robot) grasp");
  }
}

Scene parse_scene(std::string_view text) {
  const json doc = detail::parse_json_or_throw(std::string(text), "scene");
  detail::validate_against_schema(doc, schema_json());

  Scene scene;
  const auto& m = doc.at("map");
  const auto& dims = m.at("dims");
  scene.map = VoxelMap(detail::vec3_from_json(m.at("origin")), m.at("resolution").get<double>(),
                       {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()});

  const auto& h = doc.at("human");
  scene.human.hand = detail::pose_from_json(h.at("hand"));
  scene.human.face = detail::pose_from_json(h.at("face"));
  if (h.contains("torso")) scene.human.torso = detail::pose_from_json(h.at("torso"));
  scene.human.mobility = parse_mobility(h.at("mobility").get<std::string>());
  scene.human.task = h.at("task").get<std::string>();

  const auto& o = doc.at("object");
  scene.object.id = o.at("id").get<std::string>();
  scene.object.shape = parse_shape(o.at("shape").get<std::string>());
  scene.object.task = o.at("task").get<std::string>();
  scene.object.bounding_radius = o.at("bounding_radius").get<double>();
  if (o.contains("semantic_features")) {
    for (const auto& [k, v] : o.at("semantic_features").items()) {
      scene.object.semantic_features[k] = v.get<std::string>();
    }
  }
  for (const auto& g : o.at("grasps")) {
    scene.object.grasps.push_back(
        {g.at("id").get<std::string>(), detail::pose_from_json(g.at("pose")),
         g.at("in_affordance").get<bool>()});
  }
  scene.robot_base = detail::pose_from_json(doc.at("robot_base"));

  validate_scene(scene);
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  return parse_scene(detail::read_text_file(path.string()));
}

std::string scene_to_json(const Scene& scene) {
  json doc;
  doc["schema_version"] = 1;
  doc["map"] = {{"origin", detail::to_json(scene.map.origin())},
                {"resolution", scene.map.resolution()},
                {"dims", scene.map.dims()}};
  json human = {{"hand", detail::to_json(scene.human.hand)},
                {"face", detail::to_json(scene.human.face)},
                {"mobility", std::string(to_string(scene.human.mobility))},
                {"task", scene.human.task}};
  if (scene.human.torso) human["torso"] = detail::to_json(*scene.human.torso);
  doc["human"] = human;

  json grasps = json::array();
  for (const auto& g : scene.object.grasps) {
    grasps.push_back({{"id", g.id}, {"pose", detail::to_json(g.pose)}, {"in_affordance", g.in_affordance}});
  }
  json object = {{"id", scene.object.id},
                 {"shape", std::string(to_string(scene.object.shape))},
                 {"task", scene.object.task},
                 {"bounding_radius", scene.object.bounding_radius},
                 {"grasps", grasps}};
  if (!scene.object.semantic_features.empty()) {
    object["semantic_features"] = scene.object.semantic_features;
  }
  doc["object"] = object;
  doc["robot_base"] = detail::to_json(scene.robot_base);
  return doc.dump(2);
}

std::string_view scene_schema() { return kSchemaText; }

}  // namespace handover
