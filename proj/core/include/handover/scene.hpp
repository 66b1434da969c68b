#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "handover/geometry.hpp"

namespace handover {

enum class MobilityLevel { H, HM, LM, L };
enum class ShapeContext { Cubic, Spherical, Irregular, Cylindrical };

inline constexpr std::array<MobilityLevel, 4> kMobilityLevels{
    MobilityLevel::H, MobilityLevel::HM, MobilityLevel::LM, MobilityLevel::L};
inline constexpr std::array<ShapeContext, 4> kShapeContexts{
    ShapeContext::Cubic, ShapeContext::Spherical, ShapeContext::Irregular,
    ShapeContext::Cylindrical};

/// "H", "H-M", "L-M", "L"
std::string_view to_string(MobilityLevel level);
/// "cubic", "spherical", "irregular", "cylindrical"
std::string_view to_string(ShapeContext shape);
/// Throw ParseError on unknown labels.
MobilityLevel parse_mobility(std::string_view text);
ShapeContext parse_shape(std::string_view text);

/// A discrete grasp on an object. Poses are in the object frame.
/// in_affordance marks candidate human grasps; the rest are robot candidates.
struct GraspCandidate {
  std::string id;
  Pose pose;
  bool in_affordance = false;
};

struct ObjectModel {
  std::string id;
  ShapeContext shape = ShapeContext::Cubic;
  std::map<std::string, std::string> semantic_features;  // category, texture, material
  std::string task;
  std::vector<GraspCandidate> grasps;
  double bounding_radius = 0.1;

  const GraspCandidate* find_grasp(std::string_view grasp_id) const;
};

std::vector<GraspCandidate> human_grasps(const ObjectModel& obj);
std::vector<GraspCandidate> robot_grasp_candidates(const ObjectModel& obj);

struct HumanState {
  Pose hand;
  Pose face;
  MobilityLevel mobility = MobilityLevel::H;
  std::string task;
  std::optional<Pose> torso;
};

struct Scene {
  VoxelMap map;
  HumanState human;
  ObjectModel object;
  Pose robot_base;
};

/// Checks every type invariant; throws ValidationError with the field path.
void validate_scene(const Scene& scene);

/// Parses and validates a scene document (schema first, then invariants).
/// Throws ParseError on malformed JSON and ValidationError on violations.
Scene parse_scene(std::string_view text);
Scene load_scene(const std::filesystem::path& path);

/// Serialises a scene back to the file format; parse_scene(scene_to_json(s)) == s.
std::string scene_to_json(const Scene& scene);

/// The JSON schema text shipped with the library.
std::string_view scene_schema();

}  // namespace handover
