#pragma once

#include <limits>

#include "handover/geometry.hpp"
#include "handover/scene.hpp"

namespace handover {

/// Any safety distance strictly below this zeroes the safety cost.
inline constexpr double kSafetyThreshold = 0.05;
/// Hand-to-advised-grasp distances beyond this make reachability infinite.
inline constexpr double kReachThreshold = 0.75;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ComponentDistances {
  double obj_to_hand = 0.0;
  double obj_to_face = 0.0;
  double ee_to_hand = 0.0;
};

struct CostBreakdown {
  double appropriateness = 0.0;
  double safety = 0.0;        // 0 when any component distance is below kSafetyThreshold
  double reachability = 0.0;  // +inf beyond kReachThreshold
  ComponentDistances component_distances;
};

/// Distance from a robot grasp candidate to the closest human grasp, in the object frame.
/// Throws NoHumanGrasp when the object has no in_affordance grasp.
double appropriateness(const GraspCandidate& candidate, const ObjectModel& obj);

ComponentDistances safety_distances(const Pose& obj_pose, const Pose& ee_pose,
                                    const HumanState& human);

/// Sum of the three component distances, or 0 if any of them is below 5 cm.
double safety(const Pose& obj_pose, const Pose& ee_pose, const HumanState& human);

/// Hand-to-grasp distance when within 75 cm (inclusive), +inf otherwise.
double reachability(const Pose& hand, const Pose& advised_grasp_world);

struct AdvisedGrasp {
  const GraspCandidate* grasp = nullptr;
  Pose world;
};

/// With the object placed at obj_pose, the in_affordance grasp whose world position
/// is nearest the hand (ties to the smallest id). Throws NoHumanGrasp if none exists.
AdvisedGrasp advised_human_grasp(const ObjectModel& obj, const Pose& obj_pose, const Pose& hand);

}  // namespace handover
