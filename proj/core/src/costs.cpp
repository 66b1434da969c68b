#include "handover/costs.hpp"

#include <algorithm>

#include "handover/errors.hpp"

namespace handover {

double appropriateness(const GraspCandidate& candidate, const ObjectModel& obj) {
  double closest = kInfinity;
  bool any = false;
  for (const auto& g : obj.grasps) {
    if (!g.in_affordance) continue;
    any = true;
    closest = std::min(closest, point_distance(candidate.pose, g.pose));
  }
  if (!any) throw NoHumanGrasp("object '" + obj.id + "' has no in_affordance grasp");
  return closest;
}

ComponentDistances safety_distances(const Pose& obj_pose, const Pose& ee_pose,
                                    const HumanState& human) {
  return {point_distance(obj_pose, human.hand), point_distance(obj_pose, human.face),
          point_distance(ee_pose, human.hand)};
}

double safety(const Pose& obj_pose, const Pose& ee_pose, const HumanState& human) {
  const auto d = safety_distances(obj_pose, ee_pose, human);
  if (std::min({d.obj_to_hand, d.obj_to_face, d.ee_to_hand}) < kSafetyThreshold) return 0.0;
  return d.obj_to_hand + d.obj_to_face + d.ee_to_hand;
}

double reachability(const Pose& hand, const Pose& advised_grasp_world) {
  const double d = point_distance(hand, advised_grasp_world);
  return d <= kReachThreshold ? d : kInfinity;
}

AdvisedGrasp advised_human_grasp(const ObjectModel& obj, const Pose& obj_pose, const Pose& hand) {
  AdvisedGrasp best;
  double best_distance = kInfinity;
  for (const auto& g : obj.grasps) {
    if (!g.in_affordance) continue;
    const Pose world = obj_pose.compose(g.pose);
    const double d = point_distance(world, hand);
    if (best.grasp == nullptr || d < best_distance ||
        (d == best_distance && g.id < best.grasp->id)) {
      best = {&g, world};
      best_distance = d;
    }
  }
  if (best.grasp == nullptr) throw NoHumanGrasp("object '" + obj.id + "' has no in_affordance grasp");
  return best;
}

}  // namespace handover
