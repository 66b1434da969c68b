#include "handover/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "handover/errors.hpp"
#include "handover/random.hpp"
#include "handover/threading.hpp"
#include "json_io.hpp"

namespace handover {

RadialBandReach::RadialBandReach(double min_reach, double max_reach)
    : min_reach_(min_reach), max_reach_(max_reach) {
  if (!(min_reach >= 0.0) || !(min_reach < max_reach)) {
    throw std::invalid_argument("RadialBandReach requires 0 <= min_reach < max_reach");
  }
}

std::optional<Pose> RadialBandReach::end_effector(const Pose& /*object_pose*/,
                                                  const Pose& grasp_world,
                                                  const Pose& robot_base) const {
  const double d = point_distance(grasp_world, robot_base);
  if (d < min_reach_ || d > max_reach_) return std::nullopt;
  return grasp_world;
}

std::vector<Quat> default_orientation_set() {
  const double c = std::sqrt(0.5);
  return {
      Quat::Identity(),
      Quat(c, c, 0, 0),  Quat(c, -c, 0, 0),
      Quat(c, 0, c, 0),  Quat(c, 0, -c, 0),
      Quat(c, 0, 0, c),  Quat(c, 0, 0, -c),
  };
}

void SamplerConfig::validate() const {
  if (poses_per_voxel < 1) throw std::invalid_argument("poses_per_voxel must be >= 1");
  if (orientation_set.empty()) throw std::invalid_argument("orientation_set must be non-empty");
  for (const auto& q : orientation_set) {
    if (std::abs(q.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("orientation_set entries must be unit quaternions");
    }
  }
}

std::vector<Pose> sample_object_poses(const Vec3& voxel_center, double resolution,
                                      const SamplerConfig& cfg) {
  cfg.validate();
  std::uint64_t stream = bits_of(resolution);
  for (int axis = 0; axis < 3; ++axis) stream = mix64(stream ^ bits_of(voxel_center[axis]));
  Rng rng(derive_seed(cfg.seed, stream));

  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(cfg.poses_per_voxel) * cfg.orientation_set.size());
  for (int i = 0; i < cfg.poses_per_voxel; ++i) {
    Vec3 p;
    for (int axis = 0; axis < 3; ++axis) {
      p[axis] = voxel_center[axis] + (rng.uniform() - 0.5) * resolution;
    }
    for (const auto& q : cfg.orientation_set) out.emplace_back(p, q);
  }
  return out;
}

const GraspCandidate& select_robot_grasp(const ObjectModel& obj) {
  if (human_grasps(obj).empty()) {
    throw NoHumanGrasp("object '" + obj.id + "' has no in_affordance grasp");
  }
  const GraspCandidate* best = nullptr;
  double best_score = -kInfinity;
  for (const auto& g : obj.grasps) {
    if (g.in_affordance) continue;
    const double score = appropriateness(g, obj);
    if (best == nullptr || score > best_score || (score == best_score && g.id < best->id)) {
      best = &g;
      best_score = score;
    }
  }
  if (best == nullptr) throw NoRobotGrasp("object '" + obj.id + "' has no robot grasp candidate");
  return *best;
}

std::optional<HandoverSolution> evaluate_placement(const Scene& scene, const ReachModel& reach,
                                                   const GraspCandidate& robot_grasp,
                                                   const Pose& object_pose) {
  const Pose grasp_world = object_pose.compose(robot_grasp.pose);
  const auto ee = reach.end_effector(object_pose, grasp_world, scene.robot_base);
  if (!ee) return std::nullopt;

  HandoverSolution s;
  s.robot_grasp = robot_grasp.id;
  s.object_pose = object_pose;
  s.ee_pose = *ee;
  s.costs.appropriateness = appropriateness(robot_grasp, scene.object);
  s.costs.component_distances = safety_distances(object_pose, *ee, scene.human);
  s.costs.safety = safety(object_pose, *ee, scene.human);
  const auto advised = advised_human_grasp(scene.object, object_pose, scene.human.hand);
  s.advised_human_grasp = advised.grasp->id;
  s.advised_grasp_world = advised.world;
  s.costs.reachability = reachability(scene.human.hand, advised.world);
  return s;
}

namespace {

// Highest-safety reach-feasible sample of one voxel (earliest index on ties), kept
// only if it is both safe and reachable.
std::optional<HandoverSolution> best_in_voxel(const Scene& scene, const ReachModel& reach,
                                              const GraspCandidate& robot_grasp,
                                              const SamplerConfig& cfg, const VoxelIndex& v) {
  const auto samples = sample_object_poses(scene.map.center(v), scene.map.resolution(), cfg);
  std::optional<HandoverSolution> best;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto candidate = evaluate_placement(scene, reach, robot_grasp, samples[k]);
    if (!candidate) continue;
    if (!best || candidate->costs.safety > best->costs.safety) {
      candidate->sample_index = k;
      candidate->voxel = v;
      best = std::move(candidate);
    }
  }
  if (!best || !(best->costs.safety > 0.0) || !std::isfinite(best->costs.reachability)) {
    return std::nullopt;
  }
  return best;
}

}  // namespace

HandoverSolution optimize_handover(const Scene& scene, const ReachModel& reach,
                                   const SamplerConfig& cfg) {
  cfg.validate();
  const GraspCandidate& robot_grasp = select_robot_grasp(scene.object);
  const auto order = voxels_by_hand_proximity(scene.map, scene.human.hand);

  const std::size_t workers = cfg.threads > 0 ? cfg.threads : worker_count();
  // Voxels are evaluated in blocks; the first valid voxel in proximity order wins
  // regardless of which worker finished first.
  const std::size_t block = workers <= 1 ? 1 : workers * 4;
  for (std::size_t start = 0; start < order.size(); start += block) {
    const std::size_t n = std::min(block, order.size() - start);
    std::vector<std::optional<HandoverSolution>> results(n);
    parallel_for(n, workers, [&](std::size_t i) {
      results[i] = best_in_voxel(scene, reach, robot_grasp, cfg, order[start + i]);
    });
    for (auto& r : results) {
      if (r) return std::move(*r);
    }
  }
  throw NoFeasibleHandover("no voxel yields a safe, reachable, reach-feasible placement");
}

std::string solution_to_json(const HandoverSolution& s, const OutputMeta& meta) {
  using nlohmann::json;
  const auto& c = s.costs;
  json doc;
  doc["schema_version"] = meta.schema_version;
  doc["seed"] = meta.seed;
  if (meta.timestamp) doc["generated_at"] = *meta.timestamp;
  doc["robot_grasp"] = s.robot_grasp;
  doc["object_pose"] = detail::to_json(s.object_pose);
  doc["ee_pose"] = detail::to_json(s.ee_pose);
  doc["advised_human_grasp"] = s.advised_human_grasp;
  doc["advised_grasp_world"] = detail::to_json(s.advised_grasp_world);
  doc["costs"] = {
      {"appropriateness", c.appropriateness},
      {"safety", c.safety},
      {"reachability", std::isfinite(c.reachability) ? json(c.reachability) : json(nullptr)},
      {"component_distances",
       {{"obj_to_hand", c.component_distances.obj_to_hand},
        {"obj_to_face", c.component_distances.obj_to_face},
        {"ee_to_hand", c.component_distances.ee_to_hand}}}};
  doc["voxel"] = {s.voxel.x, s.voxel.y, s.voxel.z};
  doc["sample_index"] = s.sample_index;
  return doc.dump(2) + "\n";
}

}  // namespace handover
