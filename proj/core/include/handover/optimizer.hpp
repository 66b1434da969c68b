#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "handover/costs.hpp"
#include "handover/geometry.hpp"
#include "handover/output.hpp"
#include "handover/scene.hpp"

namespace handover {

/// Capability check f(object pose, grasp) -> end-effector pose, or nullopt when the
/// robot cannot realise the grasp there.
class ReachModel {
 public:
  virtual ~ReachModel() = default;
  virtual std::optional<Pose> end_effector(const Pose& object_pose, const Pose& grasp_world,
                                           const Pose& robot_base) const = 0;
};

/// Feasible iff min_reach <= |grasp - base| <= max_reach. The end-effector sits on
/// the grasp point (zero offset along the base-to-grasp direction).
class RadialBandReach final : public ReachModel {
 public:
  static constexpr double kDefaultMinReach = 0.35;
  static constexpr double kDefaultMaxReach = 1.10;

  RadialBandReach(double min_reach = kDefaultMinReach, double max_reach = kDefaultMaxReach);

  std::optional<Pose> end_effector(const Pose& object_pose, const Pose& grasp_world,
                                   const Pose& robot_base) const override;

  double min_reach() const { return min_reach_; }
  double max_reach() const { return max_reach_; }

 private:
  double min_reach_;
  double max_reach_;
};

/// Adapter for tests and custom kinematics.
class FunctionReach final : public ReachModel {
 public:
  using Fn = std::function<std::optional<Pose>(const Pose&, const Pose&, const Pose&)>;
  explicit FunctionReach(Fn fn) : fn_(std::move(fn)) {}
  std::optional<Pose> end_effector(const Pose& object_pose, const Pose& grasp_world,
                                   const Pose& robot_base) const override {
    return fn_(object_pose, grasp_world, robot_base);
  }

 private:
  Fn fn_;
};

/// Identity plus +/-90 degree turns about x, y and z.
std::vector<Quat> default_orientation_set();

struct SamplerConfig {
  int poses_per_voxel = 4;
  std::vector<Quat> orientation_set = default_orientation_set();
  std::uint64_t seed = 42;
  /// 0 = use worker_count().
  std::size_t threads = 0;

  void validate() const;
};

/// poses_per_voxel positions drawn uniformly inside the voxel cube, each paired with
/// every orientation (sample index = position * |orientations| + orientation).
/// Output depends only on (voxel_center, resolution, cfg).
std::vector<Pose> sample_object_poses(const Vec3& voxel_center, double resolution,
                                      const SamplerConfig& cfg);

struct HandoverSolution {
  std::string robot_grasp;
  Pose object_pose;
  Pose ee_pose;
  std::string advised_human_grasp;
  Pose advised_grasp_world;
  CostBreakdown costs;
  VoxelIndex voxel;
  std::size_t sample_index = 0;
};

/// argmax over robot candidates of appropriateness; ties go to the smallest id.
const GraspCandidate& select_robot_grasp(const ObjectModel& obj);

/// Evaluates a single placement for a fixed robot grasp: end-effector via the reach
/// model, safety, advised human grasp and reachability. nullopt when the reach model
/// reports no end-effector.
std::optional<HandoverSolution> evaluate_placement(const Scene& scene, const ReachModel& reach,
                                                   const GraspCandidate& robot_grasp,
                                                   const Pose& object_pose);

/// Hierarchical search: fix the robot grasp by appropriateness, scan voxels nearest
/// the hand first, and inside each voxel keep the reach-feasible sample with the
/// highest safety. The first voxel whose best sample is safe and reachable wins.
/// Throws NoFeasibleHandover when no voxel qualifies.
HandoverSolution optimize_handover(const Scene& scene, const ReachModel& reach,
                                   const SamplerConfig& cfg);

/// JSON document mirroring HandoverSolution; infinite reachability is written as null.
std::string solution_to_json(const HandoverSolution& solution, const OutputMeta& meta);

}  // namespace handover
