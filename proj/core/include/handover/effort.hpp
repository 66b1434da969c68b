#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "handover/geometry.hpp"
#include "handover/optimizer.hpp"
#include "handover/output.hpp"
#include "handover/scene.hpp"

namespace handover {

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

/// Planar shoulder-elbow-wrist chain. Angles: theta1 absolute from the horizontal
/// forward direction (positive up), theta2/theta3 relative; theta2 >= 0 is elbow-down.
struct ArmModel {
  std::array<double, 3> link_lengths{0.30, 0.27, 0.18};
  std::array<double, 3> link_masses{2.1, 1.2, 0.5};
  double gravity = 9.81;
  std::array<JointLimit, 3> joint_limits{JointLimit{-std::numbers::pi, std::numbers::pi},
                                         JointLimit{0.0, 150.0 * std::numbers::pi / 180.0},
                                         JointLimit{-2.0, 2.0}};

  void validate() const;
  double total_length() const { return link_lengths[0] + link_lengths[1] + link_lengths[2]; }
  /// Shoulder-to-wrist distance with the elbow at its upper limit.
  double min_wrist_reach() const;
};

using JointAngles = std::array<double, 3>;

struct ArmConfiguration {
  JointAngles angles{};
  Vec3 heading = Vec3::UnitX();  // horizontal unit vector spanning the arm plane with +y
};

/// Sagittal-plane IK. The wrist is placed as far out as the target allows (hand
/// link pointing at the target when possible), elbow-down.
/// Throws Unreachable beyond the chain length and LimitViolation outside joint limits.
ArmConfiguration solve_arm(const ArmModel& arm, const Vec3& shoulder, const Vec3& target);

/// Shoulder, elbow, wrist and fingertip positions.
std::array<Vec3, 4> forward_kinematics(const ArmModel& arm, const Vec3& shoulder,
                                       const ArmConfiguration& config);

/// Static gravity torque at each joint, point masses at link midpoints.
std::array<double, 3> gravity_torques(const ArmModel& arm, const JointAngles& angles);

/// Mean over steps+1 interpolated configurations of the summed |torque|.
double joint_effort(const ArmModel& arm, const Vec3& shoulder, const Vec3& start_target,
                    const Vec3& end_target, int steps = 20);

enum class MethodId { MethodA, MethodB, Ours };
inline constexpr std::array<MethodId, 3> kMethods{MethodId::MethodA, MethodId::MethodB,
                                                  MethodId::Ours};

std::string_view to_string(MethodId method);
/// Accepts "MethodA", "MethodB", "Ours" (case-insensitive, also "A"/"B").
MethodId parse_method(std::string_view text);

/// Scene torso, or 0.25 m behind the hand on the horizontal hand-to-robot ray.
Vec3 torso_position(const Scene& scene);

/// Fixed-distance transfer point on the horizontal torso-to-robot ray.
Vec3 body_relative_point(const Scene& scene, double distance);

inline constexpr double kMethodADistance = 0.75;
inline constexpr double kMethodBDistance = 0.50;

/// MethodA/MethodB: body_relative_point at 0.75/0.50 m. Ours: the advised human
/// grasp position of the optimized handover.
Vec3 method_transfer_point(MethodId method, const Scene& scene, const ReachModel& reach,
                           const SamplerConfig& cfg);

struct EffortSample {
  MethodId method = MethodId::MethodA;
  std::string setup_id;
  int trial = 0;
  double effort_nm = 0.0;
};

struct EffortOptions {
  int trials = 5;
  std::uint64_t seed = 42;
  int steps = 20;
  double start_jitter = 0.02;  // start hand drawn uniformly in a cube of this half-width
  ArmModel arm;
  SamplerConfig sampler;
};

/// Each trial perturbs the start hand (shared by all methods in that trial) and
/// measures the effort of moving it to each method's transfer point.
std::vector<EffortSample> compare_methods(const Scene& scene, const std::string& setup_id,
                                          const ReachModel& reach, const EffortOptions& opts);

/// Mean effort per method in kMethods order.
std::array<double, 3> mean_effort(const std::vector<EffortSample>& samples,
                                  std::string_view setup_id = {});

/// "method,setup_id,trial,effort_nm" CSV with the provenance preamble.
std::string effort_csv(const std::vector<EffortSample>& samples, const OutputMeta& meta);

}  // namespace handover
