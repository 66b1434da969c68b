#include "handover/effort.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "handover/errors.hpp"
#include "handover/random.hpp"

namespace handover {

namespace {

constexpr double kTol = 1e-9;
constexpr std::array<const char*, 3> kJointNames{"shoulder", "elbow", "wrist"};

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

Vec3 horizontal_unit(const Vec3& v) {
  Vec3 h(v.x(), 0.0, v.z());
  const double n = h.norm();
  if (n < 1e-12) return Vec3::UnitX();
  return h / n;
}

// Planar (forward, up) coordinates of each joint for the given angles.
std::array<Eigen::Vector2d, 4> planar_chain(const ArmModel& arm, const JointAngles& q) {
  std::array<Eigen::Vector2d, 4> p;
  p[0] = Eigen::Vector2d::Zero();
  double phi = 0.0;
  for (int i = 0; i < 3; ++i) {
    phi += q[i];
    p[i + 1] = p[i] + arm.link_lengths[i] * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  }
  return p;
}

}  // namespace

void ArmModel::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(link_lengths[i] > 0.0)) throw std::invalid_argument("link lengths must be positive");
    if (!(link_masses[i] > 0.0)) throw std::invalid_argument("link masses must be positive");
    if (!(joint_limits[i].lower < joint_limits[i].upper)) {
      throw std::invalid_argument(std::string("degenerate limits for ") + kJointNames[i]);
    }
  }
  if (!(gravity >= 0.0)) throw std::invalid_argument("gravity must be non-negative");
}

double ArmModel::min_wrist_reach() const {
  const double l1 = link_lengths[0], l2 = link_lengths[1];
  const double bend = std::min(joint_limits[1].upper, std::numbers::pi);
  return std::sqrt(std::max(0.0, l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * std::cos(bend)));
}

ArmConfiguration solve_arm(const ArmModel& arm, const Vec3& shoulder, const Vec3& target) {
  arm.validate();
  const double l1 = arm.link_lengths[0], l2 = arm.link_lengths[1], l3 = arm.link_lengths[2];
  const Vec3 rel = target - shoulder;
  ArmConfiguration out;
  out.heading = horizontal_unit(rel);
  const Eigen::Vector2d t(rel.dot(out.heading), rel.y());
  const double d = t.norm();

  if (d > arm.total_length() + kTol) {
    throw Unreachable("target is " + std::to_string(d) + " m from the shoulder, arm length " +
                      std::to_string(arm.total_length()) + " m");
  }
  const double rw = std::clamp(d - l3, arm.min_wrist_reach(), l1 + l2);
  if (d < 1e-12 || d < std::abs(rw - l3) - kTol) {
    throw Unreachable("target too close to the shoulder (" + std::to_string(d) + " m)");
  }

  // Wrist on the circle of radius rw about the shoulder, l3 from the target; lower solution.
  const Eigen::Vector2d e = t / d;
  const double along = (rw * rw - l3 * l3 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, rw * rw - along * along));
  Eigen::Vector2d m(-e.y(), e.x());
  if (m.y() > 0.0 || (m.y() == 0.0 && m.x() < 0.0)) m = -m;
  const Eigen::Vector2d w = along * e + h * m;

  const double c2 = (w.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  const double q2 = std::acos(std::clamp(c2, -1.0, 1.0));
  const double q1 = std::atan2(w.y(), w.x()) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  const Eigen::Vector2d hand = t - w;
  const double q3 = std::atan2(hand.y(), hand.x()) - q1 - q2;
  out.angles = {wrap_angle(q1), q2, wrap_angle(q3)};

  for (int i = 0; i < 3; ++i) {
    const auto& lim = arm.joint_limits[i];
    if (out.angles[i] < lim.lower - kTol || out.angles[i] > lim.upper + kTol) {
      throw LimitViolation(std::string(kJointNames[i]) + " angle " +
                           std::to_string(out.angles[i]) + " rad outside [" +
                           std::to_string(lim.lower) + ", " + std::to_string(lim.upper) + "]");
    }
  }
  return out;
}

std::array<Vec3, 4> forward_kinematics(const ArmModel& arm, const Vec3& shoulder,
                                       const ArmConfiguration& config) {
  const auto p = planar_chain(arm, config.angles);
  std::array<Vec3, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = shoulder + p[i].x() * config.heading + p[i].y() * Vec3::UnitY();
  }
  return out;
}

std::array<double, 3> gravity_torques(const ArmModel& arm, const JointAngles& angles) {
  const auto p = planar_chain(arm, angles);
  std::array<double, 3> tau{};
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const double com = 0.5 * (p[k].x() + p[k + 1].x());
      tau[j] += arm.link_masses[k] * arm.gravity * (com - p[j].x());
    }
  }
  return tau;
}

double joint_effort(const ArmModel& arm, const Vec3& shoulder, const Vec3& start_target,
                    const Vec3& end_target, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  const auto a = solve_arm(arm, shoulder, start_target).angles;
  const auto b = solve_arm(arm, shoulder, end_target).angles;
  double total = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double s = static_cast<double>(i) / steps;
    JointAngles q;
    for (int j = 0; j < 3; ++j) q[j] = a[j] + s * (b[j] - a[j]);
    const auto tau = gravity_torques(arm, q);
    total += std::abs(tau[0]) + std::abs(tau[1]) + std::abs(tau[2]);
  }
  return total / (steps + 1);
}

std::string_view to_string(MethodId method) {
  switch (method) {
    case MethodId::MethodA: return "MethodA";
    case MethodId::MethodB: return "MethodB";
    case MethodId::Ours: return "Ours";
  }
  return "?";
}

MethodId parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "methoda" || lower == "a") return MethodId::MethodA;
  if (lower == "methodb" || lower == "b") return MethodId::MethodB;
  if (lower == "ours") return MethodId::Ours;
  throw ParseError("unknown method '" + std::string(text) + "'");
}

Vec3 torso_position(const Scene& scene) {
  if (scene.human.torso) return scene.human.torso->position;
  const Vec3& hand = scene.human.hand.position;
  return hand - 0.25 * horizontal_unit(scene.robot_base.position - hand);
}

Vec3 body_relative_point(const Scene& scene, double distance) {
  const Vec3 torso = torso_position(scene);
  return torso + distance * horizontal_unit(scene.robot_base.position - torso);
}

Vec3 method_transfer_point(MethodId method, const Scene& scene, const ReachModel& reach,
                           const SamplerConfig& cfg) {
  switch (method) {
    case MethodId::MethodA: return body_relative_point(scene, kMethodADistance);
    case MethodId::MethodB: return body_relative_point(scene, kMethodBDistance);
    case MethodId::Ours: return optimize_handover(scene, reach, cfg).advised_grasp_world.position;
  }
  throw std::invalid_argument("unknown method");
}

std::vector<EffortSample> compare_methods(const Scene& scene, const std::string& setup_id,
                                          const ReachModel& reach, const EffortOptions& opts) {
  if (opts.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const Vec3 shoulder = torso_position(scene);
  std::array<Vec3, 3> targets;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    targets[m] = method_transfer_point(kMethods[m], scene, reach, opts.sampler);
  }

  std::vector<Vec3> starts;
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(t)));
    Vec3 jitter;
    for (int axis = 0; axis < 3; ++axis) jitter[axis] = rng.uniform(-1.0, 1.0) * opts.start_jitter;
    starts.push_back(scene.human.hand.position + jitter);
  }

  std::vector<EffortSample> out;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    for (int t = 0; t < opts.trials; ++t) {
      out.push_back({kMethods[m], setup_id, t,
                     joint_effort(opts.arm, shoulder, starts[t], targets[m], opts.steps)});
    }
  }
  return out;
}

std::array<double, 3> mean_effort(const std::vector<EffortSample>& samples,
                                  std::string_view setup_id) {
  std::array<double, 3> sum{};
  std::array<int, 3> count{};
  for (const auto& s : samples) {
    if (!setup_id.empty() && s.setup_id != setup_id) continue;
    const auto m = static_cast<std::size_t>(s.method);
    sum[m] += s.effort_nm;
    ++count[m];
  }
  for (std::size_t m = 0; m < 3; ++m) sum[m] = count[m] ? sum[m] / count[m] : 0.0;
  return sum;
}

std::string effort_csv(const std::vector<EffortSample>& samples, const OutputMeta& meta) {
  std::string out = meta.csv_preamble() + "method,setup_id,trial,effort_nm\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.6f", s.effort_nm);
    out += std::string(to_string(s.method)) + "," + s.setup_id + "," + std::to_string(s.trial) +
           "," + buf + "\n";
  }
  return out;
}

}  // namespace handover
