#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Geometry>

namespace handover {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid SE(3) pose: position in meters, unit quaternion orientation.
/// World frame convention is y-up.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q = Quat::Identity()) : position(p), orientation(q) {}

  static Pose at(double x, double y, double z) { return Pose(Vec3(x, y, z)); }

  /// True when the position is finite and the quaternion norm is within 1e-9 of one.
  bool valid() const;

  /// this * child: express a pose given in this frame in the parent frame.
  Pose compose(const Pose& child) const;

  Pose translated(const Vec3& offset) const { return Pose(position + offset, orientation); }
};

/// Euclidean distance between positions; orientation is ignored.
double point_distance(const Pose& a, const Pose& b);
double point_distance(const Vec3& a, const Vec3& b);

/// Geodesic rotation angle between two orientations, in degrees within [0, 180].
/// Sign-invariant: q and -q describe the same rotation.
double angular_distance(const Quat& a, const Quat& b);
inline double angular_distance(const Pose& a, const Pose& b) {
  return angular_distance(a.orientation, b.orientation);
}

struct VoxelIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const VoxelIndex&) const = default;
};

/// Axis-aligned workspace grid. Voxels tile [origin, origin + dims * resolution)
/// with lower-inclusive, upper-exclusive cells.
class VoxelMap {
 public:
  VoxelMap() = default;
  VoxelMap(const Vec3& origin, double resolution, std::array<int, 3> dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  bool contains(const Vec3& p) const;

  /// Throws OutOfBounds when p lies outside the map volume.
  VoxelIndex index_of(const Vec3& p) const;
  Vec3 center(const VoxelIndex& v) const;
  Vec3 upper_corner() const;

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
};

inline VoxelIndex voxel_index(const VoxelMap& map, const Vec3& p) { return map.index_of(p); }

/// Every voxel of the map sorted by center distance to the hand, ties broken
/// lexicographically on (x, y, z).
std::vector<VoxelIndex> voxels_by_hand_proximity(const VoxelMap& map, const Pose& hand);

}  // namespace handover
