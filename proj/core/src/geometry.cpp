#include "handover/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "handover/errors.hpp"

namespace handover {

bool Pose::valid() const {
  return position.allFinite() && orientation.coeffs().allFinite() &&
         std::abs(orientation.norm() - 1.0) <= 1e-9;
}

Pose Pose::compose(const Pose& child) const {
  return Pose(position + orientation * child.position, orientation * child.orientation);
}

double point_distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double point_distance(const Pose& a, const Pose& b) {
  return point_distance(a.position, b.position);
}

double angular_distance(const Quat& a, const Quat& b) {
  // Relative rotation r = a^-1 b; its angle is 2*atan2(|vec|, |w|). Taking |w|
  // folds the double cover and keeps precision near zero, unlike acos.
  const Quat r = a.conjugate() * b;
  const double angle = 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
  return angle * 180.0 / M_PI;
}

VoxelMap::VoxelMap(const Vec3& origin, double resolution, std::array<int, 3> dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("VoxelMap resolution must be positive and finite");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("VoxelMap dims must all be >= 1");
  }
  if (!origin.allFinite()) throw std::invalid_argument("VoxelMap origin must be finite");
}

Vec3 VoxelMap::upper_corner() const {
  return origin_ + resolution_ * Vec3(dims_[0], dims_[1], dims_[2]);
}

bool VoxelMap::contains(const Vec3& p) const {
  for (int axis = 0; axis < 3; ++axis) {
    const double rel = (p[axis] - origin_[axis]) / resolution_;
    if (!(rel >= 0.0) || rel >= dims_[axis]) return false;
  }
  return true;
}

VoxelIndex VoxelMap::index_of(const Vec3& p) const {
  std::array<int, 3> idx{};
  for (int axis = 0; axis < 3; ++axis) {
    const double rel = (p[axis] - origin_[axis]) / resolution_;
    if (!(rel >= 0.0) || rel >= dims_[axis]) {
      throw OutOfBounds("point outside voxel map on axis " + std::to_string(axis));
    }
    idx[axis] = static_cast<int>(std::floor(rel));
  }
  return {idx[0], idx[1], idx[2]};
}

Vec3 VoxelMap::center(const VoxelIndex& v) const {
  return origin_ + resolution_ * Vec3(v.x + 0.5, v.y + 0.5, v.z + 0.5);
}

std::vector<VoxelIndex> voxels_by_hand_proximity(const VoxelMap& map, const Pose& hand) {
  struct Keyed {
    double distance;
    VoxelIndex voxel;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(map.size());
  const auto& d = map.dims();
  for (int x = 0; x < d[0]; ++x) {
    for (int y = 0; y < d[1]; ++y) {
      for (int z = 0; z < d[2]; ++z) {
        const VoxelIndex v{x, y, z};
        keyed.push_back({point_distance(map.center(v), hand.position), v});
      }
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.voxel < b.voxel;
  });
  std::vector<VoxelIndex> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.voxel);
  return out;
}

}  // namespace handover
