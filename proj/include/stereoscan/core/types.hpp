#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace stereoscan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Runtime failures (I/O, parse, geometry) carry a human-readable message.
// Contract violations (caller bugs) throw std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CameraIntrinsics {
  double fx = 0.0;  // focal lengths, pixels
  double fy = 0.0;
  double cx = 0.0;  // principal point, pixels
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws Error naming the first violated field.
  void validate() const;
};

struct StereoRig {
  CameraIntrinsics intrinsics;  // shared by both rectified cameras
  double baseline_mm = 0.0;

  void validate() const;
};

// Rigid transform mapping world coordinates into the camera frame:
// X_cam = R * X_world + t. Stored as unit quaternion + translation (mm);
// the rotation matrix is derived on demand.
struct RigidPose {
  Quat rotation{1.0, 0.0, 0.0, 0.0};
  Vec3 translation{0.0, 0.0, 0.0};

  static RigidPose identity() { return RigidPose{}; }

  Mat3 matrix() const { return rotation.toRotationMatrix(); }

  Vec3 apply(const Vec3& p_world) const {
    return rotation * p_world + translation;
  }

  RigidPose inverse() const {
    RigidPose out;
    out.rotation = rotation.conjugate();
    out.translation = -(out.rotation * translation);
    return out;
  }

  // this ∘ rhs: applies rhs first. The result is renormalized so long
  // composition chains stay on SO(3).
  RigidPose compose(const RigidPose& rhs) const {
    RigidPose out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    out.rotation.normalize();
    return out;
  }

  void renormalize() { rotation.normalize(); }
};

}  // namespace stereoscan
