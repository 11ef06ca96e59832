#pragma once

#include "stereoscan/core/types.hpp"

namespace stereoscan {

// Pin-hole projection of a camera-frame point. Throws Error for p.z <= 0.
Vec2 project_point(const Vec3& p_cam, const CameraIntrinsics& k);

// Rectified-stereo depth: z = fx * baseline / d. Throws Error for d <= 0.
double disparity_to_depth(double disparity_px, const StereoRig& rig);

// Inverse of project_point at a known depth z (mm).
Vec3 backproject(const Vec2& pixel, double z, const CameraIntrinsics& k);

// Intrinsic Z-Y-X (yaw, pitch, roll) Euler angles of a rotation matrix,
// each in the signed atan2/asin range.
Vec3 euler_zyx(const Mat3& r);

// Scalar pose distance ||t_a - t_b|| + 20 * min(||E||, 2*pi - ||E||) where
// E is the Euler-angle vector of the relative rotation a * b^-1. The factor
// 20 carries units mm/radian (translations are millimeters throughout).
double pose_difference(const RigidPose& a, const RigidPose& b);

// Left-multiplicative SE(3) update: rotation <- exp(omega) * rotation,
// translation <- translation + delta_t. twist = [omega; delta_t].
RigidPose apply_twist(const RigidPose& pose, const Eigen::Matrix<double, 6, 1>& twist);

// Rotation angle (radians) between two poses' rotations.
double rotation_angle_between(const RigidPose& a, const RigidPose& b);

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace stereoscan
