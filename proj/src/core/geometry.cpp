#include "stereoscan/core/geometry.hpp"

#include <cmath>

namespace stereoscan {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0)) throw Error("intrinsics: fx must be > 0");
  if (!(fy > 0.0)) throw Error("intrinsics: fy must be > 0");
  if (width <= 0) throw Error("intrinsics: width must be > 0");
  if (height <= 0) throw Error("intrinsics: height must be > 0");
  if (!(cx >= 0.0 && cx < width)) throw Error("intrinsics: cx out of image bounds");
  if (!(cy >= 0.0 && cy < height)) throw Error("intrinsics: cy out of image bounds");
}

void StereoRig::validate() const {
  intrinsics.validate();
  if (!(baseline_mm > 0.0)) throw Error("rig: baseline_mm must be > 0");
}

Vec2 project_point(const Vec3& p_cam, const CameraIntrinsics& k) {
  if (!(p_cam.z() > 0.0)) {
    throw Error("project_point: point is behind the camera (z <= 0)");
  }
  return Vec2(k.cx + k.fx * p_cam.x() / p_cam.z(),
              k.cy + k.fy * p_cam.y() / p_cam.z());
}

double disparity_to_depth(double disparity_px, const StereoRig& rig) {
  if (!(disparity_px > 0.0)) {
    throw Error("disparity_to_depth: invalid disparity (d <= 0)");
  }
  return rig.intrinsics.fx * rig.baseline_mm / disparity_px;
}

Vec3 backproject(const Vec2& pixel, double z, const CameraIntrinsics& k) {
  return Vec3(z * (pixel.x() - k.cx) / k.fx,
              z * (pixel.y() - k.cy) / k.fy,
              z);
}

Vec3 euler_zyx(const Mat3& r) {
  // R = Rz(yaw) * Ry(pitch) * Rx(roll)
  const double sin_pitch = -r(2, 0);
  double yaw, pitch, roll;
  if (std::abs(sin_pitch) > 1.0 - 1e-12) {
    // Gimbal lock: roll is unobservable, fold it into yaw.
    pitch = std::copysign(M_PI / 2.0, sin_pitch);
    yaw = std::atan2(-r(0, 1), r(1, 1));
    roll = 0.0;
  } else {
    pitch = std::asin(sin_pitch);
    yaw = std::atan2(r(1, 0), r(0, 0));
    roll = std::atan2(r(2, 1), r(2, 2));
  }
  return Vec3(yaw, pitch, roll);
}

double pose_difference(const RigidPose& a, const RigidPose& b) {
  const Vec3 t_diff = a.translation - b.translation;
  const Mat3 rel = (a.rotation * b.rotation.conjugate()).toRotationMatrix();
  const double e = euler_zyx(rel).norm();
  return t_diff.norm() + 20.0 * std::min(e, 2.0 * M_PI - e);
}

RigidPose apply_twist(const RigidPose& pose, const Eigen::Matrix<double, 6, 1>& twist) {
  const Vec3 omega = twist.head<3>();
  RigidPose out;
  const double angle = omega.norm();
  Quat dq = Quat::Identity();
  if (angle > 0.0) {
    dq = Quat(Eigen::AngleAxisd(angle, omega / angle));
  }
  out.rotation = (dq * pose.rotation).normalized();
  out.translation = pose.translation + twist.tail<3>();
  return out;
}

double rotation_angle_between(const RigidPose& a, const RigidPose& b) {
  return a.rotation.angularDistance(b.rotation);
}

}  // namespace stereoscan
