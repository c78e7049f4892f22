#include "plidar/camera_geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "plidar/error.hpp"

namespace plidar {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidInputError("camera focal lengths must be positive and finite");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(bx) || !std::isfinite(by)) {
    throw InvalidInputError("camera principal point and baseline must be finite");
  }
}

CameraIntrinsics CameraIntrinsics::scaled(double s) const {
  return {fx * s, fy * s, cx * s, cy * s, bx, by};
}

void CameraPose::validate() const {
  constexpr double kTol = 1e-9;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidInputError("camera pose must be finite");
  }
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kTol) {
    throw InvalidInputError("camera rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > kTol) {
    throw InvalidInputError("camera rotation must have determinant +1");
  }
}

Eigen::Matrix3d rot_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

Point3 unproject(PixelCoord pixel, double depth, const CameraIntrinsics& intr) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw InvalidInputError("unproject: depth must be positive and finite, got " + std::to_string(depth));
  }
  return {(pixel.u - intr.cx) * depth / intr.fx - intr.bx,
          (pixel.v - intr.cy) * depth / intr.fy - intr.by,
          depth};
}

Projection project(const Point3& point, const CameraIntrinsics& intr) {
  const double z = point.z();
  if (!(z > 0.0)) {
    throw BehindCameraError("project: point is not in front of the camera (z = " + std::to_string(z) + ")");
  }
  return {{intr.fx * (point.x() + intr.bx) / z + intr.cx,
           intr.fy * (point.y() + intr.by) / z + intr.cy},
          z};
}

Point3 camera_to_world(const Point3& point, const CameraPose& pose) {
  return pose.rotation.transpose() * (point - pose.translation);
}

Point3 world_to_camera(const Point3& point, const CameraPose& pose) {
  return pose.rotation * point + pose.translation;
}

}  // namespace plidar
