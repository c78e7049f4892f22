#pragma once

#include <Eigen/Core>

namespace plidar {

using Point3 = Eigen::Vector3d;

/// Pinhole intrinsics. `bx`/`by` carry the translation column of a KITTI
/// 3x4 projection matrix divided by the focal lengths, so a rectified
/// camera other than the reference one projects exactly.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  double bx = 0.0;
  double by = 0.0;

  /// Throws InvalidInputError unless fx, fy > 0 and every field is finite.
  void validate() const;

  /// Same camera with every pixel quantity scaled by s (image resized by s).
  CameraIntrinsics scaled(double s) const;
};

/// Rigid pose mapping world points into the camera frame: p_cam = R p_world + t.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static CameraPose identity() { return {}; }

  /// Throws InvalidInputError unless rotation is orthonormal with det +1 (1e-9).
  void validate() const;
};

struct PixelCoord {
  double u = 0.0;  ///< column
  double v = 0.0;  ///< row

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct Projection {
  PixelCoord pixel;
  double depth = 0.0;
};

/// Rotation about the camera y axis (KITTI rotation_y convention).
Eigen::Matrix3d rot_y(double angle);

/// Lifts a pixel with metric depth into camera coordinates.
/// Throws InvalidInputError for non-positive or non-finite depth.
Point3 unproject(PixelCoord pixel, double depth, const CameraIntrinsics& intr);

/// Projects a camera-frame point. Throws BehindCameraError when z <= 0.
Projection project(const Point3& point, const CameraIntrinsics& intr);

/// Inverse of the rigid map: R^T (p - t).
Point3 camera_to_world(const Point3& point, const CameraPose& pose);

Point3 world_to_camera(const Point3& point, const CameraPose& pose);

}  // namespace plidar
