#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "plidar/camera_geometry.hpp"
#include "plidar/types.hpp"

namespace plidar {

/// Oriented 3D box: geometric center in camera coordinates (y down), size,
/// and heading about the camera y axis.
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double theta = 0.0;

  Point3 center() const { return {x, y, z}; }
  double volume() const { return h * w * l; }

  /// Packs into (x, y, z, h, w, l, theta).
  std::array<double, 7> params() const { return {x, y, z, h, w, l, theta}; }
  static Box3D from_params(std::span<const double, 7> p);

  /// Throws InvalidInputError on negative or non-finite sizes.
  void validate() const;

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Ground-plane footprint, vertices (x, z) in counter-clockwise order.
struct BevPolygon {
  std::array<Point2, 4> vertices;

  double area() const;
};

/// Local corner offsets in units of (l/2, h/2, w/2).
///
/// Indices 0-3 form the top face (y = -h/2), counter-clockwise in the (x, z)
/// plane starting at (+l/2, +w/2); 4-7 are the matching bottom-face corners.
inline constexpr std::array<std::array<int, 3>, 8> kCornerSigns{{
    {+1, -1, +1}, {-1, -1, +1}, {-1, -1, -1}, {+1, -1, -1},
    {+1, +1, +1}, {-1, +1, +1}, {-1, +1, -1}, {+1, +1, -1},
}};

std::array<Point3, 8> corners(const Box3D& box);

/// Corner-wise projection; throws BehindCameraError if any corner has z <= 0.
std::array<PixelCoord, 8> project_box(const Box3D& box, const CameraIntrinsics& intr);

/// Smallest axis-aligned rectangle enclosing the points.
Rect mbr(std::span<const PixelCoord> points);

/// Pixel-tight bounds of mask value `id`, extents counted in whole pixels.
/// Throws NotFoundError when the id does not occur.
Rect mask_mbr(const InstanceMap& mask, std::uint32_t id);

double iou2d(const Rect& a, const Rect& b);

BevPolygon bev_polygon(const Box3D& box);

/// Area of the intersection of two convex counter-clockwise polygons.
double convex_intersection_area(std::span<const Point2> subject, std::span<const Point2> clip);

double polygon_area(std::span<const Point2> poly);

double iou_bev(const Box3D& a, const Box3D& b);

double iou3d(const Box3D& a, const Box3D& b);

}  // namespace plidar
