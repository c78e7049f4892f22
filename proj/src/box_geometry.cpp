#include "plidar/box_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "plidar/error.hpp"

namespace plidar {

namespace {

// On-edge tolerance for the clipping half-plane test (area units).
constexpr double kClipEps = 1e-12;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

Box3D Box3D::from_params(std::span<const double, 7> p) {
  return {p[0], p[1], p[2], p[3], p[4], p[5], p[6]};
}

void Box3D::validate() const {
  for (double v : params()) {
    if (!std::isfinite(v)) throw InvalidInputError("box parameters must be finite");
  }
  if (h < 0.0 || w < 0.0 || l < 0.0) throw InvalidInputError("box sizes must be non-negative");
}

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

double BevPolygon::area() const { return polygon_area(vertices); }

std::array<Point3, 8> corners(const Box3D& box) {
  const Eigen::Matrix3d r = rot_y(box.theta);
  const Point3 c = box.center();
  const Eigen::Vector3d half(box.l / 2.0, box.h / 2.0, box.w / 2.0);
  std::array<Point3, 8> out;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& s = kCornerSigns[i];
    const Eigen::Vector3d local(s[0] * half.x(), s[1] * half.y(), s[2] * half.z());
    out[i] = c + r * local;
  }
  return out;
}

std::array<PixelCoord, 8> project_box(const Box3D& box, const CameraIntrinsics& intr) {
  const auto pts = corners(box);
  std::array<PixelCoord, 8> out;
  for (std::size_t i = 0; i < 8; ++i) out[i] = project(pts[i], intr).pixel;
  return out;
}

Rect mbr(std::span<const PixelCoord> points) {
  if (points.empty()) throw InvalidInputError("mbr: empty point set");
  double umin = points[0].u, umax = points[0].u;
  double vmin = points[0].v, vmax = points[0].v;
  for (const auto& p : points.subspan(1)) {
    umin = std::min(umin, p.u);
    umax = std::max(umax, p.u);
    vmin = std::min(vmin, p.v);
    vmax = std::max(vmax, p.v);
  }
  return {umin, vmin, umax - umin, vmax - vmin};
}

Rect mask_mbr(const InstanceMap& mask, std::uint32_t id) {
  int umin = std::numeric_limits<int>::max(), vmin = std::numeric_limits<int>::max();
  int umax = -1, vmax = -1;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (mask.at(u, v) != id) continue;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (umax < 0) throw NotFoundError("mask_mbr: instance id " + std::to_string(id) + " not present");
  return {double(umin), double(vmin), double(umax - umin + 1), double(vmax - vmin + 1)};
}

double iou2d(const Rect& a, const Rect& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BevPolygon bev_polygon(const Box3D& box) {
  const auto pts = corners(box);
  BevPolygon poly;
  for (std::size_t i = 0; i < 4; ++i) poly.vertices[i] = {pts[i].x(), pts[i].z()};
  return poly;
}

double polygon_area(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

// Sutherland-Hodgman: clip `subject` successively against each edge of the
// convex counter-clockwise `clip` polygon, then take the shoelace area.
double convex_intersection_area(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> out(subject.begin(), subject.end());
  std::vector<Point2> in;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Point2& a = clip[e];
    const Point2& b = clip[(e + 1) % m];
    in.swap(out);
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& p = in[i];
      const Point2& q = in[(i + 1) % n];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      const bool p_in = dp >= -kClipEps;
      const bool q_in = dq >= -kClipEps;
      if (p_in) out.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return std::max(0.0, polygon_area(out));
}

double iou_bev(const Box3D& a, const Box3D& b) {
  const BevPolygon pa = bev_polygon(a);
  const BevPolygon pb = bev_polygon(b);
  const double inter = convex_intersection_area(pa.vertices, pb.vertices);
  const double uni = pa.area() + pb.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou3d(const Box3D& a, const Box3D& b) {
  const double top = std::max(a.y - a.h / 2.0, b.y - b.h / 2.0);
  const double bottom = std::min(a.y + a.h / 2.0, b.y + b.h / 2.0);
  const double overlap = std::max(0.0, bottom - top);
  double inter = 0.0;
  if (overlap > 0.0) {
    inter = convex_intersection_area(bev_polygon(a).vertices, bev_polygon(b).vertices) * overlap;
  }
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace plidar
