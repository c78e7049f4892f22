#include "plidar/box_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "plidar/error.hpp"

namespace plidar {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

struct Footprint {
  Point2 axis;  // unit direction of the first extent
  double a0, a1, b0, b1;
  double area() const { return (a1 - a0) * (b1 - b0); }
};

Footprint footprint_along(const std::vector<Point2>& hull, Point2 axis) {
  const Point2 normal{-axis.y, axis.x};
  Footprint f{axis, std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
              std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (const auto& p : hull) {
    const double a = p.x * axis.x + p.y * axis.y;
    const double b = p.x * normal.x + p.y * normal.y;
    f.a0 = std::min(f.a0, a);
    f.a1 = std::max(f.a1, a);
    f.b0 = std::min(f.b0, b);
    f.b1 = std::max(f.b1, b);
  }
  return f;
}

double fold_heading(Point2 length_dir) {
  // The local x axis maps to (cos theta, -sin theta) in (x, z).
  double theta = std::atan2(-length_dir.y, length_dir.x);
  if (theta > std::numbers::pi / 2) theta -= std::numbers::pi;
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  return theta;
}

// Mean distance from each point to the nearest footprint edge.
double boundary_distance(const Footprint& f, const std::vector<Point2>& pts) {
  const Point2 normal{-f.axis.y, f.axis.x};
  double sum = 0.0;
  for (const auto& p : pts) {
    const double a = p.x * f.axis.x + p.y * f.axis.y;
    const double b = p.x * normal.x + p.y * normal.y;
    sum += std::max(0.0, std::min({a - f.a0, f.a1 - a, b - f.b0, f.b1 - b}));
  }
  return sum / double(pts.size());
}

}  // namespace

Box3D fit_box_baseline(const PointCloud& cloud) {
  if (cloud.size() < 3) throw DegenerateInputError("fit_box_baseline: need at least 3 points");

  std::vector<Point2> bev;
  bev.reserve(cloud.size());
  double ymin = std::numeric_limits<double>::max();
  double ymax = std::numeric_limits<double>::lowest();
  for (const auto& p : cloud.points) {
    bev.push_back({p.x(), p.z()});
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }

  const std::vector<Point2> hull = convex_hull(bev);
  if (hull.size() < 3 || polygon_area(hull) <= 1e-12) {
    throw DegenerateInputError("fit_box_baseline: footprint points are collinear");
  }

  // Every edge of the hull is flush with one side of some candidate; the
  // minimum-area enclosing rectangle is among them.
  std::vector<Footprint> candidates;
  candidates.reserve(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& p = hull[i];
    const Point2& q = hull[(i + 1) % hull.size()];
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    if (len <= 0.0) continue;
    candidates.push_back(footprint_along(hull, {(q.x - p.x) / len, (q.y - p.y) / len}));
  }
  double min_area = std::numeric_limits<double>::max();
  for (const auto& c : candidates) min_area = std::min(min_area, c.area());

  const Footprint* best = nullptr;
  double best_dist = std::numeric_limits<double>::max();
  for (const auto& c : candidates) {
    if (c.area() > min_area * (1.0 + kFootprintAreaTieTolerance)) continue;
    const double d = boundary_distance(c, bev);
    if (d < best_dist) {
      best_dist = d;
      best = &c;
    }
  }

  const Footprint& f = *best;
  const Point2 normal{-f.axis.y, f.axis.x};
  const double ca = 0.5 * (f.a0 + f.a1);
  const double cb = 0.5 * (f.b0 + f.b1);
  const double ext_a = f.a1 - f.a0;
  const double ext_b = f.b1 - f.b0;

  Box3D box;
  box.x = ca * f.axis.x + cb * normal.x;
  box.z = ca * f.axis.y + cb * normal.y;
  box.y = 0.5 * (ymin + ymax);
  box.h = ymax - ymin;
  Point2 length_dir = f.axis;
  if (ext_a >= ext_b) {
    box.l = ext_a;
    box.w = ext_b;
  } else {
    box.l = ext_b;
    box.w = ext_a;
    length_dir = normal;
  }
  box.theta = fold_heading(length_dir);
  return box;
}

Box3D complete_with_prior(const Box3D& fit, const SizePrior& prior, const Point3& viewpoint) {
  const bool thin = fit.w < kPartialExtentFraction * prior.w;
  const bool short_box = fit.l < kPartialExtentFraction * prior.l;
  if (!thin && !short_box) return fit;

  const double c = std::cos(fit.theta), s = std::sin(fit.theta);
  const Point2 d{c, -s};  // length axis
  const Point2 n{s, c};   // width axis
  const Point2 to_box{fit.x - viewpoint.x(), fit.z - viewpoint.z()};
  auto dot = [](Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; };

  // Extents along d and n after completion, and which axis grows.
  double ext_d = fit.l, ext_n = fit.w;
  bool grow_n = true;
  if (thin) {
    if (fit.l >= 0.5 * (prior.w + prior.l)) {
      ext_n = prior.w;
    } else {
      ext_n = prior.l;
    }
  } else {
    grow_n = std::abs(dot(to_box, n)) >= std::abs(dot(to_box, d));
    if (grow_n) {
      ext_n = prior.l;
    } else {
      ext_d = prior.l;
    }
  }

  const Point2 axis = grow_n ? n : d;
  const double old_ext = grow_n ? fit.w : fit.l;
  const double new_ext = grow_n ? ext_n : ext_d;
  const double side = dot(to_box, axis) < 0.0 ? -1.0 : 1.0;
  const double shift = side * 0.5 * (new_ext - old_ext);

  Box3D box = fit;
  box.x += shift * axis.x;
  box.z += shift * axis.y;
  if (ext_d >= ext_n) {
    box.l = ext_d;
    box.w = ext_n;
    box.theta = fold_heading(d);
  } else {
    box.l = ext_n;
    box.w = ext_d;
    box.theta = fold_heading(n);
  }
  return box;
}

Box3D fit_box_with_prior(const PointCloud& cloud, const SizePrior& prior, const Point3& viewpoint) {
  Box3D fit;
  try {
    fit = fit_box_baseline(cloud);
  } catch (const DegenerateInputError&) {
    if (cloud.size() < 3) throw;
    // Collinear footprint: take the segment between the extreme points.
    const Point3& p0 = cloud.points.front();
    std::size_t far = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double d = std::hypot(cloud.points[i].x() - p0.x(), cloud.points[i].z() - p0.z());
      if (d > best) {
        best = d;
        far = i;
      }
    }
    if (best <= 1e-9) throw;
    const Point2 dir{(cloud.points[far].x() - p0.x()) / best, (cloud.points[far].z() - p0.z()) / best};
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    double ymin = lo, ymax = hi;
    for (const auto& p : cloud.points) {
      const double t = (p.x() - p0.x()) * dir.x + (p.z() - p0.z()) * dir.y;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    const double mid = 0.5 * (lo + hi);
    fit.x = p0.x() + mid * dir.x;
    fit.z = p0.z() + mid * dir.y;
    fit.y = 0.5 * (ymin + ymax);
    fit.h = ymax - ymin;
    fit.l = hi - lo;
    fit.w = 0.0;
    fit.theta = fold_heading(dir);
  }
  return complete_with_prior(fit, prior, viewpoint);
}

PointCloud trim_outliers(const PointCloud& cloud, double k) {
  if (!(k >= 0.0 && k < 0.5)) throw InvalidInputError("trim_outliers: k must be in [0, 0.5)");
  if (cloud.empty()) throw InvalidInputError("trim_outliers: empty cloud");

  const std::size_t n = cloud.size();
  std::vector<double> zs(n);
  for (std::size_t i = 0; i < n; ++i) zs[i] = cloud.points[i].z();
  std::vector<double> sorted = zs;
  std::sort(sorted.begin(), sorted.end());
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  const auto per_side = static_cast<std::size_t>(std::floor(k * double(n)));
  std::vector<std::size_t> below, above;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = zs[i] - median;
    if (d < -1e-9) below.push_back(i);
    if (d > 1e-9) above.push_back(i);
  }
  std::vector<std::uint8_t> drop(n, 0);
  auto drop_farthest = [&](std::vector<std::size_t>& side) {
    std::stable_sort(side.begin(), side.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(zs[a] - median) > std::abs(zs[b] - median);
    });
    for (std::size_t j = 0; j < std::min(per_side, side.size()); ++j) drop[side[j]] = 1;
  };
  drop_farthest(below);
  drop_farthest(above);

  PointCloud out;
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_provenance()) out.provenance.push_back(cloud.provenance[i]);
  }
  return out;
}

}  // namespace plidar
