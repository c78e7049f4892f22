#include <numbers>

#include "doctest.h"
#include "plidar/box_fit.hpp"
#include "plidar/error.hpp"
#include "support.hpp"

using namespace plidar;

namespace {

// Minimum enclosing-rectangle area of the (x, z) points over a 0.1 degree sweep.
double sweep_min_area(const PointCloud& c) {
  double best = 1e300;
  for (int step = 0; step < 900; ++step) {
    const double a = step * 0.1 * std::numbers::pi / 180.0;
    const double ca = std::cos(a), sa = std::sin(a);
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
    for (const auto& p : c.points) {
      const double s = ca * p.x() + sa * p.z(), t = -sa * p.x() + ca * p.z();
      lo1 = std::min(lo1, s);
      hi1 = std::max(hi1, s);
      lo2 = std::min(lo2, t);
      hi2 = std::max(hi2, t);
    }
    best = std::min(best, (hi1 - lo1) * (hi2 - lo2));
  }
  return best;
}

PointCloud random_blob(Rng& rng, std::size_t n) {
  const Box3D region{rng.uniform(-5, 5), rng.uniform(0, 1), rng.uniform(10, 30), 1.5, rng.uniform(1, 3),
                     rng.uniform(2, 6), rng.uniform(-3, 3)};
  PointCloud c;
  while (c.size() < n) {
    const Point3 p(rng.uniform(region.x - 4, region.x + 4), rng.uniform(region.y - 0.75, region.y + 0.75),
                   rng.uniform(region.z - 4, region.z + 4));
    if (test::inside_box(region, p)) c.points.push_back(p);
  }
  return c;
}

// Uniform samples over the faces of `b` that face the camera centre.
PointCloud visible_faces(const Box3D& b, std::size_t n, Rng& rng) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const Eigen::Vector3d axes[3] = {{c, 0, -s}, {0, 1, 0}, {s, 0, c}};
  const double half[3] = {b.l / 2, b.h / 2, b.w / 2};
  struct Face {
    Eigen::Vector3d centre, u, v;
    double area;
  };
  std::vector<Face> faces;
  for (int i = 0; i < 3; ++i)
    for (int sign : {-1, 1}) {
      const Eigen::Vector3d normal = sign * axes[i];
      const Eigen::Vector3d centre = b.center() + sign * half[i] * axes[i];
      if (normal.dot(centre) >= 0) continue;
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      faces.push_back({centre, half[j] * axes[j], half[k] * axes[k], 4 * half[j] * half[k]});
    }
  double total = 0;
  for (const auto& f : faces) total += f.area;
  PointCloud out;
  for (std::size_t i = 0; i < n; ++i) {
    double pick = rng.uniform(0, total);
    std::size_t fi = 0;
    while (fi + 1 < faces.size() && pick > faces[fi].area) pick -= faces[fi++].area;
    const auto& f = faces[fi];
    out.points.push_back(f.centre + rng.uniform(-1, 1) * f.u + rng.uniform(-1, 1) * f.v);
  }
  return out;
}

PointCloud rotated(const PointCloud& c, double phi) {
  PointCloud r;
  for (const auto& p : c.points) r.points.push_back(rot_y(phi) * p);
  return r;
}

bool same_footprint(const Box3D& a, const Box3D& b, double tol) {
  const auto pa = bev_polygon(a), pb = bev_polygon(b);
  for (const auto& va : pa.vertices) {
    bool hit = false;
    for (const auto& vb : pb.vertices) hit |= std::hypot(va.x - vb.x, va.y - vb.y) < tol;
    if (!hit) return false;
  }
  return true;
}

PointCloud with_depths(const std::vector<double>& zs) {
  PointCloud c;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    c.points.push_back({double(i) * 0.01, 0, zs[i]});
    c.provenance.push_back({double(i), 0});
  }
  return c;
}

}  // namespace

TEST_SUITE("box_fit") {
  TEST_CASE("exact corners recover the box") {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      const Box3D truth{rng.uniform(-10, 10), rng.uniform(0, 2), rng.uniform(5, 50), rng.uniform(1, 2),
                        rng.uniform(1, 2), rng.uniform(2.1, 5), rng.uniform(-3.1, 3.1)};
      PointCloud c;
      for (const auto& p : corners(truth)) c.points.push_back(p);
      const Box3D fit = fit_box_baseline(c);
      CHECK(iou3d(fit, truth) >= 1 - 1e-9);
      CHECK(fit.l >= fit.w);
      CHECK(fit.theta > -std::numbers::pi / 2);
      CHECK(fit.theta <= std::numbers::pi / 2);
    }
  }

  TEST_CASE("footprint against a brute-force sweep") {
    Rng rng(2);
    for (int i = 0; i < 30; ++i) {
      const PointCloud c = random_blob(rng, 150);
      const Box3D fit = fit_box_baseline(c);
      const double sweep = sweep_min_area(c);
      CHECK(fit.l * fit.w <= (1 + kFootprintAreaTieTolerance) * sweep);
      CHECK(fit.l * fit.w >= 0.99 * sweep);
      for (const auto& p : c.points) CHECK(test::inside_footprint(fit, p.x(), p.z(), 1e-9));
      double lo = 1e300, hi = -1e300;
      for (const auto& p : c.points) {
        lo = std::min(lo, p.y());
        hi = std::max(hi, p.y());
      }
      CHECK(fit.h == doctest::Approx(hi - lo));
      CHECK(fit.y == doctest::Approx((hi + lo) / 2));
    }
  }

  TEST_CASE("rotating the cloud rotates the footprint") {
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
      const PointCloud c = random_blob(rng, 120);
      const double phi = rng.uniform(-3, 3);
      const Box3D a = fit_box_baseline(c);
      Box3D expect = a;
      const Point3 centre = rot_y(phi) * a.center();
      expect.x = centre.x();
      expect.z = centre.z();
      expect.theta = a.theta + phi;
      CHECK(same_footprint(fit_box_baseline(rotated(c, phi)), expect, 1e-6));
    }
  }

  TEST_CASE("visible faces only") {
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
      Box3D truth{rng.uniform(-8, 8), 0.0, rng.uniform(10, 40), rng.uniform(1.4, 1.7), rng.uniform(1.5, 1.9),
                  rng.uniform(3.5, 4.6), rng.uniform(-3.1, 3.1)};
      CAPTURE(truth.theta);
      // Camera at mid-height, so only side faces are seen.
      const PointCloud c = visible_faces(truth, 5000, rng);
      Box3D fit;
      try {
        fit = fit_box_baseline(c);
      } catch (const DegenerateInputError&) {
        continue;  // a single face seen straight on
      }
      CHECK(iou3d(fit, truth) >= 0.85);
    }
  }

  TEST_CASE("degenerate clouds") {
    PointCloud dup;
    for (int i = 0; i < 10; ++i) dup.points.push_back({1, 2, 3});
    CHECK_THROWS_AS(fit_box_baseline(dup), DegenerateInputError);
    CHECK_THROWS_AS(fit_box_with_prior(dup, {}, Point3::Zero()), DegenerateInputError);

    PointCloud two;
    two.points = {{0, 0, 10}, {1, 0, 10}};
    CHECK_THROWS_AS(fit_box_baseline(two), DegenerateInputError);

    PointCloud line;
    for (int i = 0; i < 10; ++i) line.points.push_back({double(i), double(i % 3), 10 + 0.5 * i});
    CHECK_THROWS_AS(fit_box_baseline(line), DegenerateInputError);
  }

  TEST_CASE("trim_outliers") {
    Rng rng(5);
    std::vector<double> zs;
    for (int i = 0; i < 90; ++i) zs.push_back(rng.uniform(9.5, 10.5));
    for (int i = 0; i < 10; ++i) zs.push_back(30 + 0.01 * i);
    const PointCloud c = with_depths(zs);
    const PointCloud t = trim_outliers(c, 0.1);
    CHECK(t.size() == 80);
    for (const auto& p : t.points) CHECK(p.z() < 11);
    // Survivors keep input order and provenance.
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.provenance[i].u > t.provenance[i - 1].u);

    const PointCloud same = trim_outliers(c, 0.0);
    CHECK(same.points == c.points);

    for (std::size_t n : {7u, 10u, 33u, 101u})
      for (double k : {0.05, 0.1, 0.25, 0.45}) {
        std::vector<double> d;
        for (std::size_t i = 0; i < n; ++i) d.push_back(rng.uniform(5, 50));
        CHECK(trim_outliers(with_depths(d), k).size() == n - 2 * std::size_t(std::floor(k * double(n))));
      }

    const PointCloud flat = with_depths(std::vector<double>(40, 12.0));
    CHECK(trim_outliers(flat, 0.3).size() == 40);

    CHECK_THROWS_AS(trim_outliers(PointCloud{}, 0.1), InvalidInputError);
    CHECK_THROWS_AS(trim_outliers(c, 0.5), InvalidInputError);
    CHECK_THROWS_AS(trim_outliers(c, -0.1), InvalidInputError);
  }

  TEST_CASE("prior completion of a long face seen straight on") {
    const SizePrior prior;
    PointCloud c;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 10; ++j) c.points.push_back({-1.95 + 3.9 * i / 40.0, 0.2 + 1.45 * j / 10.0, 20.0});
    CHECK_THROWS_AS(fit_box_baseline(c), DegenerateInputError);
    const Box3D b = fit_box_with_prior(c, prior, Point3::Zero());
    CHECK(b.l == doctest::Approx(3.9));
    CHECK(b.w == doctest::Approx(prior.w));
    CHECK(b.h == doctest::Approx(1.45));
    CHECK(b.x == doctest::Approx(0).epsilon(1e-9));
    CHECK(b.z == doctest::Approx(20 + prior.w / 2));
  }

  TEST_CASE("prior completion of a short face") {
    const SizePrior prior;
    PointCloud c;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 10; ++j) c.points.push_back({2 + 1.7 * i / 20.0, 0.2 + 1.4 * j / 10.0, 15.0});
    const Box3D b = fit_box_with_prior(c, prior, Point3::Zero());
    CHECK(b.l == doctest::Approx(prior.l));
    CHECK(b.w == doctest::Approx(1.7));
    CHECK(b.x == doctest::Approx(2.85));
    CHECK(b.z == doctest::Approx(15 + prior.l / 2));
    CHECK(std::abs(std::abs(b.theta) - std::numbers::pi / 2) < 1e-9);
  }

  TEST_CASE("prior completion of a face plus a sliver") {
    const SizePrior prior;
    // Rear (1.6 m across x at z = 20) and 2 m of the side running away along z.
    PointCloud c;
    for (int i = 0; i <= 16; ++i)
      for (double y : {0.3, 1.0, 1.6}) c.points.push_back({-0.8 + 0.1 * i, y, 20.0});
    for (int i = 1; i <= 20; ++i)
      for (double y : {0.3, 1.0, 1.6}) c.points.push_back({0.8, y, 20.0 + 0.1 * i});
    const Box3D fit = fit_box_baseline(c);
    CHECK(fit.l == doctest::Approx(2.0));
    const Box3D b = fit_box_with_prior(c, prior, Point3::Zero());
    CHECK(b.l == doctest::Approx(prior.l));
    CHECK(b.w == doctest::Approx(1.6));
    CHECK(b.z == doctest::Approx(20 + prior.l / 2));
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("plausible boxes are left alone") {
    const Box3D b{1, 0.8, 20, 1.5, 1.7, 4.1, 0.3};
    CHECK(complete_with_prior(b, SizePrior{}, Point3::Zero()) == b);
  }
}
