#include <numbers>

#include "doctest.h"
#include "plidar/consistency.hpp"
#include "plidar/error.hpp"
#include "plidar/synth.hpp"
#include "support.hpp"

using namespace plidar;

namespace {

CameraIntrinsics camera() { return synth::kitti_camera(); }

Box3D random_car(Rng& rng) {
  Box3D b;
  b.z = rng.uniform(8, 40);
  b.x = rng.uniform(-0.3, 0.3) * b.z;
  b.h = rng.uniform(1.4, 1.7);
  b.w = rng.uniform(1.5, 1.9);
  b.l = rng.uniform(3.5, 4.6);
  b.y = 1.65 - b.h / 2;
  b.theta = rng.uniform(-3.1, 3.1);
  return b;
}

// Smallest gap between the extreme corner and the runner-up, over the four MBR sides.
// Corners on one vertical edge share u, so columns use the top face only.
double achiever_gap(const Box3D& b, const CameraIntrinsics& k) {
  const auto px = project_box(b, k);
  std::vector<double> us, vs;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (i < 4) us.push_back(px[i].u);
    vs.push_back(px[i].v);
  }
  std::sort(us.begin(), us.end());
  std::sort(vs.begin(), vs.end());
  return std::min({us[1] - us[0], us[3] - us[2], vs[1] - vs[0], vs[7] - vs[6]});
}

double objective_sphere(std::span<const double> p) {
  double s = 0;
  for (double v : p) s += v * v;
  return s;
}

}  // namespace

TEST_SUITE("consistency") {
  TEST_CASE("smooth_l1 examples") {
    auto r = smooth_l1(0);
    CHECK(r.value == 0);
    CHECK(r.derivative == 0);
    r = smooth_l1(0.5);
    CHECK(r.value == 0.125);
    CHECK(r.derivative == 0.5);
    r = smooth_l1(2);
    CHECK(r.value == 1.5);
    CHECK(r.derivative == 1);
    r = smooth_l1(-3);
    CHECK(r.value == 2.5);
    CHECK(r.derivative == -1);
    r = smooth_l1(0.5, 2.0);
    CHECK(r.value == 0.0625);
    CHECK(r.derivative == 0.25);
  }

  TEST_CASE("bbc_loss examples") {
    const auto k = camera();
    const Box3D b{1, 0.9, 15, 1.5, 1.7, 4, 0.6};
    const Rect t = mbr(project_box(b, k));
    CHECK(bbc_loss(b, t, k) == 0.0);
    for (double r : bbc_residuals(b, t, k)) CHECK(r == 0.0);
    for (double g : bbc_gradient(b, t, k)) CHECK(g == 0.0);

    Rect shifted = t;
    shifted.x += 3;
    CHECK(bbc_loss(b, shifted, k) == doctest::Approx(2.5).epsilon(1e-12));
    const auto res = bbc_residuals(b, shifted, k);
    CHECK(res[0] == doctest::Approx(-3));
    CHECK(res[1] == 0);

    auto px = project_box(b, k);
    std::reverse(px.begin(), px.end());
    std::rotate(px.begin(), px.begin() + 3, px.end());
    CHECK(mbr(px) == t);

    Box3D behind = b;
    behind.z = 1;
    CHECK_THROWS_AS(bbc_loss(behind, t, k), BehindCameraError);
  }

  TEST_CASE("gradient sign probe") {
    CameraIntrinsics k = camera();
    k.bx = k.by = 0;
    const Box3D b{0, 0.8, 20, 1.5, 1.6, 4, 0};
    Rect t = mbr(project_box(b, k));
    t.x += 5;  // proposal sits to the right: moving the box toward +x helps
    const auto g = bbc_gradient(b, t, k);
    CHECK(g[0] < 0);
    t.x -= 10;
    CHECK(bbc_gradient(b, t, k)[0] > 0);
  }

  TEST_CASE("gradient matches central differences") {
    const auto k = camera();
    Rng rng(2024);
    int checked = 0;
    while (checked < 50) {
      const Box3D b = random_car(rng);
      if (achiever_gap(b, k) < 0.05) continue;
      Rect t = mbr(project_box(b, k));
      t.x += rng.uniform(-8, 8);
      t.y += rng.uniform(-8, 8);
      t.w *= rng.uniform(0.7, 1.3);
      t.h *= rng.uniform(0.7, 1.3);
      bool near_kink = false;
      for (double r : bbc_residuals(b, t, k)) near_kink |= std::abs(std::abs(r) - 1.0) < 0.01;
      if (near_kink) continue;

      const auto g = bbc_gradient(b, t, k);
      const auto p = b.params();
      double err = 0, scale = 0;
      for (int i = 0; i < 7; ++i) {
        const double h = 1e-5;
        auto hi = p, lo = p;
        hi[i] += h;
        lo[i] -= h;
        const double fd = (bbc_loss(Box3D::from_params(hi), t, k) - bbc_loss(Box3D::from_params(lo), t, k)) / (2 * h);
        err = std::max(err, std::abs(g[i] - fd));
        scale = std::max(scale, std::abs(fd));
      }
      REQUIRE(scale > 1e-6);
      CHECK(err / scale <= 1e-4);
      ++checked;
    }
  }

  TEST_CASE("residuals scale with the image") {
    const auto k = camera();
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
      const Box3D b = random_car(rng);
      Rect t = mbr(project_box(b, k));
      t.x += rng.uniform(-5, 5);
      t.w += rng.uniform(-5, 5);
      const double s = rng.uniform(0.3, 3);
      const Rect ts{t.x * s, t.y * s, t.w * s, t.h * s};
      const auto r = bbc_residuals(b, t, k);
      const auto rs = bbc_residuals(b, ts, k.scaled(s));
      for (int j = 0; j < 4; ++j) CHECK(std::abs(rs[j] - s * r[j]) <= 1e-9 * std::max(1.0, std::abs(s * r[j])));
    }
  }

  TEST_CASE("depth_linear_bounds") {
    BoundCoefficients c;
    c.a.fill(0);
    c.b.fill(0);
    c.a[0] = 1;
    const Box3D near{2, 1, 10, 1.5, 1.6, 4, 0.3};
    ParamBounds pb = depth_linear_bounds(near, c);
    CHECK(pb.low[0] == 1);
    CHECK(pb.high[0] == 3);
    Box3D farb = near;
    farb.z = 40;
    pb = depth_linear_bounds(farb, c);
    CHECK(pb.low[0] == 1);
    CHECK(pb.high[0] == 3);

    c.a[2] = 0.5;
    c.b[2] = 0.1;
    Box3D z20 = near;
    z20.z = 20;
    pb = depth_linear_bounds(z20, c);
    CHECK(pb.high[2] - 20 == doctest::Approx(2.5));
    CHECK(20 - pb.low[2] == doctest::Approx(2.5));

    const auto p10 = depth_linear_bounds(near), p40 = depth_linear_bounds(farb);
    for (int i = 0; i < 7; ++i) CHECK(p40.high[i] - p40.low[i] >= p10.high[i] - p10.low[i] - 1e-12);
    CHECK(p10.contains(near.params()));

    BoundCoefficients wide;
    wide.a = {1, 1, 1, 5, 5, 5, 9};
    pb = depth_linear_bounds(near, wide);
    CHECK(pb.low[3] == 0);
    CHECK(pb.low[4] == 0);
    CHECK(pb.high[6] - pb.low[6] == doctest::Approx(2 * std::numbers::pi));

    Box3D bad = near;
    bad.z = -1;
    CHECK_THROWS_AS(depth_linear_bounds(bad), InvalidInputError);
  }

  TEST_CASE("differential evolution: sphere") {
    std::vector<double> lo(7, -5), hi(7, 5), init(7, 1);
    DEConfig cfg;
    cfg.seed = 3;
    const DEResult r = differential_evolution(objective_sphere, lo, hi, cfg, init);
    CHECK(r.value <= 1e-3);
    CHECK(r.value <= objective_sphere(init));
    CHECK(r.generations <= 200);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  }

  TEST_CASE("differential evolution: sphere to 1e-6 with default settings") {
    std::vector<double> lo(7, -5), hi(7, 5), init(7, 1);
    DEConfig cfg;
    cfg.seed = 3;
    const DEResult r = differential_evolution(objective_sphere, lo, hi, cfg, init);
    CHECK(r.generations <= 200);
    CHECK(r.value <= 1e-6);
  }

  TEST_CASE("differential evolution: embedded Rosenbrock") {
    auto rosen = [](std::span<const double> p) {
      return 100 * std::pow(p[1] - p[0] * p[0], 2) + std::pow(1 - p[0], 2) + p[2] + p[3] + p[4] + p[5] + p[6];
    };
    std::vector<double> lo{-2, -2, 0.5, 0.5, 0.5, 0.5, 0.5}, hi{2, 2, 0.5, 0.5, 0.5, 0.5, 0.5};
    std::vector<double> init{-1.5, 1.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    DEConfig cfg;
    cfg.seed = 17;
    cfg.max_generations = 1000;
    cfg.tol = 1e-14;
    const DEResult r = differential_evolution(rosen, lo, hi, cfg, init);
    CHECK(std::abs(r.best[0] - 1) <= 1e-3);
    CHECK(std::abs(r.best[1] - 1) <= 1e-3);
    for (int i = 2; i < 7; ++i) CHECK(r.best[i] == 0.5);
  }

  TEST_CASE("differential evolution: determinism") {
    auto f = [](std::span<const double> p) { return std::sin(3 * p[0]) + std::cos(2 * p[1] * p[2]) + p[3] * p[3] + std::abs(p[4] - p[5]) + p[6]; };
    std::vector<double> lo(7, -2), hi(7, 2), init(7, 0);
    DEConfig cfg;
    cfg.seed = 99;
    cfg.max_generations = 60;
    const DEResult a = differential_evolution(f, lo, hi, cfg, init);
    const DEResult b = differential_evolution(f, lo, hi, cfg, init);
    cfg.workers = 4;
    const DEResult c = differential_evolution(f, lo, hi, cfg, init);
    CHECK(a.best == b.best);
    CHECK(a.history == b.history);
    CHECK(a.best == c.best);
    CHECK(a.history == c.history);
    CHECK(a.evaluations == c.evaluations);
    cfg.seed = 100;
    CHECK(differential_evolution(f, lo, hi, cfg, init).history != a.history);
  }

  TEST_CASE("differential evolution: errors") {
    std::vector<double> lo(7, -1), hi(7, 1), init(7, 0);
    DEConfig cfg;
    std::vector<double> outside(7, 0);
    outside[3] = 2;
    CHECK_THROWS_AS(differential_evolution(objective_sphere, lo, hi, cfg, outside), InvalidInputError);
    std::vector<double> inverted = hi;
    inverted[0] = -2;
    CHECK_THROWS_AS(differential_evolution(objective_sphere, lo, inverted, cfg, init), InvalidInputError);
    cfg.population_size = 3;
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
    cfg = {};
    cfg.weight_f = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
    cfg = {};
    cfg.crossover_cr = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
  }

  TEST_CASE("refine_bbco keeps a consistent box consistent") {
    const auto k = camera();
    const Box3D b{-2, 0.9, 18, 1.5, 1.7, 4.2, 1.0};
    const Rect t = mbr(project_box(b, k));
    const BbcoResult r = refine_bbco(b, t, k);
    CHECK(r.initial_loss == 0.0);
    CHECK(r.final_loss == 0.0);
    CHECK(bbc_loss(r.box, t, k) == 0.0);
    CHECK_FALSE(r.improved);
  }

  TEST_CASE("refine_bbco never increases the loss") {
    const auto k = camera();
    Rng rng(31);
    DEConfig cfg;
    cfg.max_generations = 40;
    for (int i = 0; i < 25; ++i) {
      const Box3D truth = random_car(rng);
      const Rect t = mbr(project_box(truth, k));
      Box3D init = truth;
      init.x += rng.uniform(-1.5, 1.5);
      init.z += rng.uniform(-2, 2);
      init.theta = normalize_angle(init.theta + rng.uniform(-0.3, 0.3));
      cfg.seed = std::uint64_t(i);
      for (double pw : {0.0, kBbcoProximalWeight}) {
        const BbcoResult r = refine_bbco(init, t, k, cfg, {}, pw);
        CHECK(r.final_loss <= r.initial_loss);
        CHECK(bbc_loss(r.box, t, k) == doctest::Approx(r.final_loss));
        if (!r.improved) CHECK(r.box == init);
      }
    }
  }

  TEST_CASE("refine_bbco recovers a lateral shift") {
    const auto k = camera();
    const Box3D truth{3, 0.9, 25, 1.5, 1.7, 4.0, 0.4};
    const Rect t = mbr(project_box(truth, k));
    Box3D init = truth;
    init.x += 0.05 * truth.z;
    const BbcoResult r = refine_bbco(init, t, k);
    CHECK(r.improved);
    CHECK(iou2d(mbr(project_box(r.box, k)), t) >= 0.95);
    CHECK(iou3d(r.box, truth) > iou3d(init, truth));
    CHECK(r.box.theta > -std::numbers::pi);
    CHECK(r.box.theta <= std::numbers::pi);
  }

  TEST_CASE("refine_bbco input checks") {
    const auto k = camera();
    const Box3D b{0, 0.9, 18, 1.5, 1.7, 4.2, 0};
    const Rect t = mbr(project_box(b, k));
    CHECK_THROWS_AS(refine_bbco(b, t, k, {}, {}, -1.0), InvalidInputError);
    CHECK_THROWS_AS(refine_bbco(b, t, k, {}, {}, std::nan("")), InvalidInputError);
  }
}
