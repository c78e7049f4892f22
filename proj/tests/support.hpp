#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

#include "plidar/box_geometry.hpp"
#include "plidar/eval.hpp"
#include "plidar/kitti_io.hpp"
#include "plidar/random.hpp"

namespace plidar::test {

inline std::filesystem::path fixture(const std::string& name) {
#ifdef PLIDAR_FIXTURE_DIR
  return std::filesystem::path(PLIDAR_FIXTURE_DIR) / name;
#else
  return name;
#endif
}

inline kitti::Bytes read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text(const std::filesystem::path& path) {
  const kitti::Bytes b = read_bytes(path);
  return {b.begin(), b.end()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("plidar_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Box-local coordinates straight from the yaw convention: the length axis is
// (cos t, -sin t) and the width axis (sin t, cos t) in the (x, z) plane.
inline bool inside_footprint(const Box3D& b, double px, double pz, double eps = 0.0) {
  const double dx = px - b.x, dz = pz - b.z;
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const double a = c * dx - s * dz;
  const double w = s * dx + c * dz;
  return std::abs(a) <= b.l / 2 + eps && std::abs(w) <= b.w / 2 + eps;
}

inline bool inside_box(const Box3D& b, const Point3& p, double eps = 0.0) {
  return std::abs(p.y() - b.y) <= b.h / 2 + eps && inside_footprint(b, p.x(), p.z(), eps);
}

struct Aabb {
  double lo[3]{1e300, 1e300, 1e300};
  double hi[3]{-1e300, -1e300, -1e300};
  void add(const Box3D& b) {
    const double r = 0.5 * std::hypot(b.l, b.w);
    const double l[3] = {b.x - r, b.y - b.h / 2, b.z - r};
    const double h[3] = {b.x + r, b.y + b.h / 2, b.z + r};
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], l[i]);
      hi[i] = std::max(hi[i], h[i]);
    }
  }
};

/// Monte-Carlo BEV IoU with n uniform samples over the union's bounding square.
inline double mc_iou_bev(const Box3D& a, const Box3D& b, std::size_t n, Rng& rng) {
  Aabb box;
  box.add(a);
  box.add(b);
  std::size_t in_a = 0, in_b = 0, both = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(box.lo[0], box.hi[0]);
    const double z = rng.uniform(box.lo[2], box.hi[2]);
    const bool ia = inside_footprint(a, x, z), ib = inside_footprint(b, x, z);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const std::size_t uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : double(both) / double(uni);
}

inline double mc_iou3d(const Box3D& a, const Box3D& b, std::size_t n, Rng& rng) {
  Aabb box;
  box.add(a);
  box.add(b);
  std::size_t in_a = 0, in_b = 0, both = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 p(rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1]),
                   rng.uniform(box.lo[2], box.hi[2]));
    const bool ia = inside_box(a, p), ib = inside_box(b, p);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const std::size_t uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : double(both) / double(uni);
}

/// Random pair of overlapping-ish boxes (centres within a few metres).
inline std::pair<Box3D, Box3D> random_box_pair(Rng& rng) {
  auto one = [&](double cx, double cz) {
    Box3D b;
    b.x = cx + rng.uniform(-1.5, 1.5);
    b.y = rng.uniform(-0.5, 0.5);
    b.z = cz + rng.uniform(-1.5, 1.5);
    b.h = rng.uniform(0.5, 2.5);
    b.w = rng.uniform(0.5, 2.5);
    b.l = rng.uniform(0.5, 5.0);
    b.theta = rng.uniform(-3.14159, 3.14159);
    return b;
  };
  const double cx = rng.uniform(-5, 5), cz = rng.uniform(5, 40);
  return {one(cx, cz), one(cx, cz)};
}

/// Largest one-to-one matching between dets and gts where overlap[d][g] is true,
/// by exhaustive enumeration.
inline std::size_t max_matching(const std::vector<std::vector<bool>>& overlap, std::size_t n_gt) {
  std::vector<bool> used(n_gt, false);
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t d, std::size_t count) -> void {
    if (d == overlap.size()) {
      best = std::max(best, count);
      return;
    }
    self(self, d + 1, count);
    for (std::size_t g = 0; g < n_gt; ++g) {
      if (!used[g] && overlap[d][g]) {
        used[g] = true;
        self(self, d + 1, count + 1);
        used[g] = false;
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

inline eval::GroundTruthObj gt_at(double x, double z, const std::string& cls = "Car") {
  eval::GroundTruthObj g;
  g.box3d = Box3D{x, 0.9, z, 1.5, 1.7, 4.0, 0.0};
  g.box2d = Rect{100 + 60 * x, 150, 50, 45};
  g.class_name = cls;
  return g;
}

inline eval::Detection det_of(const eval::GroundTruthObj& g, double score) {
  return eval::Detection{g.box3d, g.box2d, score, "Car"};
}

inline eval::Detection far_fp(double score) {
  return eval::Detection{Box3D{-30, 0.9, 70, 1.5, 1.7, 4.0, 0.0}, Rect{1000, 10, 50, 45}, score, "Car"};
}

inline eval::EvalConfig config(eval::Metric m, double thr, eval::Difficulty d = eval::Difficulty::Moderate) {
  eval::EvalConfig c;
  c.metric = m;
  c.iou_threshold = thr;
  c.difficulty = d;
  return c;
}

struct Fixture {
  eval::PerImage dets;
  eval::PerImageGt gts;
  std::vector<std::pair<std::string, std::size_t>> far;  // pure false positives
};

// Images with pairwise-disjoint ground truths in 2D, BEV and 3D.
inline Fixture random_fixture(Rng& rng, std::size_t max_dets) {
  Fixture f;
  const std::size_t images = 1 + rng.index(5);
  for (std::size_t im = 0; im < images; ++im) {
    const std::string key = "img" + std::to_string(im);
    auto& g = f.gts[key];
    auto& d = f.dets[key];
    const std::size_t n_gt = rng.index(4);
    for (std::size_t i = 0; i < n_gt; ++i) g.push_back(gt_at(-6.0 + 4.0 * double(i), 20 + rng.uniform(-1, 1)));
    const std::size_t n_det = rng.index(max_dets + 1);
    for (std::size_t i = 0; i < n_det; ++i) {
      const double score = rng.uniform(0.01, 1.0);
      if (n_gt > 0 && rng.uniform() < 0.75) {
        eval::Detection det = det_of(g[rng.index(n_gt)], score);
        const double shift = rng.uniform(0, 1.2);
        det.box3d.x += shift;
        det.box2d.x += 25 * shift;
        det.box3d.theta = rng.uniform(-0.3, 0.3);
        d.push_back(det);
      } else {
        f.far.push_back({key, d.size()});
        d.push_back(far_fp(score));
      }
    }
  }
  return f;
}

}  // namespace plidar::test
