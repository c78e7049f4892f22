#include "plidar/pseudolidar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plidar/error.hpp"
#include "plidar/random.hpp"

namespace plidar {

namespace {

bool passes(const Point3& p, const LiftOptions& o) {
  if (o.min_depth && p.z() < *o.min_depth) return false;
  if (o.max_depth && p.z() > *o.max_depth) return false;
  if (o.min_y && p.y() < *o.min_y) return false;
  if (o.max_y && p.y() > *o.max_y) return false;
  return true;
}

template <typename Pred>
PointCloud lift_where(const DepthMap& depth, const CameraIntrinsics& intr, int u0, int v0, int u1, int v1,
                      Pred&& keep) {
  PointCloud cloud;
  for (int v = v0; v < v1; ++v) {
    for (int u = u0; u < u1; ++u) {
      if (!depth.is_valid(u, v) || !keep(u, v)) continue;
      const PixelCoord px{double(u), double(v)};
      cloud.points.push_back(unproject(px, depth.at(u, v), intr));
      cloud.provenance.push_back(px);
    }
  }
  return cloud;
}

}  // namespace

PointCloud generate_pseudolidar(const DepthMap& depth, const CameraIntrinsics& intr,
                                const std::optional<CameraPose>& pose, const LiftOptions& options) {
  depth.validate();
  intr.validate();
  if (pose) pose->validate();

  PointCloud cloud;
  cloud.points.reserve(depth.valid_count());
  cloud.provenance.reserve(cloud.points.capacity());
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t i = depth.index(u, v);
      if (!depth.valid[i]) continue;
      const PixelCoord px{double(u), double(v)};
      const Point3 p = unproject(px, depth.depth[i], intr);
      if (!passes(p, options)) continue;
      cloud.points.push_back(pose ? camera_to_world(p, *pose) : p);
      cloud.provenance.push_back(px);
    }
  }
  return cloud;
}

PointCloud extract_frustum_mask(const DepthMap& depth, const InstanceMap& mask, std::uint32_t id,
                                const CameraIntrinsics& intr) {
  if (depth.width != mask.width || depth.height != mask.height) {
    throw InvalidInputError("extract_frustum_mask: depth and mask dimensions differ");
  }
  if (id == 0) throw InvalidInputError("extract_frustum_mask: instance id must be > 0");
  return lift_where(depth, intr, 0, 0, depth.width, depth.height,
                    [&](int u, int v) { return mask.at(u, v) == id; });
}

PointCloud extract_frustum_box(const DepthMap& depth, const Rect& rect, const CameraIntrinsics& intr) {
  // Pixel u is inside when x <= u < x + w.
  const int u0 = std::max(0, int(std::ceil(rect.x)));
  const int v0 = std::max(0, int(std::ceil(rect.y)));
  const int u1 = std::min(depth.width, int(std::ceil(rect.right())));
  const int v1 = std::min(depth.height, int(std::ceil(rect.bottom())));
  if (u0 >= u1 || v0 >= v1) return {};
  return lift_where(depth, intr, u0, v0, u1, v1, [](int, int) { return true; });
}

PointCloud sample_points(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (cloud.empty()) throw InvalidInputError("sample_points: empty cloud");
  if (n == 0) throw InvalidInputError("sample_points: sample count must be > 0");

  Rng rng(seed);
  const std::size_t size = cloud.size();
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Partial Fisher-Yates: the first min(n, size) slots become a uniform
  // sample without replacement.
  const std::size_t take = std::min(n, size);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.index(size - i);
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  while (order.size() < n) order.push_back(rng.index(size));

  PointCloud out;
  out.points.reserve(n);
  for (std::size_t i : order) out.points.push_back(cloud.points[i]);
  if (cloud.has_provenance()) {
    out.provenance.reserve(n);
    for (std::size_t i : order) out.provenance.push_back(cloud.provenance[i]);
  }
  return out;
}

}  // namespace plidar
