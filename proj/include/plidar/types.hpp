#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "plidar/camera_geometry.hpp"

namespace plidar {

/// Axis-aligned image rectangle: top-left corner and extent, in pixels.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Per-pixel metric depth, row-major. Invalid pixels carry depth 0.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), depth(std::size_t(w) * h, 0.0), valid(std::size_t(w) * h, 0) {}

  std::size_t index(int u, int v) const { return std::size_t(v) * width + u; }
  bool is_valid(int u, int v) const { return valid[index(u, v)] != 0; }
  double at(int u, int v) const { return depth[index(u, v)]; }

  /// Marks (u, v) valid with the given depth, or invalid when depth is not
  /// positive and finite.
  void set(int u, int v, double d);

  std::size_t valid_count() const;

  /// Throws InvalidInputError if sizes disagree or a valid pixel has a bad depth.
  void validate() const;
};

/// Per-pixel instance id, row-major; 0 is background.
struct InstanceMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> ids;

  InstanceMap() = default;
  InstanceMap(int w, int h) : width(w), height(h), ids(std::size_t(w) * h, 0) {}

  std::size_t index(int u, int v) const { return std::size_t(v) * width + u; }
  std::uint32_t at(int u, int v) const { return ids[index(u, v)]; }
  std::uint32_t& at(int u, int v) { return ids[index(u, v)]; }

  std::size_t count(std::uint32_t id) const;
};

/// Sorted distinct non-zero ids present in the map.
std::vector<std::uint32_t> instance_ids(const InstanceMap& map);

/// 3D points with optional source-pixel provenance (empty = absent).
struct PointCloud {
  std::vector<Point3> points;
  std::vector<PixelCoord> provenance;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_provenance() const { return !provenance.empty(); }
};

}  // namespace plidar
