#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "plidar/camera_geometry.hpp"
#include "plidar/types.hpp"

namespace plidar {

/// Optional crops applied while lifting. All are off by default.
struct LiftOptions {
  std::optional<double> min_depth;
  std::optional<double> max_depth;
  std::optional<double> min_y;  ///< camera-frame height crop (y down)
  std::optional<double> max_y;
};

/// One point per valid pixel in row-major order, with provenance. When a
/// pose is given the points are mapped into the world frame.
PointCloud generate_pseudolidar(const DepthMap& depth, const CameraIntrinsics& intr,
                                const std::optional<CameraPose>& pose = std::nullopt,
                                const LiftOptions& options = {});

/// Lifts the valid pixels whose mask value equals `id`.
/// Throws InvalidInputError on a dimension mismatch or id == 0.
PointCloud extract_frustum_mask(const DepthMap& depth, const InstanceMap& mask, std::uint32_t id,
                                const CameraIntrinsics& intr);

/// Lifts the valid pixels inside the half-open rectangle [x, x+w) x [y, y+h).
PointCloud extract_frustum_box(const DepthMap& depth, const Rect& rect, const CameraIntrinsics& intr);

/// Draws exactly n points. Without replacement when the cloud is large
/// enough; otherwise every point once (shuffled) padded with draws with
/// replacement. Deterministic in (cloud, n, seed).
PointCloud sample_points(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

}  // namespace plidar
