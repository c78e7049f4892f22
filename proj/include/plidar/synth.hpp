#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plidar/box_geometry.hpp"
#include "plidar/camera_geometry.hpp"
#include "plidar/kitti_io.hpp"
#include "plidar/types.hpp"

namespace plidar::synth {

/// KITTI-like rectified camera 2 (1242 x 375).
CameraIntrinsics kitti_camera();

struct SceneObject {
  Box3D box;
  std::string class_name = "Car";
};

struct Scene {
  std::vector<SceneObject> objects;
  double ground_y = 1.65;  ///< ground plane height in camera coordinates (y down)
  CameraIntrinsics camera = kitti_camera();
  int width = 1242;
  int height = 375;
  double max_range = 80.0;  ///< ground hits beyond this depth are left invalid

  /// Throws InvalidInputError when an object is behind the camera or sunk into the ground.
  void validate() const;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SceneSpec {
  std::size_t n_boxes = 4;
  Range depth{10.0, 45.0};
  Range height{1.40, 1.70};
  Range width{1.55, 1.90};
  Range length{3.50, 4.60};
  Range heading{-3.14159265358979, 3.14159265358979};
  std::uint64_t seed = 0;
  double ground_y = 1.65;
  CameraIntrinsics camera = kitti_camera();
  int image_width = 1242;
  int image_height = 375;
  /// Keep every projected box inside the image with this margin (pixels).
  bool require_in_image = true;
  double image_margin = 4.0;
  /// Largest overlap of two projected boxes, as a fraction of the smaller one.
  double max_image_overlap = 0.25;
  std::size_t max_retries = 2000;

  void validate() const;
};

/// Deterministic in the spec. Boxes rest on the ground and do not overlap in
/// the bird's eye view. Throws PlacementError when the retry budget runs out.
Scene generate_scene(const SceneSpec& spec);

/// Smallest ray parameter t >= 0 at which origin + t * dir enters the box,
/// using the slab method in box-local coordinates.
std::optional<double> ray_box_intersection(const Point3& origin, const Eigen::Vector3d& dir, const Box3D& box);

struct Rendering {
  DepthMap depth;
  InstanceMap mask;  ///< 1-based object index of the nearest hit, 0 elsewhere
};

/// Ray-casts every pixel (u, v) through the pinhole model. The nearest box
/// hit wins; otherwise the ground plane within max_range; otherwise invalid.
Rendering render_depth(const Scene& scene);

/// Depth corruption modelling monocular depth artifacts.
struct NoiseModel {
  double misalignment_bias = 0.03;    ///< per-object depth scale offset (fraction of depth)
  double misalignment_jitter = 0.02;  ///< std of the random per-object depth scale
  int tail_width = 2;                 ///< silhouette boundary band (Chebyshev radius, pixels)
  double tail_stretch = 0.5;          ///< max extra boundary depth (fraction of depth)
  std::uint64_t seed = 0;

  static NoiseModel none() { return {0.0, 0.0, 0, 0.0, 0}; }

  void validate() const;
};

/// Scales each object's pixels by (1 + bias + jitter_id), then pushes
/// boundary pixels back by U(0, tail_stretch) * depth. Background pixels are
/// untouched. Random draws are keyed by (seed, id) and (seed, pixel), so the
/// result does not depend on traversal order.
DepthMap corrupt_depth(const DepthMap& depth, const InstanceMap& mask, const NoiseModel& noise);

/// Pixels of instance `id` that lie within `radius` (Chebyshev) of a pixel
/// with a different mask value. Pixels outside the image do not count.
std::vector<std::uint8_t> boundary_band(const InstanceMap& mask, std::uint32_t id, int radius);

/// Ground-truth labels: tight visible 2D box, occlusion from the visible
/// fraction of the unoccluded silhouette (>= 0.9 -> 0, >= 0.5 -> 1, > 0 -> 2,
/// else 3) and truncation from the share of the projected box outside the image.
std::vector<kitti::LabelRecord> scene_labels(const Scene& scene, const Rendering& rendering);

}  // namespace plidar::synth
