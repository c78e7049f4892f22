#include "plidar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "plidar/error.hpp"
#include "plidar/random.hpp"

namespace plidar::synth {

CameraIntrinsics kitti_camera() {
  CameraIntrinsics c;
  c.fx = 721.5377;
  c.fy = 721.5377;
  c.cx = 609.5593;
  c.cy = 172.854;
  c.bx = 44.85728 / 721.5377;
  c.by = 0.2163791 / 721.5377;
  return c;
}

void Scene::validate() const {
  camera.validate();
  if (width <= 0 || height <= 0) throw InvalidInputError("scene image size must be positive");
  for (const auto& obj : objects) {
    obj.box.validate();
    for (const auto& c : corners(obj.box)) {
      if (!(c.z() > 0.0)) throw InvalidInputError("scene box is not in front of the camera");
    }
    if (obj.box.y + obj.box.h / 2.0 > ground_y + 1e-6) throw InvalidInputError("scene box extends below the ground");
  }
}

void SceneSpec::validate() const {
  camera.validate();
  for (const Range& r : {depth, height, width, length, heading}) {
    if (!(r.lo <= r.hi)) throw InvalidInputError("scene spec range is empty");
  }
  if (!(depth.lo > 0.0)) throw InvalidInputError("scene spec depth range must be positive");
  if (height.lo < 0.0 || width.lo < 0.0 || length.lo < 0.0) throw InvalidInputError("scene spec sizes must be >= 0");
  if (image_width <= 0 || image_height <= 0) throw InvalidInputError("scene spec image size must be positive");
}

namespace {

bool fits_image(const Rect& r, const SceneSpec& spec) {
  return r.x >= spec.image_margin && r.y >= spec.image_margin &&
         r.right() <= spec.image_width - spec.image_margin && r.bottom() <= spec.image_height - spec.image_margin;
}

double overlap_fraction(const Rect& a, const Rect& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double smaller = std::min(a.area(), b.area());
  return smaller > 0.0 ? iw * ih / smaller : 0.0;
}

Eigen::Vector3d ray_direction(const CameraIntrinsics& cam, double u, double v) {
  return {(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
}

Point3 ray_origin(const CameraIntrinsics& cam) { return {-cam.bx, -cam.by, 0.0}; }

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.ground_y = spec.ground_y;
  scene.camera = spec.camera;
  scene.width = spec.image_width;
  scene.height = spec.image_height;

  Rng rng(spec.seed);
  std::vector<Rect> rects;
  std::size_t budget = spec.max_retries;
  while (scene.objects.size() < spec.n_boxes) {
    if (budget-- == 0) {
      throw PlacementError("could not place " + std::to_string(spec.n_boxes) + " boxes within " +
                           std::to_string(spec.max_retries) + " attempts");
    }
    Box3D box;
    box.z = rng.uniform(spec.depth.lo, spec.depth.hi);
    box.h = rng.uniform(spec.height.lo, spec.height.hi);
    box.w = rng.uniform(spec.width.lo, spec.width.hi);
    box.l = rng.uniform(spec.length.lo, spec.length.hi);
    box.theta = normalize_angle(rng.uniform(spec.heading.lo, spec.heading.hi));
    const double u = rng.uniform(0.0, double(spec.image_width));
    box.x = (u - spec.camera.cx) * box.z / spec.camera.fx - spec.camera.bx;
    box.y = spec.ground_y - box.h / 2.0;

    bool ok = true;
    for (const auto& c : corners(box)) ok = ok && c.z() > 0.5;
    if (!ok) continue;
    const Rect r = mbr(project_box(box, spec.camera));
    if (spec.require_in_image && !fits_image(r, spec)) continue;
    const BevPolygon footprint = bev_polygon(box);
    for (std::size_t k = 0; k < scene.objects.size() && ok; ++k) {
      const BevPolygon other = bev_polygon(scene.objects[k].box);
      ok = convex_intersection_area(footprint.vertices, other.vertices) <= 0.0 &&
           overlap_fraction(r, rects[k]) <= spec.max_image_overlap;
    }
    if (!ok) continue;
    scene.objects.push_back({box, "Car"});
    rects.push_back(r);
  }
  return scene;
}

std::optional<double> ray_box_intersection(const Point3& origin, const Eigen::Vector3d& dir, const Box3D& box) {
  const Eigen::Matrix3d rt = rot_y(box.theta).transpose();
  const Eigen::Vector3d o = rt * (origin - box.center());
  const Eigen::Vector3d d = rt * dir;
  const Eigen::Vector3d half(box.l / 2.0, box.h / 2.0, box.w / 2.0);

  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < -half[i] || o[i] > half[i]) return std::nullopt;
      continue;
    }
    double t1 = (-half[i] - o[i]) / d[i];
    double t2 = (half[i] - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_near > t_far || t_far < 0.0) return std::nullopt;
  return std::max(t_near, 0.0);
}

Rendering render_depth(const Scene& scene) {
  scene.validate();
  Rendering out{DepthMap(scene.width, scene.height), InstanceMap(scene.width, scene.height)};
  const Point3 origin = ray_origin(scene.camera);

  // Only test boxes whose projected rectangle covers the pixel.
  std::vector<Rect> rects;
  for (const auto& obj : scene.objects) rects.push_back(mbr(project_box(obj.box, scene.camera)));

  for (int v = 0; v < scene.height; ++v) {
    for (int u = 0; u < scene.width; ++u) {
      const Eigen::Vector3d dir = ray_direction(scene.camera, u, v);
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t hit = 0;
      for (std::size_t k = 0; k < scene.objects.size(); ++k) {
        const Rect& r = rects[k];
        if (u < r.x - 1.0 || u > r.right() + 1.0 || v < r.y - 1.0 || v > r.bottom() + 1.0) continue;
        const auto t = ray_box_intersection(origin, dir, scene.objects[k].box);
        if (t && *t > 0.0 && *t < best) {
          best = *t;
          hit = std::uint32_t(k + 1);
        }
      }
      if (hit == 0 && dir.y() > 0.0) {
        const double t = (scene.ground_y - origin.y()) / dir.y();
        if (t > 0.0 && t <= scene.max_range) best = t;
      }
      // dir.z() == 1 and origin.z() == 0, so the ray parameter is the depth.
      if (std::isfinite(best)) out.depth.set(u, v, best);
      out.mask.at(u, v) = hit;
    }
  }
  return out;
}

void NoiseModel::validate() const {
  if (misalignment_bias < 0.0 || misalignment_jitter < 0.0 || tail_width < 0 || tail_stretch < 0.0) {
    throw InvalidInputError("noise model coefficients must be >= 0");
  }
}

std::vector<std::uint8_t> boundary_band(const InstanceMap& mask, std::uint32_t id, int radius) {
  std::vector<std::uint8_t> band(mask.ids.size(), 0);
  if (radius <= 0) return band;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      if (mask.at(u, v) != id) continue;
      bool edge = false;
      for (int dv = -radius; dv <= radius && !edge; ++dv) {
        const int vv = v + dv;
        if (vv < 0 || vv >= mask.height) continue;
        for (int du = -radius; du <= radius; ++du) {
          const int uu = u + du;
          if (uu < 0 || uu >= mask.width) continue;
          if (mask.at(uu, vv) != id) {
            edge = true;
            break;
          }
        }
      }
      band[mask.index(u, v)] = edge ? 1 : 0;
    }
  }
  return band;
}

DepthMap corrupt_depth(const DepthMap& depth, const InstanceMap& mask, const NoiseModel& noise) {
  noise.validate();
  if (depth.width != mask.width || depth.height != mask.height) {
    throw InvalidInputError("corrupt_depth: depth and mask dimensions differ");
  }
  constexpr std::uint64_t kScaleStream = 1;
  constexpr std::uint64_t kTailStream = 2;

  DepthMap out = depth;
  for (std::uint32_t id : instance_ids(mask)) {
    double scale = 1.0 + noise.misalignment_bias;
    if (noise.misalignment_jitter > 0.0) {
      Rng rng(derive_seed(noise.seed, kScaleStream, id));
      scale += noise.misalignment_jitter * rng.normal();
    }
    scale = std::max(scale, 1e-3);

    const bool tail = noise.tail_width > 0 && noise.tail_stretch > 0.0;
    const auto band = tail ? boundary_band(mask, id, noise.tail_width) : std::vector<std::uint8_t>{};
    for (std::size_t i = 0; i < mask.ids.size(); ++i) {
      if (mask.ids[i] != id || !out.valid[i]) continue;
      double d = out.depth[i] * scale;
      if (tail && band[i]) {
        const double r = unit_from_bits(derive_seed(noise.seed, kTailStream, i));
        d += r * noise.tail_stretch * d;
      }
      out.depth[i] = d;
    }
  }
  return out;
}

std::vector<kitti::LabelRecord> scene_labels(const Scene& scene, const Rendering& rendering) {
  std::vector<kitti::LabelRecord> labels;
  const Point3 origin = ray_origin(scene.camera);
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& obj = scene.objects[k];
    const auto id = std::uint32_t(k + 1);
    const Rect projected = mbr(project_box(obj.box, scene.camera));

    // Silhouette pixel count with every other object removed.
    std::size_t full = 0;
    const int u0 = std::max(0, int(std::floor(projected.x)) - 1);
    const int v0 = std::max(0, int(std::floor(projected.y)) - 1);
    const int u1 = std::min(scene.width - 1, int(std::ceil(projected.right())) + 1);
    const int v1 = std::min(scene.height - 1, int(std::ceil(projected.bottom())) + 1);
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const auto t = ray_box_intersection(origin, ray_direction(scene.camera, u, v), obj.box);
        if (t && *t > 0.0) ++full;
      }
    }
    const std::size_t visible = rendering.mask.count(id);
    const double fraction = full > 0 ? double(visible) / double(full) : 0.0;

    kitti::LabelRecord rec;
    rec.class_name = obj.class_name;
    const double cl = std::clamp(projected.x, 0.0, double(scene.width));
    const double cr = std::clamp(projected.right(), 0.0, double(scene.width));
    const double ct = std::clamp(projected.y, 0.0, double(scene.height));
    const double cb = std::clamp(projected.bottom(), 0.0, double(scene.height));
    const double inside = (cr - cl) * (cb - ct);
    rec.truncation = projected.area() > 0.0 ? std::clamp(1.0 - inside / projected.area(), 0.0, 1.0) : 0.0;
    rec.occlusion = fraction >= 0.9 ? 0 : fraction >= 0.5 ? 1 : fraction > 0.0 ? 2 : 3;
    rec.bbox2d = visible > 0 ? mask_mbr(rendering.mask, id) : Rect{cl, ct, cr - cl, cb - ct};
    rec = kitti::box3d_to_label(obj.box, rec);
    rec.alpha = kitti::observation_angle(rec.rotation_y, rec.location);
    labels.push_back(std::move(rec));
  }
  return labels;
}

}  // namespace plidar::synth
