#include <algorithm>
#include <fstream>
#include <iterator>

#include "plidar/box_fit.hpp"
#include "plidar/cli.hpp"
#include "plidar/error.hpp"
#include "plidar/pseudolidar.hpp"
#include "plidar/random.hpp"

namespace plidar::cli {

double mask_score(std::size_t mask_pixels) { return std::clamp(double(mask_pixels) / 10000.0, 0.01, 1.0); }

std::uint64_t frame_seed(std::uint64_t seed, const std::string& frame) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : frame) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

FrameDetections detect_frame(const DepthMap& depth, const InstanceMap& mask, const CameraIntrinsics& intr,
                             const PipelineConfig& cfg, std::uint64_t seed) {
  FrameDetections out;
  for (std::uint32_t id : instance_ids(mask)) {
    const std::string tag = "instance " + std::to_string(id) + ": ";
    try {
      const PointCloud frustum = extract_frustum_mask(depth, mask, id, intr);
      if (frustum.size() < 3) {
        out.warnings.push_back(tag + "only " + std::to_string(frustum.size()) + " points with valid depth");
        continue;
      }
      const PointCloud trimmed = trim_outliers(frustum, cfg.trim_k);
      const PointCloud sampled = sample_points(trimmed, cfg.sample_n, derive_seed(seed, id));
      Box3D box = cfg.use_size_prior ? fit_box_with_prior(sampled, cfg.size_prior, Point3(-intr.bx, -intr.by, 0.0))
                                     : fit_box_baseline(sampled);
      const Rect mask_box = mask_mbr(mask, id);
      if (cfg.use_bbco) {
        // Pixel centres sit on integer coordinates, so pixel u spans [u - 0.5, u + 0.5).
        Rect proposal = mask_box;
        proposal.x -= 0.5;
        proposal.y -= 0.5;
        DEConfig de = cfg.de;
        de.seed = derive_seed(seed, id, 1);
        box = refine_bbco(box, proposal, intr, de, cfg.bounds, cfg.proximal_weight).box;
      }
      kitti::LabelRecord base;
      base.class_name = cfg.class_name;
      base.bbox2d = mask_box;
      base.score = mask_score(mask.count(id));
      kitti::LabelRecord rec = kitti::box3d_to_label(box, base);
      rec.alpha = kitti::observation_angle(rec.rotation_y, rec.location);
      out.labels.push_back(rec);
    } catch (const Error& e) {
      out.warnings.push_back(tag + e.what());
    }
  }
  return out;
}

std::vector<std::string> list_frames(const std::filesystem::path& dir, const std::string& ext) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw NotFoundError("directory not found: " + dir.string());
  std::vector<std::string> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) frames.push_back(entry.path().stem().string());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

kitti::Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), std::streamsize(size));
  if (!out) throw InvalidInputError("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, text.data(), text.size());
}

}  // namespace plidar::cli
