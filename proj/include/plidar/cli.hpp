#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "plidar/box_fit.hpp"
#include "plidar/camera_geometry.hpp"
#include "plidar/consistency.hpp"
#include "plidar/kitti_io.hpp"
#include "plidar/types.hpp"

namespace plidar::cli {

enum ExitCode : int { kOk = 0, kWarnings = 1, kInputError = 2 };

struct PipelineConfig {
  std::size_t sample_n = 512;
  double trim_k = 0.1;
  bool use_bbco = true;
  bool use_size_prior = true;
  SizePrior size_prior;
  DEConfig de;
  BoundCoefficients bounds;
  double proximal_weight = kBbcoProximalWeight;
  std::uint64_t seed = 0;
  std::string class_name = "Car";
};

struct FrameDetections {
  std::vector<kitti::LabelRecord> labels;
  std::vector<std::string> warnings;
};

/// clamp(pixels / 10000, 0.01, 1)
double mask_score(std::size_t mask_pixels);

/// Runs mask frustum, trim, sampling, baseline fit and (optionally) BBCO for
/// every instance in `mask`. Instances that cannot be fitted are reported in
/// `warnings` and skipped.
FrameDetections detect_frame(const DepthMap& depth, const InstanceMap& mask, const CameraIntrinsics& intr,
                             const PipelineConfig& cfg, std::uint64_t frame_seed);

/// Seed for a frame, derived from the run seed and the frame name only.
std::uint64_t frame_seed(std::uint64_t seed, const std::string& frame);

/// Frame names (file stems) of `dir/*.ext`, sorted.
std::vector<std::string> list_frames(const std::filesystem::path& dir, const std::string& ext);

kitti::Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const void* data, std::size_t size);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Entry point of the `plidar` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plidar::cli
