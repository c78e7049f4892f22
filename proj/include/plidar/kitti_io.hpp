#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plidar/box_geometry.hpp"
#include "plidar/camera_geometry.hpp"
#include "plidar/types.hpp"

namespace plidar::kitti {

using Bytes = std::vector<std::uint8_t>;

/// Camera calibration. `entries` keeps every key in file order so that a
/// parsed file can be written back unchanged.
struct CalibRecord {
  std::array<double, 12> p2{};              // 3x4, row-major
  std::array<double, 9> r0_rect{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 12> tr_velo_to_cam{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  std::vector<std::pair<std::string, std::vector<double>>> entries;

  double p2_at(int row, int col) const { return p2[std::size_t(row * 4 + col)]; }
};

/// Parses "KEY: v0 v1 ..." lines. P2 is required; R0_rect and Tr_velo_to_cam
/// default to identity when absent; unknown keys are kept but not interpreted.
/// Throws FormatError (with the line number where applicable).
CalibRecord parse_calib(std::string_view text);

/// Writes every entry as "KEY: v0 ... vN" with %.12e values.
std::string write_calib(const CalibRecord& calib);

/// Builds a record holding a single P2 entry followed by identity R0_rect and
/// Tr_velo_to_cam, matching the given intrinsics.
CalibRecord calib_from_intrinsics(const CameraIntrinsics& intr);

CameraIntrinsics intrinsics_from_calib(const CalibRecord& calib);

/// One object row in KITTI devkit field order.
struct LabelRecord {
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  Rect bbox2d;
  double h = 0.0, w = 0.0, l = 0.0;
  Point3 location = Point3::Zero();  ///< bottom-face center, camera frame
  double rotation_y = 0.0;
  std::optional<double> score;
};

enum class ParseMode { Strict, Permissive };

/// One record per non-blank line, in file order. Lines need 15 fields, or
/// 16 with a trailing score. In strict mode a malformed line throws
/// FormatError; in permissive mode it is skipped and described in `warnings`.
std::vector<LabelRecord> parse_labels(std::string_view text, ParseMode mode = ParseMode::Strict,
                                      std::vector<std::string>* warnings = nullptr);

/// Fields use %.2f (occlusion %d); a present score uses %.4f.
std::string write_labels(std::span<const LabelRecord> records);

/// Bottom-face center -> geometric center (y - h/2; camera y points down).
Box3D label_to_box3d(const LabelRecord& rec);

/// Writes box geometry into a copy of `base` (location, dimensions, rotation_y).
LabelRecord box3d_to_label(const Box3D& box, const LabelRecord& base = {});

/// Observation angle for an object at `location` with heading `rotation_y`.
double observation_angle(double rotation_y, const Point3& location);

/// 16-bit single-channel PNG; meters = stored / 256, stored 0 = invalid.
DepthMap read_depth_png(std::span<const std::uint8_t> bytes);
Bytes write_depth_png(const DepthMap& depth);

struct DecodedMask {
  InstanceMap map;
  std::vector<std::uint32_t> ids;  ///< sorted distinct non-zero ids
};

/// 8- or 16-bit single-channel PNG; 0 = background, k > 0 = instance k.
DecodedMask read_instance_mask(std::span<const std::uint8_t> bytes);
/// Always written as 16-bit. Throws InvalidInputError for ids above 65535.
Bytes write_instance_mask(const InstanceMap& mask);

enum class CloudFormat { Bin, Ply };

/// `Bin`: little-endian float32 (x, y, z, reflectance = 1). `Ply`: ASCII PLY
/// with float x, y, z written with %.9g (exact for float32).
Bytes write_pointcloud(const PointCloud& cloud, CloudFormat format);
PointCloud read_pointcloud(std::span<const std::uint8_t> bytes, CloudFormat format);

}  // namespace plidar::kitti
