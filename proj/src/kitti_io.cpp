#include "plidar/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "plidar/error.hpp"
#include "png_codec.hpp"

namespace plidar::kitti {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::optional<double> to_double(std::string_view tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view tok) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

const std::map<std::string, std::size_t, std::less<>>& known_arity() {
  static const std::map<std::string, std::size_t, std::less<>> arity{
      {"P0", 12}, {"P1", 12}, {"P2", 12}, {"P3", 12},
      {"R0_rect", 9}, {"R_rect", 9}, {"Tr_velo_to_cam", 12}, {"Tr_imu_to_velo", 12},
  };
  return arity;
}

}  // namespace

CalibRecord parse_calib(std::string_view text) {
  CalibRecord rec;
  bool have_p2 = false;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = lines[ln];
    if (is_blank(line)) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw FormatError("calib line has no 'KEY:' prefix", ln + 1);
    std::string key(line.substr(0, colon));
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    std::vector<double> values;
    for (auto tok : split_ws(line.substr(colon + 1))) {
      const auto v = to_double(tok);
      if (!v) throw FormatError("calib value '" + std::string(tok) + "' is not a number", ln + 1);
      values.push_back(*v);
    }
    const auto& arity = known_arity();
    if (auto it = arity.find(key); it != arity.end() && values.size() != it->second) {
      throw FormatError("calib key " + key + " expects " + std::to_string(it->second) + " values, got " +
                            std::to_string(values.size()),
                        ln + 1);
    }
    if (key == "P2") {
      std::copy(values.begin(), values.end(), rec.p2.begin());
      have_p2 = true;
    } else if (key == "R0_rect") {
      std::copy(values.begin(), values.end(), rec.r0_rect.begin());
    } else if (key == "Tr_velo_to_cam") {
      std::copy(values.begin(), values.end(), rec.tr_velo_to_cam.begin());
    }
    rec.entries.emplace_back(std::move(key), std::move(values));
  }
  if (!have_p2) throw FormatError("calib file has no P2 entry");
  if (!(rec.p2[0] > 0.0) || !(rec.p2[5] > 0.0)) throw FormatError("calib P2 focal lengths must be positive");

  const auto& r = rec.r0_rect;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[std::size_t(k * 3 + i)] * r[std::size_t(k * 3 + j)];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-6) throw FormatError("calib R0_rect is not orthonormal");
    }
  }
  return rec;
}

std::string write_calib(const CalibRecord& calib) {
  std::string out;
  for (const auto& [key, values] : calib.entries) {
    out += key;
    out += ':';
    for (double v : values) {
      out += ' ';
      out += format("%.12e", v);
    }
    out += '\n';
  }
  return out;
}

CalibRecord calib_from_intrinsics(const CameraIntrinsics& intr) {
  CalibRecord rec;
  rec.p2 = {intr.fx, 0.0, intr.cx, intr.bx * intr.fx,
            0.0, intr.fy, intr.cy, intr.by * intr.fy,
            0.0, 0.0, 1.0, 0.0};
  rec.entries.emplace_back("P2", std::vector<double>(rec.p2.begin(), rec.p2.end()));
  rec.entries.emplace_back("R0_rect", std::vector<double>(rec.r0_rect.begin(), rec.r0_rect.end()));
  rec.entries.emplace_back("Tr_velo_to_cam", std::vector<double>(rec.tr_velo_to_cam.begin(), rec.tr_velo_to_cam.end()));
  return rec;
}

CameraIntrinsics intrinsics_from_calib(const CalibRecord& calib) {
  CameraIntrinsics intr;
  intr.fx = calib.p2_at(0, 0);
  intr.fy = calib.p2_at(1, 1);
  intr.cx = calib.p2_at(0, 2);
  intr.cy = calib.p2_at(1, 2);
  intr.bx = calib.p2_at(0, 3) / intr.fx;
  intr.by = calib.p2_at(1, 3) / intr.fy;
  return intr;
}

std::vector<LabelRecord> parse_labels(std::string_view text, ParseMode mode, std::vector<std::string>* warnings) {
  std::vector<LabelRecord> out;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (is_blank(lines[ln])) continue;
    try {
      const auto tok = split_ws(lines[ln]);
      if (tok.size() != 15 && tok.size() != 16) {
        throw FormatError("label needs 15 or 16 fields, got " + std::to_string(tok.size()), ln + 1);
      }
      std::array<double, 16> num{};
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (i == 2) continue;
        const auto v = to_double(tok[i]);
        if (!v) throw FormatError("label field " + std::to_string(i + 1) + " '" + std::string(tok[i]) + "' is not a number", ln + 1);
        num[i] = *v;
      }
      const auto occ = to_int(tok[2]);
      if (!occ) throw FormatError("label occlusion '" + std::string(tok[2]) + "' is not an integer", ln + 1);

      LabelRecord rec;
      rec.class_name = std::string(tok[0]);
      rec.truncation = num[1];
      rec.occlusion = *occ;
      rec.alpha = num[3];
      rec.bbox2d = {num[4], num[5], num[6] - num[4], num[7] - num[5]};
      rec.h = num[8];
      rec.w = num[9];
      rec.l = num[10];
      rec.location = {num[11], num[12], num[13]};
      rec.rotation_y = num[14];
      if (tok.size() == 16) rec.score = num[15];
      out.push_back(std::move(rec));
    } catch (const FormatError& e) {
      if (mode == ParseMode::Strict) throw;
      if (warnings) warnings->push_back(e.what());
    }
  }
  return out;
}

std::string write_labels(std::span<const LabelRecord> records) {
  std::string out;
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s %.2f %d %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f",
                  r.class_name.c_str(), r.truncation, r.occlusion, r.alpha, r.bbox2d.x, r.bbox2d.y,
                  r.bbox2d.right(), r.bbox2d.bottom(), r.h, r.w, r.l, r.location.x(), r.location.y(),
                  r.location.z(), r.rotation_y);
    out += buf;
    if (r.score) out += format(" %.4f", *r.score);
    out += '\n';
  }
  return out;
}

Box3D label_to_box3d(const LabelRecord& rec) {
  return {rec.location.x(), rec.location.y() - rec.h / 2.0, rec.location.z(), rec.h, rec.w, rec.l, rec.rotation_y};
}

LabelRecord box3d_to_label(const Box3D& box, const LabelRecord& base) {
  LabelRecord rec = base;
  rec.h = box.h;
  rec.w = box.w;
  rec.l = box.l;
  rec.location = {box.x, box.y + box.h / 2.0, box.z};
  rec.rotation_y = box.theta;
  return rec;
}

double observation_angle(double rotation_y, const Point3& location) {
  return normalize_angle(rotation_y - std::atan2(location.x(), location.z()));
}

DepthMap read_depth_png(std::span<const std::uint8_t> bytes) {
  const auto img = detail::decode_gray_png(bytes);
  if (img.bit_depth != 16) throw FormatError("depth PNG must be 16-bit");
  DepthMap depth(img.width, img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    if (img.samples[i] != 0) {
      depth.depth[i] = img.samples[i] / 256.0;
      depth.valid[i] = 1;
    }
  }
  return depth;
}

Bytes write_depth_png(const DepthMap& depth) {
  depth.validate();
  std::vector<std::uint16_t> samples(depth.depth.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!depth.valid[i]) continue;
    // Valid pixels never encode as the invalid sentinel; far values saturate.
    const double stored = std::round(depth.depth[i] * 256.0);
    samples[i] = std::uint16_t(std::clamp(stored, 1.0, 65535.0));
  }
  return detail::encode_gray16_png(depth.width, depth.height, samples);
}

DecodedMask read_instance_mask(std::span<const std::uint8_t> bytes) {
  const auto img = detail::decode_gray_png(bytes);
  DecodedMask out;
  out.map = InstanceMap(img.width, img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) out.map.ids[i] = img.samples[i];
  out.ids = instance_ids(out.map);
  return out;
}

Bytes write_instance_mask(const InstanceMap& mask) {
  std::vector<std::uint16_t> samples(mask.ids.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (mask.ids[i] > 0xffff) throw InvalidInputError("instance id does not fit in a 16-bit mask");
    samples[i] = std::uint16_t(mask.ids[i]);
  }
  return detail::encode_gray16_png(mask.width, mask.height, samples);
}

namespace {

void put_f32le(Bytes& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int s = 0; s < 32; s += 8) out.push_back(std::uint8_t((bits >> s) & 0xff));
}

float get_f32le(const std::uint8_t* p) {
  const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
                             (std::uint32_t(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

Bytes write_pointcloud(const PointCloud& cloud, CloudFormat format) {
  Bytes out;
  if (format == CloudFormat::Bin) {
    out.reserve(cloud.size() * 16);
    for (const auto& p : cloud.points) {
      put_f32le(out, float(p.x()));
      put_f32le(out, float(p.y()));
      put_f32le(out, float(p.z()));
      put_f32le(out, 1.0f);
    }
    return out;
  }
  std::string text = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
                     "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  char buf[128];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", double(float(p.x())), double(float(p.y())),
                  double(float(p.z())));
    text += buf;
  }
  out.assign(text.begin(), text.end());
  return out;
}

PointCloud read_pointcloud(std::span<const std::uint8_t> bytes, CloudFormat format) {
  PointCloud cloud;
  if (format == CloudFormat::Bin) {
    if (bytes.size() % 16 != 0) throw FormatError("point cloud .bin size is not a multiple of 16 bytes");
    cloud.points.reserve(bytes.size() / 16);
    for (std::size_t off = 0; off < bytes.size(); off += 16) {
      const auto* p = bytes.data() + off;
      cloud.points.emplace_back(get_f32le(p), get_f32le(p + 4), get_f32le(p + 8));
    }
    return cloud;
  }

  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const auto lines = split_lines(text);
  static constexpr std::array<std::string_view, 7> kHeader{
      "ply", "format ascii 1.0", "", "property float x", "property float y", "property float z", "end_header"};
  if (lines.size() < kHeader.size()) throw FormatError("PLY header is truncated");
  std::size_t count = 0;
  for (std::size_t i = 0; i < kHeader.size(); ++i) {
    if (i == 2) {
      const auto tok = split_ws(lines[i]);
      const auto n = tok.size() == 3 ? to_double(tok[2]) : std::nullopt;
      if (tok.size() != 3 || tok[0] != "element" || tok[1] != "vertex" || !n || *n < 0) {
        throw FormatError("PLY header expects 'element vertex N'", i + 1);
      }
      count = std::size_t(*n);
    } else if (lines[i] != kHeader[i]) {
      throw FormatError("unexpected PLY header line '" + std::string(lines[i]) + "'", i + 1);
    }
  }
  cloud.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t ln = kHeader.size() + k;
    if (ln >= lines.size()) throw FormatError("PLY body has fewer vertices than declared");
    const auto tok = split_ws(lines[ln]);
    if (tok.size() != 3) throw FormatError("PLY vertex needs 3 values", ln + 1);
    Point3 p;
    for (int j = 0; j < 3; ++j) {
      const auto v = to_double(tok[std::size_t(j)]);
      if (!v) throw FormatError("PLY vertex value is not a number", ln + 1);
      p[j] = double(float(*v));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace plidar::kitti
