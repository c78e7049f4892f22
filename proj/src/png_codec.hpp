#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace plidar::detail {

/// Decoded single-channel grayscale image; samples widened to 16 bits.
struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

/// Throws FormatError for anything that is not a single-channel 8/16-bit PNG.
GrayImage decode_gray_png(std::span<const std::uint8_t> bytes);

/// 16-bit grayscale, fixed compression settings (deterministic output).
std::vector<std::uint8_t> encode_gray16_png(int width, int height, std::span<const std::uint16_t> samples);

}  // namespace plidar::detail
