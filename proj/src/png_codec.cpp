#include "png_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

#include <png.h>

#include "plidar/error.hpp"

namespace plidar::detail {

namespace {

// libpng reports errors by longjmp; the message is parked here first. The
// setjmp frames below hold only trivially destructible locals.
struct Context {
  char message[256] = {0};
  const std::uint8_t* src = nullptr;
  std::size_t src_size = 0;
  std::size_t offset = 0;
  std::vector<std::uint8_t>* sink = nullptr;
};

void on_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<Context*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* ctx = static_cast<Context*>(png_get_io_ptr(png));
  if (ctx->offset + n > ctx->src_size) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, ctx->src + ctx->offset, n);
  ctx->offset += n;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t n) {
  auto* ctx = static_cast<Context*>(png_get_io_ptr(png));
  ctx->sink->insert(ctx->sink->end(), data, data + n);
}

void flush_noop(png_structp) {}

bool read_header(png_structp png, png_infop info, png_uint_32* w, png_uint_32* h, int* depth, int* color) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  int interlace = 0, compression = 0, filter = 0;
  png_get_IHDR(png, info, w, h, depth, color, &interlace, &compression, &filter);
  png_read_update_info(png, info);
  return true;
}

bool read_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool write_all(png_structp png, png_infop info, png_uint_32 w, png_uint_32 h, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

GrayImage decode_gray_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("not a PNG file");

  Context ctx;
  ctx.src = bytes.data();
  ctx.src_size = bytes.size();
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, on_error, on_warning);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");
  png_set_read_fn(png, &ctx, read_from_memory);

  png_uint_32 w = 0, h = 0;
  int depth = 0, color = 0;
  if (!read_header(png, info, &w, &h, &depth, &color)) {
    throw FormatError(std::string("PNG decode failed: ") + ctx.message);
  }
  if (color != PNG_COLOR_TYPE_GRAY) throw FormatError("PNG must be single-channel grayscale");
  if (depth != 8 && depth != 16) throw FormatError("PNG must have 8 or 16 bits per sample, got " + std::to_string(depth));

  GrayImage img;
  img.width = int(w);
  img.height = int(h);
  img.bit_depth = depth;
  const std::size_t stride = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(stride * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 r = 0; r < h; ++r) rows[r] = raw.data() + r * stride;
  if (!read_rows(png, rows.data())) throw FormatError(std::string("PNG decode failed: ") + ctx.message);

  img.samples.resize(std::size_t(w) * h);
  for (png_uint_32 r = 0; r < h; ++r) {
    const std::uint8_t* row = rows[r];
    for (png_uint_32 c = 0; c < w; ++c) {
      // PNG stores 16-bit samples big-endian.
      img.samples[std::size_t(r) * w + c] =
          depth == 16 ? std::uint16_t((row[2 * c] << 8) | row[2 * c + 1]) : std::uint16_t(row[c]);
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_gray16_png(int width, int height, std::span<const std::uint16_t> samples) {
  if (width <= 0 || height <= 0 || samples.size() != std::size_t(width) * std::size_t(height)) {
    throw InvalidInputError("PNG encode: sample count does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  Context ctx;
  ctx.sink = &out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, on_error, on_warning);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");
  png_set_write_fn(png, &ctx, write_to_memory, flush_noop);

  std::vector<std::uint8_t> raw(samples.size() * 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    raw[2 * i] = std::uint8_t(samples[i] >> 8);
    raw[2 * i + 1] = std::uint8_t(samples[i] & 0xff);
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) rows[std::size_t(r)] = raw.data() + std::size_t(r) * width * 2;
  if (!write_all(png, info, png_uint_32(width), png_uint_32(height), rows.data())) {
    throw Error(std::string("PNG encode failed: ") + ctx.message);
  }
  return out;
}

}  // namespace plidar::detail
