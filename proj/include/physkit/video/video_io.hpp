#pragma once

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "physkit/binary_io.hpp"
#include "physkit/video/video_tensor.hpp"

namespace physkit {

// PIOV layout: "PIOV", u32 version, u32 C, H, W, T, u8 dtype, float32 payload.
inline constexpr std::uint32_t piov_version = 1;
inline constexpr std::uint8_t piov_dtype_float32 = 1;

namespace detail {

struct Raster {
  std::uint32_t width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved channels
};

inline Raster read_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw Error(Errc::io_failure, "cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::io_failure, "libpng initialisation failed");
  }
  Raster r;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::malformed_header, "corrupt PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  r.width = png_get_image_width(png, info);
  r.height = png_get_image_height(png, info);
  r.channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  r.pixels.resize(row_bytes * r.height);
  std::vector<png_bytep> rows(r.height);
  for (std::uint32_t y = 0; y < r.height; ++y) rows[y] = r.pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return r;
}

inline void write_png(const std::filesystem::path& path, const Raster& r) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw Error(Errc::io_failure, "cannot create " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::io_failure, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::io_failure, "PNG write failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, r.width, r.height, 8,
               r.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(r.height);
  for (std::uint32_t y = 0; y < r.height; ++y)
    rows[y] = const_cast<png_bytep>(r.pixels.data() + std::size_t{y} * r.width * r.channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Binary netpbm (P5 gray / P6 rgb), 8-bit only.
inline Raster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw Error(Errc::malformed_header, "unsupported netpbm " + path.string());
  auto next_int = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
      in >> std::ws;
    }
    long v = -1;
    in >> v;
    if (!in || v <= 0) throw Error(Errc::malformed_header, "bad netpbm header in " + path.string());
    return static_cast<std::uint32_t>(v);
  };
  Raster r;
  r.width = next_int();
  r.height = next_int();
  if (next_int() != 255) throw Error(Errc::malformed_header, "only 8-bit netpbm supported: " + path.string());
  in.get();
  r.channels = magic == "P5" ? 1 : 3;
  r.pixels.resize(std::size_t{r.width} * r.height * r.channels);
  in.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (!in) throw Error(Errc::malformed_header, "truncated netpbm payload in " + path.string());
  return r;
}

inline bool is_raster_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

inline Raster read_raster(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" ? read_png(p) : read_pnm(p);
}

inline VideoTensor load_raster_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && is_raster_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::empty_tensor, "no raster frames in " + dir.string());

  std::vector<Raster> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    frames.push_back(read_raster(f));
    const auto& first = frames.front();
    const auto& cur = frames.back();
    if (cur.width != first.width || cur.height != first.height || cur.channels != first.channels)
      throw Error(Errc::dimension_mismatch, f.filename().string() + " differs in size from " +
                                                files.front().filename().string());
  }
  const auto& f0 = frames.front();
  VideoTensor v(VideoDims{f0.channels, f0.height, f0.width, static_cast<std::uint32_t>(frames.size())});
  for (std::uint32_t t = 0; t < v.dims.frames; ++t)
    for (std::uint32_t h = 0; h < f0.height; ++h)
      for (std::uint32_t w = 0; w < f0.width; ++w)
        for (std::uint32_t c = 0; c < f0.channels; ++c)
          v.at(c, h, w, t) =
              frames[t].pixels[(std::size_t{h} * f0.width + w) * f0.channels + c] / 255.0;
  return v;
}

inline VideoTensor load_piov(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  binio::expect_magic(in, "PIOV");
  const auto version = binio::read<std::uint32_t>(in, "version");
  if (version != piov_version)
    throw Error(Errc::malformed_header, "unsupported PIOV version " + std::to_string(version));
  VideoDims d;
  d.channels = binio::read<std::uint32_t>(in, "C");
  d.height = binio::read<std::uint32_t>(in, "H");
  d.width = binio::read<std::uint32_t>(in, "W");
  d.frames = binio::read<std::uint32_t>(in, "T");
  const auto dtype = binio::read<std::uint8_t>(in, "dtype");
  if (dtype != piov_dtype_float32)
    throw Error(Errc::malformed_header, "unsupported PIOV dtype " + std::to_string(dtype));
  VideoTensor v(d);
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    float x = 0;
    in.read(reinterpret_cast<char*>(&x), sizeof x);
    if (!in)
      throw Error(Errc::dimension_mismatch, "payload shorter than declared dims " + to_string(d));
    v.data[i] = binio::to_little(x);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw Error(Errc::dimension_mismatch, "payload longer than declared dims " + to_string(d));
  return v;
}

}  // namespace detail

/// Loads a PIOV file or a directory of lossless frames (.png/.pgm/.ppm,
/// lexicographic order). 8-bit samples map to [0, 1] by division by 255.
inline VideoTensor load_video(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::io_failure, path.string() + " does not exist");
  VideoTensor v = std::filesystem::is_directory(path) ? detail::load_raster_directory(path)
                                                       : detail::load_piov(path);
  validate(v);
  return v;
}

inline void save_video(const VideoTensor& v, const std::filesystem::path& path) {
  require_nonempty(v);
  validate(v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot create " + path.string());
  binio::write_magic(out, "PIOV");
  binio::write(out, piov_version);
  binio::write(out, v.dims.channels);
  binio::write(out, v.dims.height);
  binio::write(out, v.dims.width);
  binio::write(out, v.dims.frames);
  binio::write(out, piov_dtype_float32);
  for (double x : v.data) binio::write(out, static_cast<float>(x));
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

/// Writes one 8-bit PNG per frame (frame_00000.png, ...). C must be 1 or 3.
inline void save_raster_frames(const VideoTensor& v, const std::filesystem::path& dir) {
  require_nonempty(v);
  validate(v);
  if (v.dims.channels != 1 && v.dims.channels != 3)
    throw Error(Errc::dimension_mismatch, "raster frames need 1 or 3 channels");
  std::filesystem::create_directories(dir);
  for (std::uint32_t t = 0; t < v.dims.frames; ++t) {
    detail::Raster r{v.dims.width, v.dims.height, v.dims.channels, {}};
    r.pixels.resize(std::size_t{r.width} * r.height * r.channels);
    for (std::uint32_t h = 0; h < r.height; ++h)
      for (std::uint32_t w = 0; w < r.width; ++w)
        for (std::uint32_t c = 0; c < r.channels; ++c)
          r.pixels[(std::size_t{h} * r.width + w) * r.channels + c] =
              static_cast<std::uint8_t>(std::lround(v.at(c, h, w, t) * 255.0));
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05u.png", t);
    detail::write_png(dir / name, r);
  }
}

}  // namespace physkit
