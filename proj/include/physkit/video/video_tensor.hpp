#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "physkit/error.hpp"

namespace physkit {

struct VideoDims {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t frames = 0;

  std::size_t size() const {
    return std::size_t{channels} * height * width * frames;
  }
  friend bool operator==(const VideoDims&, const VideoDims&) = default;
};

inline std::string to_string(const VideoDims& d) {
  return std::to_string(d.channels) + "x" + std::to_string(d.height) + "x" +
         std::to_string(d.width) + "x" + std::to_string(d.frames);
}

/// Dense C x H x W x T signal with values in [0, 1].
///
/// Storage nests (c, t, h, w) with w fastest, which is also the PIOV payload
/// order. Element access is by (c; h, w, t) to match how the spectral code
/// indexes it.
struct VideoTensor {
  VideoDims dims;
  std::vector<double> data;

  VideoTensor() = default;
  explicit VideoTensor(VideoDims d) : dims(d), data(d.size(), 0.0) {}
  VideoTensor(VideoDims d, std::vector<double> values) : dims(d), data(std::move(values)) {}

  std::size_t index(std::uint32_t c, std::uint32_t h, std::uint32_t w, std::uint32_t t) const {
    return ((std::size_t{c} * dims.frames + t) * dims.height + h) * dims.width + w;
  }
  double at(std::uint32_t c, std::uint32_t h, std::uint32_t w, std::uint32_t t) const {
    return data[index(c, h, w, t)];
  }
  double& at(std::uint32_t c, std::uint32_t h, std::uint32_t w, std::uint32_t t) {
    return data[index(c, h, w, t)];
  }

  bool empty() const { return dims.size() == 0; }
};

/// Checks the tensor invariants: payload length, finiteness, [0, 1] range.
inline void validate(const VideoTensor& v) {
  if (v.data.size() != v.dims.size())
    throw Error(Errc::dimension_mismatch,
                "payload has " + std::to_string(v.data.size()) + " values, dims " +
                    to_string(v.dims) + " need " + std::to_string(v.dims.size()));
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    const double x = v.data[i];
    if (!std::isfinite(x))
      throw Error(Errc::non_finite_data, "element " + std::to_string(i) + " is not finite");
    if (x < 0.0 || x > 1.0)
      throw Error(Errc::value_out_of_range,
                  "element " + std::to_string(i) + " = " + std::to_string(x) + " outside [0,1]");
  }
}

inline void require_nonempty(const VideoTensor& v) {
  if (v.empty()) throw Error(Errc::empty_tensor, "tensor has zero elements (" + to_string(v.dims) + ")");
}

/// out(c; h, w, t) = v(c; (h+dh) mod H, (w+dw) mod W, (t+dt) mod T).
inline VideoTensor circular_shift(const VideoTensor& v, long long dh, long long dw, long long dt) {
  VideoTensor out(v.dims);
  if (v.empty()) return out;
  const auto wrap = [](long long x, std::uint32_t n) {
    const long long r = x % static_cast<long long>(n);
    return static_cast<std::uint32_t>(r < 0 ? r + n : r);
  };
  const auto& d = v.dims;
  for (std::uint32_t c = 0; c < d.channels; ++c)
    for (std::uint32_t t = 0; t < d.frames; ++t) {
      const std::uint32_t st = wrap(static_cast<long long>(t) + dt, d.frames);
      for (std::uint32_t h = 0; h < d.height; ++h) {
        const std::uint32_t sh = wrap(static_cast<long long>(h) + dh, d.height);
        for (std::uint32_t w = 0; w < d.width; ++w)
          out.at(c, h, w, t) = v.at(c, sh, wrap(static_cast<long long>(w) + dw, d.width), st);
      }
    }
  return out;
}

inline VideoTensor scale_brightness(const VideoTensor& v, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(Errc::invalid_lambda, "lambda = " + std::to_string(lambda) + " is outside (0, 1]");
  VideoTensor out = v;
  for (double& x : out.data) x *= lambda;
  return out;
}

}  // namespace physkit
