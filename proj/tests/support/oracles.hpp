#pragma once

// Reference implementations used only by tests. They follow the defining
// formulas directly and share no code with the library paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "physkit/video/video_tensor.hpp"

namespace physkit::test {

/// O(N^2) 3D DFT straight from the definition.
inline std::vector<std::complex<double>> naive_dft3(const VideoTensor& v) {
  const auto& d = v.dims;
  std::vector<std::complex<double>> out(d.size());
  for (std::uint32_t c = 0; c < d.channels; ++c)
    for (std::uint32_t s = 0; s < d.frames; ++s)
      for (std::uint32_t u = 0; u < d.height; ++u)
        for (std::uint32_t w2 = 0; w2 < d.width; ++w2) {
          std::complex<double> acc(0.0, 0.0);
          for (std::uint32_t t = 0; t < d.frames; ++t)
            for (std::uint32_t h = 0; h < d.height; ++h)
              for (std::uint32_t w = 0; w < d.width; ++w) {
                const double phase = -2.0 * std::numbers::pi *
                                     (double(u) * h / d.height + double(w2) * w / d.width +
                                      double(s) * t / d.frames);
                acc += v.at(c, h, w, t) * std::complex<double>(std::cos(phase), std::sin(phase));
              }
          out[((std::size_t{c} * d.frames + s) * d.height + u) * d.width + w2] = acc;
        }
  return out;
}

inline VideoTensor random_video(std::mt19937_64& rng, VideoDims d) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  VideoTensor v(d);
  for (double& x : v.data) x = U(rng);
  return v;
}

/// Uniformly random rotation via a normalised Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::Quaterniond q(N(rng), N(rng), N(rng), N(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// R1 diag(sigma) R2 with singular values uniform in [lo, hi].
inline Eigen::Matrix3d random_deformation(std::mt19937_64& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  const Eigen::Vector3d sigma(U(rng), U(rng), U(rng));
  return random_rotation(rng) * sigma.asDiagonal() * random_rotation(rng);
}

/// Falling square clip: a bright square of side `size` that starts at
/// (row0, col0) and falls with per-frame acceleration `g` (pixels/frame^2).
/// Rows wrap around the frame. `reverse` plays the motion backwards.
inline VideoTensor falling_square(std::uint32_t H, std::uint32_t W, std::uint32_t T, int row0, int col0,
                                  double g, int size, bool reverse = false, std::uint32_t channels = 1) {
  VideoTensor v(VideoDims{channels, H, W, T});
  for (std::uint32_t t = 0; t < T; ++t) {
    const double tt = reverse ? double(T - 1 - t) : double(t);
    const int top = row0 + static_cast<int>(std::lround(0.5 * g * tt * tt));
    for (int h = top; h < top + size; ++h)
      for (int w = col0; w < col0 + size; ++w)
        for (std::uint32_t c = 0; c < channels; ++c)
          v.at(c, static_cast<std::uint32_t>(((h % int(H)) + int(H)) % int(H)),
               static_cast<std::uint32_t>(((w % int(W)) + int(W)) % int(W)), t) = 1.0;
  }
  return v;
}

}  // namespace physkit::test
