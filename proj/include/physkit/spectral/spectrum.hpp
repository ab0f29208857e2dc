#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "physkit/error.hpp"
#include "physkit/parallel.hpp"
#include "physkit/spectral/fft.hpp"
#include "physkit/video/video_tensor.hpp"

namespace physkit::spectral {

/// Fourier coefficients (c; u, v, s) stored in the same (c, s, u, v) nesting
/// as VideoTensor, v fastest.
struct ComplexSpectrum {
  VideoDims dims;
  std::vector<cplx> coeffs;

  std::size_t index(std::uint32_t c, std::uint32_t u, std::uint32_t v, std::uint32_t s) const {
    return ((std::size_t{c} * dims.frames + s) * dims.height + u) * dims.width + v;
  }
  const cplx& at(std::uint32_t c, std::uint32_t u, std::uint32_t v, std::uint32_t s) const {
    return coeffs[index(c, u, v, s)];
  }
};

/// Normalised per-frequency energy over (u, v, s), summed across channels.
/// Layout (s, u, v), v fastest.
struct EnergySpectrum {
  std::uint32_t height = 0, width = 0, frames = 0;
  std::vector<double> energy;

  double at(std::uint32_t u, std::uint32_t v, std::uint32_t s) const {
    return energy[(std::size_t{s} * height + u) * width + v];
  }
};

struct PmfConfig {
  double tv_floor = 1e-9;
};

struct PmfResult {
  double pmf = 0.0;
  double tv_distance = 0.0;
};

/// Pairwise summation in a fixed tree order; deterministic and accurate to
/// O(log n) ulps.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace detail {

// Applies a 1D transform along every lane of one axis. Lanes are independent
// so the loop parallelises without changing results.
inline void transform_axis(std::vector<cplx>& data, std::size_t lanes_outer, std::size_t length,
                           std::size_t stride, std::size_t lanes_inner, bool inverse) {
  if (length <= 1) return;
  const FftPlan plan(length);
  parallel_for(lanes_outer * lanes_inner, [&](std::size_t lane) {
    const std::size_t outer = lane / lanes_inner;
    const std::size_t inner = lane % lanes_inner;
    const std::size_t base = outer * length * stride + inner;
    std::vector<cplx> buf(length);
    for (std::size_t k = 0; k < length; ++k) buf[k] = data[base + k * stride];
    if (inverse)
      plan.inverse(buf);
    else
      plan.forward(buf);
    for (std::size_t k = 0; k < length; ++k) data[base + k * stride] = buf[k];
  });
}

inline void transform3(std::vector<cplx>& data, const VideoDims& d, bool inverse) {
  const std::size_t C = d.channels, H = d.height, W = d.width, T = d.frames;
  transform_axis(data, C * T * H, W, 1, 1, inverse);   // along w
  transform_axis(data, C * T, H, W, W, inverse);       // along h
  transform_axis(data, C, T, H * W, H * W, inverse);   // along t
}

}  // namespace detail

/// Channel-separable 3D DFT over (h, w, t) with no windowing or DC removal.
inline ComplexSpectrum dft3(const VideoTensor& v) {
  require_nonempty(v);
  if (v.data.size() != v.dims.size())
    throw Error(Errc::dimension_mismatch, "payload length does not match dims " + to_string(v.dims));
  ComplexSpectrum out{v.dims, std::vector<cplx>(v.data.begin(), v.data.end())};
  detail::transform3(out.coeffs, v.dims, false);
  return out;
}

/// Inverse of dft3; returns the real part (the imaginary residue is rounding).
inline std::vector<double> idft3(const ComplexSpectrum& s) {
  std::vector<cplx> data = s.coeffs;
  detail::transform3(data, s.dims, true);
  std::vector<double> out(data.size());
  std::transform(data.begin(), data.end(), out.begin(), [](const cplx& z) { return z.real(); });
  return out;
}

inline std::vector<double> amplitude(const ComplexSpectrum& s) {
  std::vector<double> out(s.coeffs.size());
  std::transform(s.coeffs.begin(), s.coeffs.end(), out.begin(), [](const cplx& z) { return std::abs(z); });
  return out;
}

inline std::vector<double> phase(const ComplexSpectrum& s) {
  std::vector<double> out(s.coeffs.size());
  std::transform(s.coeffs.begin(), s.coeffs.end(), out.begin(), [](const cplx& z) { return std::arg(z); });
  return out;
}

inline EnergySpectrum energy_spectrum(const ComplexSpectrum& s) {
  const auto& d = s.dims;
  const std::size_t bins = std::size_t{d.height} * d.width * d.frames;
  EnergySpectrum e{d.height, d.width, d.frames, std::vector<double>(bins, 0.0)};
  for (std::uint32_t c = 0; c < d.channels; ++c)
    for (std::size_t b = 0; b < bins; ++b) e.energy[b] += std::norm(s.coeffs[c * bins + b]);
  const double total = pairwise_sum(e.energy);
  if (!(total > 0.0))
    throw Error(Errc::zero_energy, "spectrum has zero total energy (identically zero video)");
  for (double& x : e.energy) x /= total;
  return e;
}

/// Total variation distance 1/2 sum |e1 - e2|, in [0, 1].
inline double tv_distance(const EnergySpectrum& a, const EnergySpectrum& b) {
  if (a.height != b.height || a.width != b.width || a.frames != b.frames ||
      a.energy.size() != b.energy.size())
    throw Error(Errc::dimension_mismatch, "energy spectra have different shapes");
  std::vector<double> diff(a.energy.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a.energy[i] - b.energy[i]);
  return std::clamp(0.5 * pairwise_sum(diff), 0.0, 1.0);
}

inline void validate(const PmfConfig& cfg) {
  if (!(cfg.tv_floor > 0.0 && cfg.tv_floor < 1.0))
    throw Error(Errc::invalid_config, "tv_floor must lie in (0, 1)");
}

/// PMF = -ln max(d_TV(E_gen, E_ref), tv_floor); higher means closer motion.
inline PmfResult pmf_report(const VideoTensor& gen, const VideoTensor& ref, const PmfConfig& cfg = {}) {
  validate(cfg);
  if (gen.dims != ref.dims)
    throw Error(Errc::dimension_mismatch,
                "generated " + to_string(gen.dims) + " vs reference " + to_string(ref.dims));
  const double tv = tv_distance(energy_spectrum(dft3(gen)), energy_spectrum(dft3(ref)));
  return {-std::log(std::max(tv, cfg.tv_floor)), tv};
}

inline double pmf(const VideoTensor& gen, const VideoTensor& ref, const PmfConfig& cfg = {}) {
  return pmf_report(gen, ref, cfg).pmf;
}

}  // namespace physkit::spectral
