#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace physkit::spectral {

using cplx = std::complex<double>;

/// 1D complex FFT of fixed length. Power-of-two lengths use an iterative
/// radix-2 transform; any other length goes through Bluestein's chirp-z
/// convolution on a padded power-of-two transform.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n_ <= 1) return;
    if (is_pow2(n_)) {
      init_radix2(n_, twiddles_, bitrev_);
      return;
    }
    m_ = 1;
    while (m_ < 2 * n_ - 1) m_ <<= 1;
    init_radix2(m_, twiddles_, bitrev_);
    chirp_.resize(n_);
    const std::size_t two_n = 2 * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      // k^2 mod 2n keeps the phase argument small for large n.
      const std::size_t k2 = (k * k) % two_n;
      const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
      chirp_[k] = cplx(std::cos(angle), std::sin(angle));
    }
    kernel_.assign(m_, cplx(0.0, 0.0));
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) kernel_[k] = kernel_[m_ - k] = std::conj(chirp_[k]);
    radix2(kernel_, false);
  }

  std::size_t size() const { return n_; }

  /// In-place forward transform X_k = sum_n x_n exp(-2 pi i k n / N).
  void forward(std::span<cplx> x) const { transform(x, false); }

  /// In-place inverse transform, including the 1/N normalisation.
  void inverse(std::span<cplx> x) const {
    transform(x, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v *= scale;
  }

 private:
  static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

  static void init_radix2(std::size_t n, std::vector<cplx>& tw, std::vector<std::size_t>& rev) {
    tw.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      tw[k] = cplx(std::cos(angle), std::sin(angle));
    }
    rev.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      rev[i] = r;
    }
  }

  void radix2(std::span<cplx> a, bool inverse) const {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
      if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n / len;
      for (std::size_t start = 0; start < n; start += len)
        for (std::size_t j = 0; j < half; ++j) {
          const cplx w = inverse ? std::conj(twiddles_[j * stride]) : twiddles_[j * stride];
          const cplx u = a[start + j];
          const cplx v = a[start + j + half] * w;
          a[start + j] = u + v;
          a[start + j + half] = u - v;
        }
    }
  }

  void transform(std::span<cplx> x, bool inverse) const {
    if (n_ <= 1) return;
    if (m_ == 0) {
      radix2(x, inverse);
      return;
    }
    // Inverse via conjugation: ifft(x) * N = conj(fft(conj(x))).
    std::vector<cplx> work(m_, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n_; ++k) {
      const cplx xk = inverse ? std::conj(x[k]) : x[k];
      work[k] = xk * chirp_[k];
    }
    radix2(work, false);
    for (std::size_t k = 0; k < m_; ++k) work[k] *= kernel_[k];
    radix2(work, true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const cplx y = work[k] * scale * chirp_[k];
      x[k] = inverse ? std::conj(y) : y;
    }
  }

  std::size_t n_;
  std::size_t m_ = 0;  // Bluestein padded length; 0 for power-of-two plans
  std::vector<cplx> twiddles_;
  std::vector<std::size_t> bitrev_;
  std::vector<cplx> chirp_;
  std::vector<cplx> kernel_;
};

}  // namespace physkit::spectral
