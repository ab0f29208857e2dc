#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "physkit/spectral/spectrum.hpp"
#include "support/oracles.hpp"

using namespace physkit;
using namespace physkit::spectral;

namespace {

EnergySpectrum energy_of(const VideoTensor& v) { return energy_spectrum(dft3(v)); }

EnergySpectrum make_energy(std::vector<double> e) {
  return {1, 1, static_cast<std::uint32_t>(e.size()), std::move(e)};
}

}  // namespace

TEST(Fft, MatchesNaiveDftForAllSmallLengths) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t n = 1; n <= 40; ++n) {
    std::vector<cplx> x(n);
    for (auto& z : x) z = cplx(U(rng), U(rng));
    std::vector<cplx> ref(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        const double a = -2.0 * std::numbers::pi * double(k * j) / double(n);
        ref[k] += x[j] * cplx(std::cos(a), std::sin(a));
      }
    FftPlan plan(n);
    auto y = x;
    plan.forward(y);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(y[k] - ref[k]), 0.0, 1e-10 * n) << n;
    plan.inverse(y);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(y[k] - x[k]), 0.0, 1e-12) << n;
  }
}

TEST(Dft3, ConstantVideoConcentratesInDc) {
  const VideoDims d{1, 3, 5, 6};
  VideoTensor v(d);
  for (double& x : v.data) x = 0.7;
  const auto s = dft3(v);
  const double hwt = 3 * 5 * 6;
  EXPECT_NEAR(s.at(0, 0, 0, 0).real(), 0.7 * hwt, 1e-9 * hwt);
  EXPECT_NEAR(s.at(0, 0, 0, 0).imag(), 0.0, 1e-9 * hwt);
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) EXPECT_LT(std::abs(s.coeffs[i]), 1e-9 * hwt);
}

TEST(Dft3, ImpulseHasFlatSpectrum) {
  VideoTensor v({1, 4, 3, 5});
  v.at(0, 0, 0, 0) = 1.0;
  for (const auto& z : dft3(v).coeffs) {
    EXPECT_NEAR(z.real(), 1.0, 1e-12);
    EXPECT_NEAR(z.imag(), 0.0, 1e-12);
  }
}

TEST(Dft3, TwoPointTransform) {
  const double a = 0.8, b = 0.3;
  const auto s = dft3(VideoTensor({1, 1, 1, 2}, {a, b}));
  EXPECT_NEAR(s.coeffs[0].real(), a + b, 1e-15);
  EXPECT_NEAR(s.coeffs[1].real(), a - b, 1e-15);
  EXPECT_NEAR(s.coeffs[1].imag(), 0.0, 1e-15);
}

TEST(Dft3, InverseRecoversInput) {
  std::mt19937_64 rng(7);
  const auto v = test::random_video(rng, {3, 6, 7, 5});
  const auto back = idft3(dft3(v));
  for (std::size_t i = 0; i < v.data.size(); ++i) EXPECT_NEAR(back[i], v.data[i], 1e-9);
}

TEST(Dft3, MatchesNaiveOracle) {
  std::mt19937_64 rng(8);
  const auto v = test::random_video(rng, {2, 5, 6, 7});
  const auto fast = dft3(v).coeffs;
  const auto slow = test::naive_dft3(v);
  for (std::size_t i = 0; i < fast.size(); ++i)
    EXPECT_LE(std::abs(fast[i] - slow[i]), 1e-9 * std::max(1.0, std::abs(slow[i])));
}

TEST(Dft3, ParsevalIdentity) {
  std::mt19937_64 rng(10);
  const auto v = test::random_video(rng, {3, 8, 6, 9});
  double spatial = 0.0, spectral = 0.0;
  for (double x : v.data) spatial += x * x;
  for (const auto& z : dft3(v).coeffs) spectral += std::norm(z);
  EXPECT_NEAR(spectral, 8 * 6 * 9 * spatial, 1e-6 * spectral);
}

TEST(Dft3, EmptyTensorRejected) {
  EXPECT_THROW(dft3(VideoTensor({1, 2, 2, 0})), Error);
}

TEST(Energy, ConstantVideoIsSingleBin) {
  VideoTensor v({2, 3, 3, 3});
  for (double& x : v.data) x = 0.25;
  const auto e = energy_of(v);
  EXPECT_NEAR(e.at(0, 0, 0), 1.0, 1e-12);
  for (std::size_t i = 1; i < e.energy.size(); ++i) EXPECT_NEAR(e.energy[i], 0.0, 1e-12);
}

TEST(Energy, TwoPointSpectrumSplitsEvenly) {
  const auto e = energy_of(VideoTensor({1, 1, 1, 2}, {1.0, 0.0}));
  EXPECT_NEAR(e.energy[0], 0.5, 1e-15);
  EXPECT_NEAR(e.energy[1], 0.5, 1e-15);
}

TEST(Energy, ZeroVideoIsAnError) {
  try {
    energy_of(VideoTensor({1, 2, 2, 2}));
    FAIL() << "expected ZeroEnergy";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_energy);
  }
}

TEST(Energy, IsADistribution) {
  std::mt19937_64 rng(12);
  const auto e = energy_of(test::random_video(rng, {3, 7, 5, 6}));
  double total = 0.0;
  for (double x : e.energy) {
    EXPECT_GE(x, 0.0);
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(TvDistance, HandValues) {
  EXPECT_EQ(tv_distance(make_energy({0.5, 0.5}), make_energy({0.5, 0.5})), 0.0);
  EXPECT_NEAR(tv_distance(make_energy({0.5, 0.5}), make_energy({1.0, 0.0})), 0.5, 1e-15);
  EXPECT_NEAR(tv_distance(make_energy({1.0, 0.0, 0.0}), make_energy({0.0, 0.3, 0.7})), 1.0, 1e-15);
  EXPECT_THROW(tv_distance(make_energy({1.0}), make_energy({0.5, 0.5})), Error);
}

TEST(TvDistance, SymmetricBoundedAndTriangle) {
  std::mt19937_64 rng(13);
  std::exponential_distribution<double> X(1.0);
  auto random_dist = [&](std::size_t n) {
    std::vector<double> e(n);
    double s = 0.0;
    for (double& x : e) s += (x = X(rng));
    for (double& x : e) x /= s;
    return make_energy(e);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_dist(12), b = random_dist(12), c = random_dist(12);
    const double ab = tv_distance(a, b), bc = tv_distance(b, c), ac = tv_distance(a, c);
    EXPECT_EQ(ab, tv_distance(b, a));
    EXPECT_LE(ab, 1.0);
    EXPECT_LE(ac, ab + bc + 1e-15);
  }
}

TEST(Pmf, IdenticalVideosHitTheFloor) {
  std::mt19937_64 rng(14);
  const auto v = test::random_video(rng, {3, 4, 4, 4});
  EXPECT_NEAR(pmf(v, v), -std::log(1e-9), 1e-12);
  EXPECT_NEAR(pmf(v, v), 20.7233, 1e-4);
}

TEST(Pmf, HalfTvGivesLn2) {
  // E_gen = (0.5, 0.5) from [1, 0]; E_ref = (1, 0) from a constant clip.
  const VideoTensor gen({1, 1, 1, 2}, {1.0, 0.0});
  const VideoTensor ref({1, 1, 1, 2}, {0.5, 0.5});
  const auto r = pmf_report(gen, ref);
  EXPECT_NEAR(r.tv_distance, 0.5, 1e-15);
  EXPECT_NEAR(r.pmf, 0.6931, 1e-4);
}

TEST(Pmf, ShiftedCopyScoresTheMaximum) {
  std::mt19937_64 rng(15);
  const auto v = test::random_video(rng, {3, 6, 5, 7});
  const auto r = pmf_report(circular_shift(v, 2, -3, 4), v);
  EXPECT_LT(r.tv_distance, 1e-9);
  EXPECT_NEAR(r.pmf, -std::log(1e-9), 1e-12);
}

TEST(Pmf, DimensionMismatchAndZeroEnergy) {
  const VideoTensor a({1, 2, 2, 2}, std::vector<double>(8, 0.5));
  const VideoTensor b({1, 2, 2, 3}, std::vector<double>(12, 0.5));
  try {
    pmf(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
  try {
    pmf(a, VideoTensor({1, 2, 2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_energy);
  }
  EXPECT_THROW(pmf(a, a, PmfConfig{0.0}), Error);
}

TEST(Pmf, StrictlyDecreasingInTv) {
  // Two-bin reference (1, 0) against gen [1, x]: E_gen = ((1+x)^2, (1-x)^2)/norm.
  const VideoTensor ref({1, 1, 1, 2}, {0.5, 0.5});
  double previous = std::numeric_limits<double>::infinity();
  double previous_tv = -1.0;
  for (double x : {0.9, 0.7, 0.5, 0.3, 0.1}) {
    const auto r = pmf_report(VideoTensor({1, 1, 1, 2}, {1.0, x}), ref);
    EXPECT_GT(r.tv_distance, previous_tv);
    EXPECT_LT(r.pmf, previous);
    previous = r.pmf;
    previous_tv = r.tv_distance;
  }
}

TEST(Invariance, AmplitudeScalesWithBrightness) {
  std::mt19937_64 rng(16);
  const auto v = test::random_video(rng, {3, 5, 6, 4});
  const double lambda = 0.37;
  const auto a = amplitude(dft3(v));
  const auto b = amplitude(dft3(scale_brightness(v, lambda)));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], lambda * a[i], 1e-9 * std::max(1e-3, a[i]));
}

TEST(Invariance, PhaseShiftMatchesShiftTheorem) {
  std::mt19937_64 rng(17);
  const VideoDims d{2, 6, 5, 7};
  const auto v = test::random_video(rng, d);
  const int dh = 2, dw = -1, dt = 3;
  const auto s0 = dft3(v);
  const auto s1 = dft3(circular_shift(v, dh, dw, dt));
  for (std::uint32_t c = 0; c < d.channels; ++c)
    for (std::uint32_t s = 0; s < d.frames; ++s)
      for (std::uint32_t u = 0; u < d.height; ++u)
        for (std::uint32_t w = 0; w < d.width; ++w) {
          if (std::abs(s0.at(c, u, w, s)) <= 1e-6) continue;
          const double expected = 2.0 * std::numbers::pi *
                                  (double(u) * dh / d.height + double(w) * dw / d.width + double(s) * dt / d.frames);
          const double actual = std::arg(s1.at(c, u, w, s)) - std::arg(s0.at(c, u, w, s));
          const double gap = std::remainder(actual - expected, 2.0 * std::numbers::pi);
          EXPECT_NEAR(gap, 0.0, 1e-6);
        }
}

TEST(Invariance, EnergyUnchangedByShiftAndBrightness) {
  std::mt19937_64 rng(18);
  std::uniform_int_distribution<int> D(-10, 10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = test::random_video(rng, {3, 8, 9, 6});
    const auto e = energy_of(v);
    EXPECT_LT(tv_distance(e, energy_of(circular_shift(v, D(rng), D(rng), D(rng)))), 1e-9);
    EXPECT_LT(tv_distance(e, energy_of(scale_brightness(v, 0.3))), 1e-9);
  }
}

TEST(ToyOrdering, ShiftBeatsHalfSpeedBeatsReversal) {
  const auto original = test::falling_square(32, 32, 16, 1, 10, 0.18, 5);
  const auto shifted = test::falling_square(32, 32, 16, 3, 17, 0.18, 5);
  const auto half = test::falling_square(32, 32, 16, 1, 10, 0.09, 5);
  const auto reversed = test::falling_square(32, 32, 16, 1, 10, 0.18, 5, true);
  const double p_shift = pmf(shifted, original);
  const double p_half = pmf(half, original);
  const double p_rev = pmf(reversed, original);
  EXPECT_GT(p_shift, p_half);
  EXPECT_GT(p_half, p_rev);
}
