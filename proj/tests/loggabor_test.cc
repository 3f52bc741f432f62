#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rift2/error.h"
#include "rift2/loggabor.h"
#include "rift2/synthetic.h"
#include "test_support.h"

namespace rift2 {
namespace {

using testing::MaxAbs;

Image TestScene(int n = 96) { return synthetic::Scene(n, n, 11); }

TEST(FilterBankTest, DefaultLayout) {
  const BankParams p;
  const FilterBank bank = BuildFilterBank(64, 48, p);
  EXPECT_EQ(bank.NumFilters(), 24);
  EXPECT_EQ(bank.Filter(3, 5).size(), 64u * 48u);
  const double expected[] = {3.0, 6.3, 13.23, 27.783};
  for (int s = 0; s < 4; ++s) EXPECT_NEAR(p.Wavelength(s), expected[s], 1e-12);
  EXPECT_NEAR(p.OrientationSpread(), std::numbers::pi / 6, 1e-15);
  for (int o = 0; o < 6; ++o) EXPECT_DOUBLE_EQ(p.OrientationAngle(o), o * std::numbers::pi / 6);
}

TEST(FilterBankTest, ZeroAtDc) {
  for (const auto& [w, h] : {std::pair{16, 16}, {17, 31}, {64, 40}}) {
    BankParams p;
    p.n_scales = 3;
    p.n_orient = 4;
    const FilterBank bank = BuildFilterBank(w, h, p);
    for (int s = 0; s < p.n_scales; ++s) {
      for (int o = 0; o < p.n_orient; ++o) EXPECT_EQ(bank.Filter(s, o)[0], 0.0);
    }
  }
}

TEST(FilterBankTest, PeaksNearCenterFrequencyAlongOrientation) {
  // Along the u axis, the orientation-0 filter at scale s peaks near
  // 1 / wavelength(s).
  const int n = 256;
  const BankParams p;
  const FilterBank bank = BuildFilterBank(n, n, p);
  for (int s = 0; s < p.n_scales; ++s) {
    const auto& f = bank.Filter(s, 0);
    int best = 1;
    for (int k = 1; k < n / 2; ++k) {
      if (f[k] > f[best]) best = k;
    }
    EXPECT_NEAR(static_cast<double>(best) / n, 1.0 / p.Wavelength(s), 2.0 / n) << s;
  }
}

TEST(FilterBankTest, RejectsBadParams) {
  EXPECT_THROW(BuildFilterBank(15, 32, BankParams{}), ParameterError);
  BankParams p;
  p.n_orient = 1;
  EXPECT_THROW(BuildFilterBank(32, 32, p), ParameterError);
  p = {};
  p.sigma_on_f = 1.0;
  EXPECT_THROW(p.Validate(), ParameterError);
  p = {};
  p.scale_mult = 1.0;
  EXPECT_THROW(p.Validate(), ParameterError);
  p = {};
  p.min_wavelength = 1.5;
  EXPECT_THROW(p.Validate(), ParameterError);
}

TEST(ApplyBankTest, DimensionMismatch) {
  const FilterBank bank = BuildFilterBank(32, 32, BankParams{});
  EXPECT_THROW(ApplyBank(Image(32, 33), bank), ParameterError);
}

TEST(ApplyBankTest, ConstantImageHasNoResponse) {
  const FilterBank bank = BuildFilterBank(40, 40, BankParams{});
  const ConvolutionStack stack = ApplyBank(Image(40, 40, 0.6), bank);
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 6; ++o) EXPECT_LE(MaxAbs(stack.Amplitude(s, o).Data()), 1e-10);
  }
}

TEST(ApplyBankTest, AmplitudeIsHomogeneous) {
  const Image img = TestScene();
  const FilterBank bank = BuildFilterBank(img.Width(), img.Height(), BankParams{});
  const ConvolutionStack base = ApplyBank(img, bank);
  for (const double a : {0.5, 2.0, 10.0}) {
    Image scaled = img;
    for (double& v : scaled.Data()) v *= a;
    const ConvolutionStack st = ApplyBank(scaled, bank);
    for (int s = 0; s < 4; ++s) {
      for (int o = 0; o < 6; ++o) {
        const auto ref = base.Amplitude(s, o).Data();
        const auto got = st.Amplitude(s, o).Data();
        const double scale = a * MaxAbs(ref);
        for (std::size_t i = 0; i < ref.size(); ++i) {
          ASSERT_LE(std::abs(got[i] - a * ref[i]), 1e-9 * scale) << a << " " << s << " " << o;
        }
      }
    }
  }
}

TEST(ApplyBankTest, OffsetIsAnnihilated) {
  const Image img = TestScene();
  const FilterBank bank = BuildFilterBank(img.Width(), img.Height(), BankParams{});
  const ConvolutionStack base = ApplyBank(img, bank);
  Image shifted = img;
  for (double& v : shifted.Data()) v += 0.37;
  const ConvolutionStack st = ApplyBank(shifted, bank);
  for (int s = 0; s < 4; ++s) {
    for (int o = 0; o < 6; ++o) {
      const double scale = MaxAbs(base.Amplitude(s, o).Data());
      const auto e0 = base.Even(s, o).Data(), e1 = st.Even(s, o).Data();
      const auto o0 = base.Odd(s, o).Data(), o1 = st.Odd(s, o).Data();
      for (std::size_t i = 0; i < e0.size(); ++i) {
        ASSERT_LE(std::abs(e0[i] - e1[i]), 1e-9 * scale);
        ASSERT_LE(std::abs(o0[i] - o1[i]), 1e-9 * scale);
      }
    }
  }
}

TEST(ApplyBankTest, VerticalStepPrefersHorizontalChannel) {
  // Intensity varies along x, so the edge normal points along x: the
  // orientation-0 channel (index 1) must carry the most energy.
  const int n = 64;
  Image img(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = n / 2; x < n; ++x) img(x, y) = 1.0;
  }
  const FilterBank bank = BuildFilterBank(n, n, BankParams{});
  const std::vector<Image> a_o = OrientationAmplitudes(ApplyBank(img, bank));
  std::vector<double> energy(6, 0.0);
  for (int o = 0; o < 6; ++o) {
    for (int y = 0; y < n; ++y) {
      for (int x = n / 2 - 3; x <= n / 2 + 2; ++x) energy[o] += a_o[o](x, y);
    }
  }
  for (int o = 1; o < 6; ++o) EXPECT_GT(energy[0], energy[o]) << o;
}

TEST(OrientationAmplitudesTest, SumsOverScales) {
  ConvolutionStack zero(5, 4, 2, 3);
  for (const Image& ch : OrientationAmplitudes(zero)) {
    ASSERT_EQ(ch.Width(), 5);
    EXPECT_EQ(MaxAbs(ch.Data()), 0.0);
  }
  ConvolutionStack st(5, 4, 2, 3);
  st.Amplitude(0, 1) = Image(5, 4, 1.5);
  st.Amplitude(1, 1) = Image(5, 4, 2.5);
  const std::vector<Image> a_o = OrientationAmplitudes(st);
  ASSERT_EQ(a_o.size(), 3u);
  for (double v : a_o[1].Data()) EXPECT_EQ(v, 4.0);
  for (double v : a_o[0].Data()) EXPECT_EQ(v, 0.0);
}

TEST(OrientationAmplitudesTest, SingleScaleIsIdentity) {
  BankParams p;
  p.n_scales = 1;
  const Image img = TestScene(48);
  const ConvolutionStack st = ApplyBank(img, BuildFilterBank(48, 48, p));
  const std::vector<Image> a_o = OrientationAmplitudes(st);
  for (int o = 0; o < 6; ++o) EXPECT_EQ(a_o[o], st.Amplitude(0, o));
}

TEST(PhaseCongruencyTest, ConstantImageHasZeroMoments) {
  const PCField f = ComputePCField(Image(48, 48, 0.4), BankParams{});
  EXPECT_LE(MaxAbs(f.moment_max.Data()), 1e-6);
  EXPECT_LE(MaxAbs(f.moment_min.Data()), 1e-6);
}

TEST(PhaseCongruencyTest, BoundsAndMomentOrdering) {
  std::vector<Image> images = {TestScene(), synthetic::Noise(64, 80, 5),
                               synthetic::SquareGrid(64, 64, 6, 16)};
  synthetic::SceneOptions noisy;
  noisy.noise_sigma = 0.05;
  images.push_back(synthetic::Scene(72, 72, 2, noisy));
  for (const Image& img : images) {
    const PCField f = ComputePCField(img, BankParams{});
    for (const Image& pc : f.pc_per_orientation) {
      for (double v : pc.Data()) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0 + 1e-9);
      }
    }
    for (std::size_t i = 0; i < f.moment_max.NumPixels(); ++i) {
      ASSERT_GE(f.moment_max.Data()[i], f.moment_min.Data()[i]);
      ASSERT_GE(f.moment_min.Data()[i], -1e-9);
    }
  }
}

TEST(PhaseCongruencyTest, MomentsFollowClosedForm) {
  const Image img = TestScene(48);
  const BankParams p;
  const PCField f = ComputePCField(img, p);
  for (std::size_t i = 0; i < f.moment_max.NumPixels(); i += 37) {
    double a = 0, b = 0, c = 0;
    for (int o = 0; o < 6; ++o) {
      const double t = o * std::numbers::pi / 6;
      const double pc = f.pc_per_orientation[o].Data()[i];
      a += std::pow(pc * std::cos(t), 2);
      b += 2 * pc * std::cos(t) * pc * std::sin(t);
      c += std::pow(pc * std::sin(t), 2);
    }
    const double root = std::sqrt(b * b + (a - c) * (a - c));
    EXPECT_NEAR(f.moment_max.Data()[i], 0.5 * (a + c + root), 1e-12);
    EXPECT_NEAR(f.moment_min.Data()[i], std::max(0.5 * (a + c - root), 0.0), 1e-12);
  }
}

TEST(PhaseCongruencyTest, StepEdgeMaximumMatchesOneDimensionalOracle) {
  // Periodic frame: a step at x = 40 and the wrap-around step at x = 0. The
  // search window excludes the wrap-around edge.
  const int n = 96;
  const int step = 40;
  Image img(n, n);
  std::vector<double> profile(n, 0.0);
  for (int x = step; x < n; ++x) profile[x] = 0.8;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) img(x, y) = 0.1 + profile[x];
  }
  const std::vector<double> oracle = testing::PhaseCongruency1D(profile);
  const int lo = 16, hi = n - 16;
  int oracle_peak = lo;
  for (int x = lo; x < hi; ++x) {
    if (oracle[x] > oracle[oracle_peak]) oracle_peak = x;
  }
  ASSERT_NEAR(oracle_peak, step, 1);

  const PCField f = ComputePCField(img, BankParams{});
  for (const int y : {10, n / 2, n - 11}) {
    int peak = lo;
    for (int x = lo; x < hi; ++x) {
      if (f.moment_max(x, y) > f.moment_max(peak, y)) peak = x;
    }
    EXPECT_LE(std::abs(peak - oracle_peak), 1) << "row " << y;
  }
}

}  // namespace
}  // namespace rift2
