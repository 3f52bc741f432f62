#include "rift2/loggabor.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/core.hpp>

#include "rift2/error.h"
#include "rift2/parallel.h"

namespace rift2 {
namespace {

// Signed normalized frequency of DFT bin k out of n, in [-0.5, 0.5).
double BinFrequency(int k, int n) {
  const int signed_k = (k < (n + 1) / 2) ? k : k - n;
  return static_cast<double>(signed_k) / n;
}

double WrapAngle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + values.size() / 2;
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

double BankParams::OrientationSpread() const {
  return orientation_spread > 0.0 ? orientation_spread
                                  : std::numbers::pi / n_orient;
}

double BankParams::OrientationAngle(int o) const {
  return o * std::numbers::pi / n_orient;
}

double BankParams::Wavelength(int s) const {
  return min_wavelength * std::pow(scale_mult, s);
}

void BankParams::Validate() const {
  RIFT2_CHECK_PARAM(n_scales >= 1, "n_scales must be >= 1");
  RIFT2_CHECK_PARAM(n_orient >= 2, "n_orient must be >= 2");
  RIFT2_CHECK_PARAM(n_orient <= 255, "n_orient must fit in a byte");
  RIFT2_CHECK_PARAM(min_wavelength >= 2.0, "min_wavelength must be >= 2");
  RIFT2_CHECK_PARAM(scale_mult > 1.0, "scale_mult must be > 1");
  RIFT2_CHECK_PARAM(sigma_on_f > 0.0 && sigma_on_f < 1.0,
                    "sigma_on_f must lie in (0, 1)");
  RIFT2_CHECK_PARAM(std::isfinite(orientation_spread),
                    "orientation_spread must be finite");
  RIFT2_CHECK_PARAM(noise_k >= 0.0 && std::isfinite(noise_k),
                    "noise_k must be >= 0");
}

FilterBank BuildFilterBank(int width, int height, const BankParams& params) {
  params.Validate();
  RIFT2_CHECK_PARAM(width >= 16 && height >= 16,
                    "filter bank needs an image of at least 16x16");

  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> radius(n);
  std::vector<double> theta(n);
  std::vector<double> lowpass(n);
  for (int r = 0; r < height; ++r) {
    const double v = BinFrequency(r, height);
    for (int c = 0; c < width; ++c) {
      const double u = BinFrequency(c, width);
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      radius[i] = std::hypot(u, v);
      theta[i] = std::atan2(v, u);
      lowpass[i] =
          1.0 / (1.0 + std::pow(radius[i] / kLowPassCutoff, 2 * kLowPassOrder));
    }
  }

  FilterBank bank;
  bank.width_ = width;
  bank.height_ = height;
  bank.params_ = params;
  bank.filters_.resize(static_cast<std::size_t>(params.n_scales) *
                       params.n_orient);

  const double log_sigma_sq = 2.0 * std::pow(std::log(params.sigma_on_f), 2);
  const double theta_sigma = params.OrientationSpread() / kThetaSpreadOnSigma;
  const double theta_denom = 2.0 * theta_sigma * theta_sigma;

  for (int s = 0; s < params.n_scales; ++s) {
    const double f0 = 1.0 / params.Wavelength(s);
    std::vector<double> radial(n);
    for (std::size_t i = 0; i < n; ++i) {
      radial[i] = radius[i] == 0.0
                      ? 0.0
                      : std::exp(-std::pow(std::log(radius[i] / f0), 2) /
                                 log_sigma_sq) *
                            lowpass[i];
    }
    for (int o = 0; o < params.n_orient; ++o) {
      const double angle = params.OrientationAngle(o);
      auto& filter =
          bank.filters_[static_cast<std::size_t>(s) * params.n_orient + o];
      filter.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = WrapAngle(theta[i] - angle);
        filter[i] = radial[i] * std::exp(-d * d / theta_denom);
      }
      filter[0] = 0.0;
    }
  }
  return bank;
}

ConvolutionStack::ConvolutionStack(int width, int height, int n_scales,
                                   int n_orient)
    : width_(width),
      height_(height),
      n_scales_(n_scales),
      n_orient_(n_orient),
      even_(static_cast<std::size_t>(n_scales) * n_orient, Image(width, height)),
      odd_(even_.size(), Image(width, height)),
      amplitude_(even_.size(), Image(width, height)) {}

ConvolutionStack ApplyBank(const Image& img, const FilterBank& bank) {
  if (img.Width() != bank.Width() || img.Height() != bank.Height()) {
    throw ParameterError("image dimensions do not match the filter bank");
  }
  const int w = img.Width();
  const int h = img.Height();
  const BankParams& p = bank.Params();

  cv::Mat spatial(h, w, CV_64F, const_cast<double*>(img.Data().data()));
  cv::Mat spectrum;
  cv::dft(spatial, spectrum, cv::DFT_COMPLEX_OUTPUT);

  ConvolutionStack stack(w, h, p.n_scales, p.n_orient);
  ParallelFor(static_cast<std::size_t>(bank.NumFilters()), [&](std::size_t k) {
    const int s = static_cast<int>(k) / p.n_orient;
    const int o = static_cast<int>(k) % p.n_orient;
    const std::vector<double>& filter = bank.Filter(s, o);

    cv::Mat product(h, w, CV_64FC2);
    for (int r = 0; r < h; ++r) {
      const auto* src = spectrum.ptr<cv::Vec2d>(r);
      auto* dst = product.ptr<cv::Vec2d>(r);
      const double* f = filter.data() + static_cast<std::size_t>(r) * w;
      for (int c = 0; c < w; ++c) dst[c] = src[c] * f[c];
    }
    cv::Mat response;
    cv::dft(product, response,
            cv::DFT_INVERSE | cv::DFT_SCALE | cv::DFT_COMPLEX_OUTPUT);

    Image even(w, h), odd(w, h), amp(w, h);
    for (int r = 0; r < h; ++r) {
      const auto* src = response.ptr<cv::Vec2d>(r);
      for (int c = 0; c < w; ++c) {
        even(c, r) = src[c][0];
        odd(c, r) = src[c][1];
        amp(c, r) = std::hypot(src[c][0], src[c][1]);
      }
    }
    stack.Even(s, o) = std::move(even);
    stack.Odd(s, o) = std::move(odd);
    stack.Amplitude(s, o) = std::move(amp);
  });
  return stack;
}

std::vector<Image> OrientationAmplitudes(const ConvolutionStack& stack) {
  std::vector<Image> a_o;
  a_o.reserve(stack.NumOrient());
  for (int o = 0; o < stack.NumOrient(); ++o) {
    Image sum(stack.Width(), stack.Height());
    auto dst = sum.Data();
    for (int s = 0; s < stack.NumScales(); ++s) {
      const auto src = stack.Amplitude(s, o).Data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    a_o.push_back(std::move(sum));
  }
  return a_o;
}

PCField PhaseCongruencyMoments(const ConvolutionStack& stack,
                               const BankParams& params) {
  RIFT2_CHECK_PARAM(stack.NumScales() == params.n_scales &&
                        stack.NumOrient() == params.n_orient,
                    "stack layout does not match bank params");
  const int w = stack.Width();
  const int h = stack.Height();
  const int n_scales = stack.NumScales();
  const int n_orient = stack.NumOrient();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  PCField field;
  field.a_o = OrientationAmplitudes(stack);
  field.pc_per_orientation.resize(n_orient);

  ParallelFor(static_cast<std::size_t>(n_orient), [&](std::size_t ok) {
    const int o = static_cast<int>(ok);
    std::vector<double> sum_e(n, 0.0), sum_o(n, 0.0), max_an(n, 0.0);
    for (int s = 0; s < n_scales; ++s) {
      const auto e = stack.Even(s, o).Data();
      const auto od = stack.Odd(s, o).Data();
      const auto a = stack.Amplitude(s, o).Data();
      for (std::size_t i = 0; i < n; ++i) {
        sum_e[i] += e[i];
        sum_o[i] += od[i];
        max_an[i] = std::max(max_an[i], a[i]);
      }
    }
    const auto sum_an = field.a_o[o].Data();

    // Rayleigh noise model fitted to the finest scale; the expected noise
    // energy sums the geometric attenuation over scales.
    const auto finest = stack.Amplitude(0, o).Data();
    const double tau = Median({finest.begin(), finest.end()}) /
                       std::sqrt(std::log(4.0));
    const double inv_mult = 1.0 / params.scale_mult;
    const double total_tau =
        tau * (1.0 - std::pow(inv_mult, n_scales)) / (1.0 - inv_mult);
    const double noise_mean = total_tau * std::sqrt(std::numbers::pi / 2.0);
    const double noise_sigma =
        total_tau * std::sqrt((4.0 - std::numbers::pi) / 2.0);
    const double noise_threshold = noise_mean + params.noise_k * noise_sigma;

    Image pc(w, h);
    auto out = pc.Data();
    for (std::size_t i = 0; i < n; ++i) {
      const double x_energy = std::hypot(sum_e[i], sum_o[i]) + kPcEpsilon;
      const double mean_e = sum_e[i] / x_energy;
      const double mean_o = sum_o[i] / x_energy;
      double energy = 0.0;
      for (int s = 0; s < n_scales; ++s) {
        const double e = stack.Even(s, o).Data()[i];
        const double od = stack.Odd(s, o).Data()[i];
        energy += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
      }
      energy = std::max(energy - noise_threshold, 0.0);

      double weight = 1.0;
      if (n_scales > 1) {
        const double spread =
            (sum_an[i] / (max_an[i] + kPcEpsilon) - 1.0) / (n_scales - 1);
        weight = 1.0 / (1.0 + std::exp((kPcSpreadCutoff - spread) *
                                       kPcSpreadGain));
      }
      out[i] = weight * energy / (sum_an[i] + kPcEpsilon);
    }
    field.pc_per_orientation[o] = std::move(pc);
  });

  field.moment_max = Image(w, h);
  field.moment_min = Image(w, h);
  std::vector<double> cos_t(n_orient), sin_t(n_orient);
  for (int o = 0; o < n_orient; ++o) {
    cos_t[o] = std::cos(params.OrientationAngle(o));
    sin_t[o] = std::sin(params.OrientationAngle(o));
  }
  auto big = field.moment_max.Data();
  auto small = field.moment_min.Data();
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int o = 0; o < n_orient; ++o) {
      const double pc = field.pc_per_orientation[o].Data()[i];
      const double cx = pc * cos_t[o];
      const double cy = pc * sin_t[o];
      a += cx * cx;
      b += 2.0 * cx * cy;
      c += cy * cy;
    }
    const double root = std::sqrt(b * b + (a - c) * (a - c));
    big[i] = 0.5 * (c + a + root);
    // m >= 0 analytically (4ac >= b^2); clamp the rounding residue.
    small[i] = std::max(0.5 * (c + a - root), 0.0);
  }
  return field;
}

PCField ComputePCField(const Image& img, const BankParams& params) {
  const FilterBank bank = BuildFilterBank(img.Width(), img.Height(), params);
  const ConvolutionStack stack = ApplyBank(img, bank);
  return PhaseCongruencyMoments(stack, params);
}

}  // namespace rift2
