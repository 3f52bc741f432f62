#pragma once

#include <complex>
#include <vector>

#include "rift2/image.h"

namespace rift2 {

struct BankParams {
  int n_scales = 4;
  int n_orient = 6;
  double min_wavelength = 3.0;
  double scale_mult = 2.1;
  double sigma_on_f = 0.55;
  // Angular separation that sets the width of the angular Gaussian; a value
  // <= 0 means pi / n_orient.
  double orientation_spread = 0.0;
  double noise_k = 2.0;

  double OrientationSpread() const;
  // Orientation angle of channel `o` (0-based): o * pi / n_orient.
  double OrientationAngle(int o) const;
  // min_wavelength * scale_mult^s for 0-based scale s.
  double Wavelength(int s) const;
  void Validate() const;
};

// Ratio between the orientation spread and the standard deviation of the
// angular Gaussian.
inline constexpr double kThetaSpreadOnSigma = 1.2;
// Radius (normalized frequency) and order of the Butterworth low-pass taper.
inline constexpr double kLowPassCutoff = 0.45;
inline constexpr int kLowPassOrder = 15;
// Guard in the PC energy normalization.
inline constexpr double kPcEpsilon = 1e-4;
// Frequency-spread weighting of PC: sigmoid cut-off and gain.
inline constexpr double kPcSpreadCutoff = 0.5;
inline constexpr double kPcSpreadGain = 10.0;

// Frequency-domain transfer functions, real-valued, one per
// (scale, orientation), laid out in the DFT bin order of an image of the
// given size.
class FilterBank {
 public:
  int Width() const { return width_; }
  int Height() const { return height_; }
  const BankParams& Params() const { return params_; }
  int NumFilters() const { return static_cast<int>(filters_.size()); }

  const std::vector<double>& Filter(int scale, int orient) const {
    return filters_[static_cast<std::size_t>(scale) * params_.n_orient +
                    orient];
  }

 private:
  friend FilterBank BuildFilterBank(int, int, const BankParams&);

  int width_ = 0;
  int height_ = 0;
  BankParams params_;
  std::vector<std::vector<double>> filters_;
};

FilterBank BuildFilterBank(int width, int height, const BankParams& params);

// Even (real) and odd (imaginary) quadrature responses plus their modulus,
// for every (scale, orientation).
class ConvolutionStack {
 public:
  ConvolutionStack() = default;
  // All responses zero.
  ConvolutionStack(int width, int height, int n_scales, int n_orient);

  int Width() const { return width_; }
  int Height() const { return height_; }
  int NumScales() const { return n_scales_; }
  int NumOrient() const { return n_orient_; }

  Image& Even(int s, int o) { return even_[Slot(s, o)]; }
  Image& Odd(int s, int o) { return odd_[Slot(s, o)]; }
  Image& Amplitude(int s, int o) { return amplitude_[Slot(s, o)]; }
  const Image& Even(int s, int o) const { return even_[Slot(s, o)]; }
  const Image& Odd(int s, int o) const { return odd_[Slot(s, o)]; }
  const Image& Amplitude(int s, int o) const { return amplitude_[Slot(s, o)]; }

 private:
  std::size_t Slot(int s, int o) const {
    return static_cast<std::size_t>(s) * n_orient_ + o;
  }

  int width_ = 0;
  int height_ = 0;
  int n_scales_ = 0;
  int n_orient_ = 0;
  std::vector<Image> even_;
  std::vector<Image> odd_;
  std::vector<Image> amplitude_;
};

ConvolutionStack ApplyBank(const Image& img, const FilterBank& bank);

// A_o: per-orientation sum of amplitudes over scales, orientation order.
std::vector<Image> OrientationAmplitudes(const ConvolutionStack& stack);

struct PCField {
  std::vector<Image> a_o;
  std::vector<Image> pc_per_orientation;
  Image moment_max;  // edge strength M
  Image moment_min;  // cornerness m
};

// Per-orientation phase congruency and the moment maps. `a_o` is filled from
// the same stack.
PCField PhaseCongruencyMoments(const ConvolutionStack& stack,
                               const BankParams& params);

// BuildFilterBank + ApplyBank + PhaseCongruencyMoments.
PCField ComputePCField(const Image& img, const BankParams& params);

}  // namespace rift2
