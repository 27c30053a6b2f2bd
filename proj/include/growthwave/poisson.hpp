#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "growthwave/wavelet.hpp"
#include "growthwave/weight.hpp"

namespace growthwave {

// Half spectrum X_k, k = 0..N/2, of real samples (unnormalized forward DFT).
using Spectrum = std::vector<std::complex<double>>;

Spectrum forward_spectrum(const GridFunction& f);
GridFunction inverse_spectrum(const Spectrum& X, int J);
// Inverse transform of X_k * m(k) for k = 0..N/2.
GridFunction apply_multiplier(const Spectrum& X, int J, const std::function<double(long)>& m);
// Torus convolution by grid quadrature: (f * g)(x) = int f(y) g(x - y) dy.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

// Periodic Poisson kernel sinh(2 pi s) / (cosh(2 pi s) - cos(2 pi x)).
double periodic_poisson_kernel(double x, double s);

GridFunction poisson_extend(const GridFunction& f, double t);

// Half-dyadic evaluation scales 2^{-j/2}, j = 0..2J.
std::vector<double> half_dyadic_scales(int J);

// u(., t) for a fixed boundary; levels on the t-grid are computed once on first use.
class HarmonicField {
 public:
  explicit HarmonicField(GridFunction boundary);

  const GridFunction& boundary() const { return boundary_; }
  int resolution() const { return boundary_.level(); }
  const Spectrum& spectrum() const { return spectrum_; }
  const std::vector<double>& t_grid() const { return t_grid_; }
  const GridFunction& level(std::size_t i) const;
  GridFunction at(double t) const;

 private:
  struct Cache;
  GridFunction boundary_;
  Spectrum spectrum_;
  std::vector<double> t_grid_;
  std::shared_ptr<Cache> cache_;
};

// C-infinity bridge: 1 on [0,1], 0 on [2, inf).
double smoothstep(double x);

struct SigmaKernel {
  double delta = 1.0;
  std::vector<double> fourier_symbol;  // k = 0..N/2
  GridFunction kernel;
  double l1_norm = 0.0;
};

double sigma_symbol(double delta, double k);
SigmaKernel sigma_kernel(double delta, int J);

// First frequency |k| > cutoff carrying more than rel_tol of the peak magnitude.
std::optional<long> bandlimit_violation(const GridFunction& sigma, double cutoff, double rel_tol = 1e-12);

struct PairingReport {
  std::vector<double> t;
  std::vector<double> pairings;
  double max_abs_pairing = 0.0;
  double sigma_l1 = 0.0;
  double ratio = 0.0;
};

PairingReport pairing_bound_check(const HarmonicField& field, const GridFunction& sigma, double delta, const Weight& v);

// Centered r-fold convolution of the indicator of [-1/2, 1/2].
double box_spline(int r, double x);

struct DilatedReport {
  std::vector<double> a;
  std::vector<double> max_ratio_per_a;
  double max_ratio = 0.0;
};

// Sweeps a in `scales`, all grid points y and the field's t-grid.
DilatedReport dilated_test_pairing(const HarmonicField& field, int r_fold, const std::vector<double>& scales,
                                   const Weight& v, int m);

struct DefectPair {
  double defect_PE = 0.0;
  double defect_DP = 0.0;
};

// Projection defects against the periodic Poisson kernel P_s, projection level J_level, grid 2^J.
DefectPair mra_poisson_defect(const WaveletBasis& basis, double s, int J_level, int J);
// Same quantities with the constant function in place of P_s (reproduced exactly).
DefectPair mra_constant_defect(const WaveletBasis& basis, int J_level, int J);

}  // namespace growthwave
