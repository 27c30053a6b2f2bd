#pragma once

#include <cstdint>
#include <vector>

#include "growthwave/poisson.hpp"
#include "growthwave/wavelet.hpp"
#include "growthwave/weight.hpp"

namespace growthwave {

// Quarter-dyadic nodes 1 = t_0 > t_1 > ... > t_n = s.
std::vector<double> stieltjes_nodes(double s);

// I_u(., s) = sum_i u(., t_i^mid) (1/v(t_i) - 1/v(t_{i+1})) for a fixed list of scales, realized as one
// Fourier multiplier per scale (the Poisson multiplier is linear in u, so the sum collapses per frequency).
class VerticalAverager {
 public:
  VerticalAverager(const Weight& v, std::vector<double> scales, int J);

  const std::vector<double>& scales() const { return scales_; }
  std::vector<GridFunction> apply(const Spectrum& boundary_spectrum) const;
  GridFunction apply_one(const Spectrum& boundary_spectrum, std::size_t i) const;

 private:
  std::vector<double> scales_;
  int J_;
  std::vector<std::vector<double>> multipliers_;
};

GridFunction vertical_average(const HarmonicField& field, const Weight& v, double s);
// Literal Stieltjes sum through field.at(t_mid); reference route.
GridFunction vertical_average_direct(const HarmonicField& field, const Weight& v, double s);

// G_l(., s) for l = 0..l_max of the grid-fitted plan, followed by the truncated remainder block.
std::vector<GridFunction> block_averages(const GridFunction& vertical, const WaveletBasis& basis, const ScalePlan& plan);
// Blockwise quadrature of g_l(., t) through field.at(t_mid); reference route.
std::vector<GridFunction> block_averages_direct(const HarmonicField& field, const Weight& v, double s,
                                                const WaveletBasis& basis, const ScalePlan& plan);

// Average over dyadic intervals of length 2^-level, broadcast back to the grid.
GridFunction conditional_block(const GridFunction& G, long level);

struct MartingaleTrace {
  std::vector<long> alphas;                      // martingale levels alpha_L <= J
  std::vector<long> block_alphas;                // grid-fitted block levels
  std::vector<GridFunction> G;                   // G_l at the deepest scale 2^-J, remainder last
  std::vector<std::vector<GridFunction>> Lambda;  // Lambda[l][L]
  std::vector<GridFunction> Gamma;               // Gamma[L]
  std::vector<GridFunction> increments;          // Gamma[L+1] - Gamma[L]
  std::vector<GridFunction> S2;                  // S2[N], N = 0..L_max-1
  std::vector<double> tower_residual;            // max_x |E(Gamma_{L+1} | F_L) - Gamma_L|
  std::vector<double> approximation_defect;      // max_x |I_u(x, 2^-alpha_L) - Gamma_L(x)|
  double max_lambda_decay = 0.0;                 // max_{l > L} ||Lambda_{l,L}|| / 2^{alpha_L - alpha_{l-1}}
  double max_block_average = 0.0;                // max_l ||G_l||
};

MartingaleTrace build_martingale(const HarmonicField& field, const Weight& v, const ScalePlan& plan,
                                 const WaveletBasis& basis);

struct SquareFunctionReport {
  std::vector<double> max_S2_per_term;  // max_x S2[N] / (N + 1)
  double max_increment = 0.0;
  bool monotone = true;
};

SquareFunctionReport square_function(const MartingaleTrace& trace);

// max over x, L and quarter-dyadic s in (2^-alpha_{L+1}, 2^-alpha_L) of |I_u(x,s) - I_u(x, 2^-alpha_L)|.
double scale_insensitivity(const HarmonicField& field, const Weight& v, const ScalePlan& plan);

// Triple-log positivity threshold used to admit a scale into the statistic.
inline constexpr double kTripleLogThreshold = 0.05;
double triple_log(const Weight& v, double level);
// Smallest integer level with log log log v(2^-level) > threshold (or -1 beyond 2^20).
long minimal_usable_level(const Weight& v);

struct LILTrial {
  double max_statistic = 0.0;
  std::vector<double> statistic;    // max_x |I_u| / sqrt(log v log log log v), per scale; 0 where unusable
  std::vector<double> naive_ratio;  // max_x |I_u| / log v(s), per scale
  double naive_slope = 0.0;         // least-squares slope against the scale index
  bool naive_decreasing = false;    // strictly decreasing after its peak, peak not at the deepest scale
  bool within_log_bound = true;     // |I_u| <= log v(s) at every scale
};

struct LILReport {
  std::vector<long> alphas;         // scale levels, s = 2^-alpha
  std::vector<bool> usable;         // scale admitted into the statistic
  std::vector<LILTrial> trials;
  double ensemble_max = 0.0;
  double quantile95 = 0.0;
  double fraction_decreasing = 0.0;
  bool all_within_log_bound = true;
  long minimal_usable = 0;
};

// Scales come from plan levels L >= 1 up to 2^-1000; members are drawn on the 2^J grid and normalized.
LILReport lil_montecarlo(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, int trials,
                         std::uint64_t seed, int J, unsigned threads = 1);

}  // namespace growthwave
