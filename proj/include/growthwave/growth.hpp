#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "growthwave/poisson.hpp"
#include "growthwave/wavelet.hpp"
#include "growthwave/weight.hpp"

namespace growthwave {

// max over the t-grid and x-grid of |u(x,t)| / v(t); a lower bound on the continuum norm.
double growth_norm(const HarmonicField& field, const Weight& v);

struct MProfile {
  std::vector<int> N;     // 0..J-1
  std::vector<double> M;  // max over the t-grid of ||s_N(u(., t))||_inf
};

// Profile and block norms gathered in one pass over the t-grid.
struct FieldScan {
  MProfile profile;
  std::vector<double> block_sup;  // max_t ||g_l(., t)||_inf, l = 0..l_max of the grid-fitted plan
  double remainder_sup = 0.0;
  std::vector<long> alphas;       // grid-fitted levels used for the blocks
};

// Levels N < j0 use the scaling part alone (no generations below j0 exist on the torus basis).
FieldScan scan_field(const HarmonicField& field, const WaveletBasis& basis, const ScalePlan& plan);
MProfile msum_profile(const HarmonicField& field, const WaveletBasis& basis);

struct GrowthReport {
  double K_direct = 0.0;
  std::vector<int> N;
  std::vector<double> M_profile;
  std::vector<double> v_at_N;
  double K_wavelet = 0.0;
  double equivalence_ratio = 0.0;
  double h_v0_trend = 0.0;  // least-squares slope of M_N / v(2^-N) against N
  double first_quarter_mean = 0.0;
  double last_quarter_mean = 0.0;
  bool h_v0_candidate = false;
  std::vector<double> block_ratio;  // max_t ||g_l|| / v(2^{-alpha_l})
};

GrowthReport characterize(const HarmonicField& field, const Weight& v, const WaveletBasis& basis,
                          const ScalePlan& plan);

enum class CoefficientDirection { Forward, Converse };

struct CoefficientCheck {
  double max_ratio = 0.0;          // max |c_jk| 2^{j/2} / v(2^-j)
  double max_scaling_ratio = 0.0;  // max |b_k| 2^{j0/2}
  double bound = 0.0;
  bool pass = false;
};

// Forward: pass iff max_ratio <= bound (bound = C times the norm estimate).
// Converse: the coefficient hypotheses with constant `bound` (= B); needs a power-type plan.
CoefficientCheck coefficient_check(const std::vector<CoeffTree>& trees, const Weight& v, const ScalePlan& plan,
                                   CoefficientDirection direction, double bound);
// Trees of the boundary and of every t-grid level.
std::vector<CoeffTree> field_coefficients(const HarmonicField& field, const WaveletBasis& basis);

// Seeded member: block l drawn with Bernoulli signs on generations (alpha_{l-1}, alpha_l], rescaled so
// ||g_l||_inf = B v(2^{-alpha_l}); scaling part rescaled to sup B. Only blocks that fit below J are drawn.
GridFunction random_member(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, double B,
                           std::uint64_t seed, int J);
// Same draw returned as coefficients.
CoeffTree random_member_coefficients(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, double B,
                                     std::uint64_t seed, int J);

// Seeded member with |c_jk| = 2^{-j/2} B v(2^-j) on every generation and |b_k| = 2^{-j0/2} B.
CoeffTree coefficient_member(const Weight& v, const WaveletBasis& basis, double B, std::uint64_t seed, int J);

// Boundary data rescaled so that growth_norm = 1 (zero data returned unchanged).
GridFunction normalize_member(const GridFunction& boundary, const Weight& v);

struct CounterexampleTerm {
  int d = 0;
  int l_d = 0;
  int s_d = 0;
  double norm = 0.0;        // ||nu_d||_inf on the grid
  double ratio = 0.0;       // norm / v(2^{-j s_d})
  double coeff_ratio = 0.0;  // max |c_jk| 2^{j/2} / v(2^-j) of analyze(nu_d)
  GridFunction boundary;
};

struct Counterexample {
  double a = 0.0;           // min of psi over the chosen dyadic interval
  double interval_lo = 0.0, interval_hi = 0.0;
  int step = 0;             // nesting step j
  std::vector<long> k;      // k_s for s = 1..s_max
  std::vector<CounterexampleTerm> terms;
};

Counterexample counterexample_series(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, int d_max,
                                     int J);

}  // namespace growthwave
