#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "growthwave/error.hpp"

#include "growthwave/transform.hpp"
#include "growthwave/weight.hpp"

namespace growthwave {

// Samples f(k/N), k = 0..N-1, N = 2^J, on the unit torus.
template <typename Scalar>
class BasicGridFunction {
 public:
  BasicGridFunction() = default;
  explicit BasicGridFunction(Vec<Scalar> samples);
  static BasicGridFunction constant(int J, Scalar value) {
    return BasicGridFunction(Vec<Scalar>::Constant(Eigen::Index(1) << J, value));
  }
  static BasicGridFunction zero(int J) { return constant(J, Scalar(0)); }

  int level() const { return J_; }
  Eigen::Index size() const { return samples_.size(); }
  const Vec<Scalar>& samples() const { return samples_; }
  Vec<Scalar>& samples() { return samples_; }
  Scalar operator[](Eigen::Index i) const { return samples_(i); }

  Scalar sup_norm() const { return samples_.size() ? samples_.cwiseAbs().maxCoeff() : Scalar(0); }
  // trapezoid (= rectangle on the torus) quadrature of |f|
  Scalar l1_norm() const { return samples_.cwiseAbs().sum() / Scalar(samples_.size()); }
  Scalar mean() const { return samples_.sum() / Scalar(samples_.size()); }

 private:
  Vec<Scalar> samples_;
  int J_ = 0;
};

template <typename Scalar>
BasicGridFunction<Scalar>::BasicGridFunction(Vec<Scalar> samples) : samples_(std::move(samples)) {
  const Eigen::Index n = samples_.size();
  if (n < 1 || (n & (n - 1)) != 0) throw ValidationError("grid length must be a power of two");
  while ((Eigen::Index(1) << J_) < n) ++J_;
  if (!samples_.allFinite()) throw ValidationError("grid samples must be finite");
}

using GridFunction = BasicGridFunction<double>;

template <typename Scalar>
BasicGridFunction<Scalar> operator+(const BasicGridFunction<Scalar>& a, const BasicGridFunction<Scalar>& b) {
  return BasicGridFunction<Scalar>(a.samples() + b.samples());
}
template <typename Scalar>
BasicGridFunction<Scalar> operator-(const BasicGridFunction<Scalar>& a, const BasicGridFunction<Scalar>& b) {
  return BasicGridFunction<Scalar>(a.samples() - b.samples());
}
template <typename Scalar>
BasicGridFunction<Scalar> operator*(Scalar c, const BasicGridFunction<Scalar>& a) {
  return BasicGridFunction<Scalar>(c * a.samples());
}

// Daubechies (extremal phase) scaling filter with `order` vanishing moments, length 2*order, sum sqrt(2).
Eigen::VectorXd daubechies_filter(int order);
// g_k = (-1)^k h_{L-1-k}
Eigen::VectorXd quadrature_mirror(const Eigen::VectorXd& lowpass);

struct WaveletBasis {
  int order = 1;
  double r_eff = 0.55;
  Eigen::VectorXd lowpass;
  Eigen::VectorXd highpass;
  int tab_depth = 12;
  // phi_table[i] = phi(i / 2^tab_depth) on [0, support_length]; same for psi
  Eigen::VectorXd phi_table;
  Eigen::VectorXd psi_table;
  int coarse_level = 3;
  int support_length = 1;
  int cascade_iterations = 0;
  double cascade_change = 0.0;

  double phi(double x) const;
  double psi(double x) const;
  double table_step() const { return std::ldexp(1.0, -tab_depth); }
};

// Hoelder-type regularity estimate used for order selection.
double regularity_estimate(int order);
int required_order(const ScalePlan& plan);

WaveletBasis build_basis(int order, int tab_depth = 12, int j0 = 3);

struct CoeffTree {
  int j0 = 0;
  int J = 0;
  Eigen::VectorXd scaling;              // length 2^j0
  std::vector<Eigen::VectorXd> details;  // details[j - j0], length 2^j, j0 <= j < J

  const Eigen::VectorXd& detail(int j) const { return details[static_cast<std::size_t>(j - j0)]; }
  Eigen::VectorXd& detail(int j) { return details[static_cast<std::size_t>(j - j0)]; }
  double energy() const;
  static CoeffTree zero(int j0, int J);
};

// Continuum-scaled coefficients: samples / sqrt(N) are the level-J scaling coefficients.
CoeffTree analyze(const GridFunction& f, const WaveletBasis& basis);
GridFunction synthesize(const CoeffTree& tree, const WaveletBasis& basis);

// Orthonormal scaling coefficients at every level 0..J of the periodized pyramid (index = level).
std::vector<Eigen::VectorXd> approximation_pyramid(const GridFunction& f, const WaveletBasis& basis);
// Grid samples of sum_k c_k phi_{j,k} for c at level j = log2(c.size()).
GridFunction synthesize_approx(const Eigen::VectorXd& c, const WaveletBasis& basis, int J);

// s_N: scaling part plus details j <= N. N = j0 - 1 is the scaling part alone.
GridFunction partial_sum(const CoeffTree& tree, int N_level, const WaveletBasis& basis);
// All partial sums s_{j0-1}, ..., s_{J-1}; element i is s_{j0 - 1 + i}.
std::vector<GridFunction> partial_sums(const CoeffTree& tree, const WaveletBasis& basis);

struct BlockSeq {
  std::vector<GridFunction> blocks;  // g_0..g_{l_max}
  GridFunction remainder;            // generations alpha_{l_max}+1 .. J-1 (truncated next block)
  std::vector<long> alphas;
};

// g_0: scaling part at j0 plus generations j0..alpha_0 (empty when alpha_0 < j0);
// g_l: generations alpha_{l-1} < j <= alpha_l clipped to [j0, J-1].
BlockSeq block_decompose(const CoeffTree& tree, const ScalePlan& plan, const WaveletBasis& basis);
// Same blocks read off precomputed partial sums.
BlockSeq blocks_from_partial_sums(const std::vector<GridFunction>& sums, int j0, const ScalePlan& plan);

// Grid samples of psi_{j,k} and phi_{j,k} (L2-normalized, periodized), exact in the discrete model.
GridFunction wavelet_on_grid(const WaveletBasis& basis, int J, int j, long k);
GridFunction scaling_on_grid(const WaveletBasis& basis, int J, int j, long k);

}  // namespace growthwave
