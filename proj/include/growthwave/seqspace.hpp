#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "growthwave/wavelet.hpp"
#include "growthwave/weight.hpp"

namespace growthwave {

// gamma(j, .) with phi(y) = sum_m gamma(j, m) 2^j phi(2^j y - m); index m = 0..(2M-1)(2^j-1).
Eigen::VectorXd refinement_coeffs(const WaveletBasis& basis, int j);

// gamma(d, .) for d = 1..max_gap, built once.
class RefinementTable {
 public:
  RefinementTable(const WaveletBasis& basis, int max_gap);
  const Eigen::VectorXd& operator()(int d) const { return table_.at(static_cast<std::size_t>(d - 1)); }
  int max_gap() const { return static_cast<int>(table_.size()); }

 private:
  std::vector<Eigen::VectorXd> table_;
};

// Entries a[j][k], k = 0..2^j-1, on the plan levels that fit the grid.
struct WeightedSequence {
  std::vector<long> levels;
  std::vector<Eigen::VectorXd> entries;
};

// sup_{j,k} |a[j][k]| / v(2^-j)
double weighted_norm(const WeightedSequence& seq, const Weight& v);
double sup_abs(const WeightedSequence& seq);
WeightedSequence operator+(const WeightedSequence& a, const WeightedSequence& b);
WeightedSequence operator*(double c, const WeightedSequence& a);

// Plan levels alpha_l <= J.
std::vector<long> grid_levels(const ScalePlan& plan, int J);

// a[j][k] = integral of boundary against 2^j phi(2^j y - k), periodized.
WeightedSequence sample_coefficients(const GridFunction& boundary, const WaveletBasis& basis, const ScalePlan& plan);

// Seeded entries a[j][k] = v(2^-j) U[-1, 1]; weighted norm <= 1.
WeightedSequence random_sequence(const Weight& v, const ScalePlan& plan, int J, std::uint64_t seed);

// Coarse coefficients implied by level j + d: out[k] = sum_n gamma(d, n) fine[(2^d k + n) mod 2^{j+d}].
Eigen::VectorXd restrict_level(const Eigen::VectorXd& fine, const Eigen::VectorXd& gamma, int d);
// Transpose scaled by 2^d: out[(2^d m + n) mod 2^{j+d}] += 2^d gamma(d, n) coarse[m].
Eigen::VectorXd extend_level(const Eigen::VectorXd& coarse, const Eigen::VectorXd& gamma, int d);

// delta[j] = a[j] - R a[j'] with j' the next level; zero at the deepest level.
WeightedSequence consistency_defect(const WeightedSequence& seq, const WaveletBasis& basis);

// a~[j] = a[j] + sum_{i<j} extend_{i->j} delta[i].
WeightedSequence project_to_ell(const WeightedSequence& seq, const WaveletBasis& basis);

// sum_k 2^-jT a[jT][k] phi_{jT,k} at the deepest level jT, sampled on the 2^J grid.
GridFunction synthesize_from_sequence(const WeightedSequence& seq, const WaveletBasis& basis, int J);

}  // namespace growthwave
