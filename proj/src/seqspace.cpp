#include "growthwave/seqspace.hpp"

#include <cmath>
#include <random>
#include <string>

#include "growthwave/error.hpp"
#include "growthwave/support.hpp"

namespace growthwave {

namespace {

Eigen::VectorXd refine_once(const Eigen::VectorXd& prev, const Eigen::VectorXd& g1) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * (prev.size() - 1) + g1.size());
  for (Eigen::Index m = 0; m < prev.size(); ++m) out.segment(2 * m, g1.size()) += prev(m) * g1;
  return out;
}

void check_shapes(const WeightedSequence& a, const WeightedSequence& b) {
  if (a.levels != b.levels) throw ValidationError("weighted sequences live on different level sets");
}

}  // namespace

Eigen::VectorXd refinement_coeffs(const WaveletBasis& basis, int j) {
  if (j < 1) throw ValidationError("refinement depth j must be at least 1, got " + std::to_string(j));
  const Eigen::VectorXd g1 = basis.lowpass / std::sqrt(2.0);
  Eigen::VectorXd g = g1;
  for (int i = 1; i < j; ++i) g = refine_once(g, g1);
  return g;
}

RefinementTable::RefinementTable(const WaveletBasis& basis, int max_gap) {
  if (max_gap < 1) return;
  const Eigen::VectorXd g1 = basis.lowpass / std::sqrt(2.0);
  table_.push_back(g1);
  for (int d = 2; d <= max_gap; ++d) table_.push_back(refine_once(table_.back(), g1));
}

double weighted_norm(const WeightedSequence& seq, const Weight& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < seq.levels.size(); ++i)
    if (seq.entries[i].size() > 0)
      best = std::max(best, seq.entries[i].cwiseAbs().maxCoeff() / v.dyadic(static_cast<double>(seq.levels[i])));
  return best;
}

double sup_abs(const WeightedSequence& seq) {
  double best = 0.0;
  for (const auto& e : seq.entries)
    if (e.size() > 0) best = std::max(best, e.cwiseAbs().maxCoeff());
  return best;
}

WeightedSequence operator+(const WeightedSequence& a, const WeightedSequence& b) {
  check_shapes(a, b);
  WeightedSequence out = a;
  for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i] += b.entries[i];
  return out;
}

WeightedSequence operator*(double c, const WeightedSequence& a) {
  WeightedSequence out = a;
  for (auto& e : out.entries) e *= c;
  return out;
}

std::vector<long> grid_levels(const ScalePlan& plan, int J) {
  std::vector<long> out;
  for (long a : plan.alphas)
    if (a <= J) out.push_back(a);
  return out;
}

WeightedSequence sample_coefficients(const GridFunction& boundary, const WaveletBasis& basis, const ScalePlan& plan) {
  const int J = boundary.level();
  if (plan.alphas.empty() || plan.alphas.front() > J)
    throw ValidationError("grid 2^" + std::to_string(J) + " is coarser than every plan level");
  const auto pyr = approximation_pyramid(boundary, basis);
  WeightedSequence seq;
  seq.levels = grid_levels(plan, J);
  for (long j : seq.levels) seq.entries.push_back(std::exp2(0.5 * static_cast<double>(j)) * pyr[static_cast<std::size_t>(j)]);
  return seq;
}

WeightedSequence random_sequence(const Weight& v, const ScalePlan& plan, int J, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightedSequence seq;
  seq.levels = grid_levels(plan, J);
  for (long j : seq.levels) {
    Eigen::VectorXd e(Eigen::Index(1) << j);
    const double scale = v.dyadic(static_cast<double>(j));
    for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = scale * (2.0 * random_unit(rng) - 1.0);
    seq.entries.push_back(std::move(e));
  }
  return seq;
}

Eigen::VectorXd restrict_level(const Eigen::VectorXd& fine, const Eigen::VectorXd& gamma, int d) {
  const Eigen::Index nf = fine.size();
  const Eigen::Index stride = Eigen::Index(1) << d;
  if (nf % stride != 0) throw ValidationError("fine level too coarse for gap " + std::to_string(d));
  const Eigen::Index mask = nf - 1;
  Eigen::VectorXd out(nf / stride);
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < gamma.size(); ++n) s += gamma(n) * fine((stride * k + n) & mask);
    out(k) = s;
  }
  return out;
}

Eigen::VectorXd extend_level(const Eigen::VectorXd& coarse, const Eigen::VectorXd& gamma, int d) {
  const Eigen::Index stride = Eigen::Index(1) << d;
  const Eigen::Index nf = coarse.size() * stride;
  const Eigen::Index mask = nf - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nf);
  const double scale = static_cast<double>(stride);
  for (Eigen::Index m = 0; m < coarse.size(); ++m) {
    const double c = scale * coarse(m);
    if (c == 0.0) continue;
    for (Eigen::Index n = 0; n < gamma.size(); ++n) out((stride * m + n) & mask) += c * gamma(n);
  }
  return out;
}

namespace {

int max_gap(const WeightedSequence& seq) {
  long g = 1;
  for (std::size_t i = 0; i + 1 < seq.levels.size(); ++i) g = std::max(g, seq.levels[i + 1] - seq.levels[i]);
  return static_cast<int>(g);
}

WeightedSequence defect_with(const WeightedSequence& seq, const RefinementTable& gam) {
  WeightedSequence out = seq;
  const std::size_t n = seq.levels.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int d = static_cast<int>(seq.levels[i + 1] - seq.levels[i]);
    out.entries[i] = seq.entries[i] - restrict_level(seq.entries[i + 1], gam(d), d);
  }
  if (n > 0) out.entries[n - 1].setZero();
  return out;
}

}  // namespace

WeightedSequence consistency_defect(const WeightedSequence& seq, const WaveletBasis& basis) {
  if (seq.levels.size() < 2) throw ValidationError("consistency defect needs at least two levels");
  return defect_with(seq, RefinementTable(basis, max_gap(seq)));
}

WeightedSequence project_to_ell(const WeightedSequence& seq, const WaveletBasis& basis) {
  if (seq.levels.size() < 2) throw ValidationError("projection needs at least two levels");
  const RefinementTable gam(basis, max_gap(seq));
  const auto delta = defect_with(seq, gam);
  WeightedSequence out = seq;
  // carry = sum_{i<j} extend_{i->j} delta[i], advanced one gap at a time (extensions compose)
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(seq.entries[0].size());
  for (std::size_t i = 1; i < seq.levels.size(); ++i) {
    const int d = static_cast<int>(seq.levels[i] - seq.levels[i - 1]);
    carry = extend_level(carry + delta.entries[i - 1], gam(d), d);
    out.entries[i] += carry;
  }
  return out;
}

GridFunction synthesize_from_sequence(const WeightedSequence& seq, const WaveletBasis& basis, int J) {
  if (seq.levels.empty()) throw ValidationError("empty sequence");
  const long jT = seq.levels.back();
  if (jT > J) throw ValidationError("deepest level " + std::to_string(jT) + " exceeds the grid 2^" + std::to_string(J));
  return synthesize_approx(std::exp2(-0.5 * static_cast<double>(jT)) * seq.entries.back(), basis, J);
}

}  // namespace growthwave
