#include "growthwave/growth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "growthwave/error.hpp"
#include "growthwave/support.hpp"

namespace growthwave {

double growth_norm(const HarmonicField& field, const Weight& v) {
  double K = 0.0;
  for (std::size_t i = 0; i < field.t_grid().size(); ++i)
    K = std::max(K, field.level(i).sup_norm() / v(field.t_grid()[i]));
  return K;
}

namespace {

// Boundary first, then every t-grid level.
template <typename Fn>
void for_each_level(const HarmonicField& field, Fn&& fn) {
  fn(field.boundary());
  for (std::size_t i = 0; i < field.t_grid().size(); ++i) fn(field.level(i));
}

double coefficient_ratio(const CoeffTree& tree, const Weight& v) {
  double r = 0.0;
  for (int j = tree.j0; j < tree.J; ++j)
    r = std::max(r, tree.detail(j).cwiseAbs().maxCoeff() * std::sqrt(std::ldexp(1.0, j)) / v.dyadic(j));
  return r;
}

}  // namespace

FieldScan scan_field(const HarmonicField& field, const WaveletBasis& basis, const ScalePlan& plan) {
  const int J = field.resolution();
  const int j0 = basis.coarse_level;
  FieldScan scan;
  ScalePlan fitted = truncate_plan(plan, J - 1);
  scan.alphas = fitted.alphas;
  scan.profile.N.resize(static_cast<std::size_t>(J));
  scan.profile.M.assign(static_cast<std::size_t>(J), 0.0);
  for (int N = 0; N < J; ++N) scan.profile.N[static_cast<std::size_t>(N)] = N;
  scan.block_sup.assign(fitted.alphas.size(), 0.0);
  for_each_level(field, [&](const GridFunction& u) {
    auto sums = partial_sums(analyze(u, basis), basis);
    for (int N = 0; N < J; ++N) {
      int idx = std::max(N, j0 - 1) - (j0 - 1);
      auto& slot = scan.profile.M[static_cast<std::size_t>(N)];
      slot = std::max(slot, sums[static_cast<std::size_t>(idx)].sup_norm());
    }
    if (!fitted.alphas.empty()) {
      auto blocks = blocks_from_partial_sums(sums, j0, fitted);
      for (std::size_t l = 0; l < blocks.blocks.size(); ++l)
        scan.block_sup[l] = std::max(scan.block_sup[l], blocks.blocks[l].sup_norm());
      scan.remainder_sup = std::max(scan.remainder_sup, blocks.remainder.sup_norm());
    }
  });
  return scan;
}

MProfile msum_profile(const HarmonicField& field, const WaveletBasis& basis) {
  ScalePlan trivial;
  trivial.alphas = {0};
  return scan_field(field, basis, trivial).profile;
}

GrowthReport characterize(const HarmonicField& field, const Weight& v, const WaveletBasis& basis,
                          const ScalePlan& plan) {
  GrowthReport r;
  r.K_direct = growth_norm(field, v);
  auto scan = scan_field(field, basis, plan);
  r.N = scan.profile.N;
  r.M_profile = scan.profile.M;
  std::vector<double> x, ratio;
  for (std::size_t i = 0; i < r.N.size(); ++i) {
    r.v_at_N.push_back(v.dyadic(r.N[i]));
    ratio.push_back(r.M_profile[i] / r.v_at_N.back());
    x.push_back(r.N[i]);
    r.K_wavelet = std::max(r.K_wavelet, ratio.back());
  }
  r.equivalence_ratio = r.K_direct > 0.0 ? r.K_wavelet / r.K_direct : 0.0;
  r.h_v0_trend = ols_slope(x, ratio);
  const std::size_t q = std::max<std::size_t>(1, ratio.size() / 4);
  for (std::size_t i = 0; i < q; ++i) {
    r.first_quarter_mean += ratio[i] / static_cast<double>(q);
    r.last_quarter_mean += ratio[ratio.size() - 1 - i] / static_cast<double>(q);
  }
  r.h_v0_candidate = r.last_quarter_mean < 0.1 * r.first_quarter_mean;
  for (std::size_t l = 0; l < scan.block_sup.size(); ++l)
    r.block_ratio.push_back(scan.block_sup[l] / v.dyadic(static_cast<double>(scan.alphas[l])));
  return r;
}

std::vector<CoeffTree> field_coefficients(const HarmonicField& field, const WaveletBasis& basis) {
  std::vector<CoeffTree> trees;
  for_each_level(field, [&](const GridFunction& u) { trees.push_back(analyze(u, basis)); });
  return trees;
}

CoefficientCheck coefficient_check(const std::vector<CoeffTree>& trees, const Weight& v, const ScalePlan& plan,
                                   CoefficientDirection direction, double bound) {
  if (direction == CoefficientDirection::Converse && !plan.power_type_gap)
    throw ValidationError(
        "coefficient_check: the converse coefficient characterization needs a weight of power-type growth "
        "(bounded gaps alpha_{l+1} - alpha_l <= d); this plan has unbounded gaps");
  CoefficientCheck c;
  c.bound = bound;
  for (const auto& tree : trees) {
    c.max_ratio = std::max(c.max_ratio, coefficient_ratio(tree, v));
    c.max_scaling_ratio =
        std::max(c.max_scaling_ratio, tree.scaling.cwiseAbs().maxCoeff() * std::sqrt(std::ldexp(1.0, tree.j0)));
  }
  const double slack = bound * (1.0 + 1e-8);
  c.pass = c.max_ratio <= slack;
  if (direction == CoefficientDirection::Converse) c.pass = c.pass && c.max_scaling_ratio <= slack;
  return c;
}

CoeffTree random_member_coefficients(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, double B,
                                     std::uint64_t seed, int J) {
  const int j0 = basis.coarse_level;
  if (J <= j0) throw ValidationError("random_member: resolution must exceed j0");
  ScalePlan fitted = truncate_plan(plan, J - 1);
  std::mt19937_64 rng(seed);
  CoeffTree out = CoeffTree::zero(j0, J);
  if (B == 0.0) return out;

  CoeffTree part = CoeffTree::zero(j0, J);
  for (Eigen::Index k = 0; k < part.scaling.size(); ++k) part.scaling(k) = random_sign(rng);
  double sup = synthesize(part, basis).sup_norm();
  out.scaling = part.scaling * (B / sup);

  for (std::size_t l = 1; l < fitted.alphas.size(); ++l) {
    const long lo = std::max<long>(fitted.alphas[l - 1] + 1, j0);
    const long hi = std::min<long>(fitted.alphas[l], J - 1);
    if (lo > hi) continue;
    const double target = v.dyadic(static_cast<double>(fitted.alphas[l]));
    part = CoeffTree::zero(j0, J);
    for (long j = lo; j <= hi; ++j) {
      auto& d = part.detail(static_cast<int>(j));
      const double amp = std::exp2(-0.5 * static_cast<double>(j)) * target;
      for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = random_sign(rng) * amp;
    }
    sup = synthesize(part, basis).sup_norm();
    for (long j = lo; j <= hi; ++j) out.detail(static_cast<int>(j)) = part.detail(static_cast<int>(j)) * (B * target / sup);
  }
  return out;
}

GridFunction random_member(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, double B,
                           std::uint64_t seed, int J) {
  return synthesize(random_member_coefficients(v, plan, basis, B, seed, J), basis);
}

CoeffTree coefficient_member(const Weight& v, const WaveletBasis& basis, double B, std::uint64_t seed, int J) {
  const int j0 = basis.coarse_level;
  if (J <= j0) throw ValidationError("coefficient_member: resolution must exceed j0");
  std::mt19937_64 rng(seed);
  CoeffTree out = CoeffTree::zero(j0, J);
  for (Eigen::Index k = 0; k < out.scaling.size(); ++k)
    out.scaling(k) = random_sign(rng) * B * std::exp2(-0.5 * j0);
  for (int j = j0; j < J; ++j) {
    const double amp = std::exp2(-0.5 * j) * B * v.dyadic(j);
    auto& d = out.detail(j);
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = random_sign(rng) * amp;
  }
  return out;
}

GridFunction normalize_member(const GridFunction& boundary, const Weight& v) {
  const double K = growth_norm(HarmonicField(boundary), v);
  if (K == 0.0) return boundary;
  return GridFunction(boundary.samples() / K);
}

Counterexample counterexample_series(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, int d_max,
                                     int J) {
  if (plan.power_type_gap)
    throw ValidationError(
        "counterexample_series: the weight is of power-type growth (scale gaps bounded by " +
        std::to_string(*plan.power_type_gap) + "); the construction needs unbounded gaps");
  if (d_max < 1) throw ValidationError("counterexample_series needs d_max >= 1");
  const int S = basis.support_length;
  const int D = basis.tab_depth;
  Counterexample out;

  // dyadic interval G in psi's argument: shortest nesting step first, then the largest lower bound a
  int best_step = 1 << 30;
  long best_k = 0;
  for (int q = 0; q <= std::min(D, 10); ++q) {
    const long width = 1L << (D - q);
    const long count = static_cast<long>(S) << q;
    for (long i = 0; i < count; ++i) {
      const double a = basis.psi_table.segment(i * width, width).minCoeff();
      if (!(a > 0.0)) continue;
      const double g0 = std::ldexp(static_cast<double>(i), -q), g1 = std::ldexp(static_cast<double>(i + 1), -q);
      for (int j = 1; j <= std::min(best_step, 30); ++j) {
        const double k = std::ceil(std::ldexp(g0, j));
        if (k + S <= std::ldexp(g1, j)) {
          if (j < best_step || (j == best_step && a > out.a)) {
            best_step = j;
            best_k = static_cast<long>(k);
            out.a = a;
            out.interval_lo = g0;
            out.interval_hi = g1;
          }
          break;
        }
      }
    }
  }
  if (out.a <= 0.0) throw NumericalError("counterexample_series: psi has no positive dyadic interval in its table");
  out.step = best_step;
  const int j = best_step;

  std::vector<int> ld(static_cast<std::size_t>(d_max + 1), -1), sd(static_cast<std::size_t>(d_max + 1), 0);
  int s_max = 0;
  for (int d = 1; d <= d_max; ++d) {
    for (int l = 0; l + 1 <= plan.l_max(); ++l) {
      const long al = plan.alphas[static_cast<std::size_t>(l)];
      if (plan.alphas[static_cast<std::size_t>(l + 1)] <= al + static_cast<long>(j) * (d + 1)) continue;
      const int s = static_cast<int>(al / j) + 1;
      if (s * j < basis.coarse_level || j * (s + d) > J - 1) continue;
      ld[static_cast<std::size_t>(d)] = l;
      sd[static_cast<std::size_t>(d)] = s;
      s_max = std::max(s_max, s + d);
      break;
    }
    if (ld[static_cast<std::size_t>(d)] < 0)
      throw ValidationError("counterexample_series: no nesting with " + std::to_string(d + 1) +
                            " generations fits below resolution J = " + std::to_string(J) + "; increase J");
  }

  // k_s modulo 2^{sj}: k_s = k' + 2^j k_{s-1}, k_0 = 0
  out.k.assign(1, 0);
  for (int s = 1; s <= s_max; ++s) {
    const long mod = 1L << (s * j);
    out.k.push_back((best_k + (out.k.back() << j)) % mod);
  }

  for (int d = 1; d <= d_max; ++d) {
    CounterexampleTerm term;
    term.d = d;
    term.l_d = ld[static_cast<std::size_t>(d)];
    term.s_d = sd[static_cast<std::size_t>(d)];
    const double amp_v = v.dyadic(static_cast<double>(j * term.s_d));
    CoeffTree tree = CoeffTree::zero(basis.coarse_level, J);
    for (int s = term.s_d; s <= term.s_d + d; ++s)
      tree.detail(s * j)(out.k[static_cast<std::size_t>(s)]) += std::exp2(-0.5 * s * j) * amp_v;
    term.boundary = synthesize(tree, basis);
    term.norm = term.boundary.sup_norm();
    term.ratio = term.norm / amp_v;
    term.coeff_ratio = coefficient_ratio(analyze(term.boundary, basis), v);
    out.terms.push_back(std::move(term));
  }
  out.k.erase(out.k.begin());
  return out;
}

}  // namespace growthwave
