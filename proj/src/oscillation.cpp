#include "growthwave/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "growthwave/error.hpp"
#include "growthwave/growth.hpp"
#include "growthwave/support.hpp"

namespace growthwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxLevel = 1000.0;

double level_of(double s) {
  if (!(s > 0.0) || !(s <= 1.0)) throw ValidationError("scale s must lie in (0, 1], got " + std::to_string(s));
  const double level = -std::log2(s);
  if (level > kMaxLevel + 1e-9) throw ValidationError("scale s below 2^-1000 is not supported");
  return level;
}

// Node levels 0, 1/4, 1/2, ... below `level`, closed by `level` itself.
std::vector<double> node_levels(double level) {
  std::vector<double> out{0.0};
  for (long k = 1;; ++k) {
    const double q = 0.25 * static_cast<double>(k);
    if (q >= level - 1e-12) break;
    out.push_back(q);
  }
  if (level > 0.0) out.push_back(level);
  return out;
}

struct Quadrature {
  std::vector<double> t_mid;
  std::vector<double> weight;  // 1/v(t_i) - 1/v(t_{i+1}) >= 0
};

Quadrature quadrature(const Weight& v, double level) {
  const auto nodes = node_levels(level);
  Quadrature q;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    q.t_mid.push_back(0.5 * (std::exp2(-a) + std::exp2(-b)));
    q.weight.push_back(std::exp(-v.log_dyadic(a)) - std::exp(-v.log_dyadic(b)));
  }
  return q;
}

}  // namespace

std::vector<double> stieltjes_nodes(double s) {
  std::vector<double> out;
  for (double l : node_levels(level_of(s))) out.push_back(std::exp2(-l));
  return out;
}

VerticalAverager::VerticalAverager(const Weight& v, std::vector<double> scales, int J)
    : scales_(std::move(scales)), J_(J) {
  if (J < 1) throw ValidationError("grid level J must be at least 1");
  const long half = (1L << J) / 2;
  std::vector<std::size_t> order(scales_.size());
  std::vector<double> levels(scales_.size());
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    order[i] = i;
    levels[i] = level_of(scales_[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
  multipliers_.assign(scales_.size(), std::vector<double>(static_cast<std::size_t>(half + 1), 0.0));
  if (scales_.empty()) return;

  // One sweep down to the deepest scale, snapshotting the running sum at each requested scale.
  const double deepest = levels[order.back()];
  std::vector<double> cut_levels;
  for (std::size_t i : order) cut_levels.push_back(levels[i]);
  std::vector<double> nodes = node_levels(deepest);
  std::vector<double> merged = nodes;
  merged.insert(merged.end(), cut_levels.begin(), cut_levels.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               merged.end());

  std::vector<double> acc(static_cast<std::size_t>(half + 1), 0.0);
  double flat = 0.0;  // weight of nodes with exp(-2 pi t k) == 1 to double precision for every k
  std::size_t next = 0;
  auto snapshot = [&](double level) {
    while (next < order.size() && std::abs(levels[order[next]] - level) < 1e-12) {
      auto& m = multipliers_[order[next]];
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = acc[k] + flat;
      ++next;
    }
  };
  snapshot(0.0);
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double a = merged[i], b = merged[i + 1];
    const double t = 0.5 * (std::exp2(-a) + std::exp2(-b));
    const double w = std::exp(-v.log_dyadic(a)) - std::exp(-v.log_dyadic(b));
    if (kTwoPi * t * static_cast<double>(half) < 1e-18) {
      flat += w;
    } else {
      const double r = std::exp(-kTwoPi * t);
      double e = 1.0;
      for (std::size_t k = 0; k < acc.size(); ++k) {
        acc[k] += w * e;
        e *= r;
      }
    }
    snapshot(b);
  }
}

GridFunction VerticalAverager::apply_one(const Spectrum& X, std::size_t i) const {
  const auto& m = multipliers_.at(i);
  return apply_multiplier(X, J_, [&](long k) { return m[static_cast<std::size_t>(k)]; });
}

std::vector<GridFunction> VerticalAverager::apply(const Spectrum& X) const {
  std::vector<GridFunction> out;
  out.reserve(scales_.size());
  for (std::size_t i = 0; i < scales_.size(); ++i) out.push_back(apply_one(X, i));
  return out;
}

GridFunction vertical_average(const HarmonicField& field, const Weight& v, double s) {
  VerticalAverager avg(v, {s}, field.resolution());
  return avg.apply_one(field.spectrum(), 0);
}

GridFunction vertical_average_direct(const HarmonicField& field, const Weight& v, double s) {
  const auto q = quadrature(v, level_of(s));
  GridFunction out = GridFunction::zero(field.resolution());
  for (std::size_t i = 0; i < q.t_mid.size(); ++i) out = out + q.weight[i] * field.at(q.t_mid[i]);
  return out;
}

std::vector<GridFunction> block_averages(const GridFunction& vertical, const WaveletBasis& basis,
                                         const ScalePlan& plan) {
  const auto fitted = truncate_plan(plan, vertical.level() - 1);
  auto seq = block_decompose(analyze(vertical, basis), fitted, basis);
  auto out = std::move(seq.blocks);
  out.push_back(std::move(seq.remainder));
  return out;
}

std::vector<GridFunction> block_averages_direct(const HarmonicField& field, const Weight& v, double s,
                                                const WaveletBasis& basis, const ScalePlan& plan) {
  const auto q = quadrature(v, level_of(s));
  std::vector<GridFunction> out;
  for (std::size_t i = 0; i < q.t_mid.size(); ++i) {
    auto g = block_averages(field.at(q.t_mid[i]), basis, plan);
    if (out.empty()) out.assign(g.size(), GridFunction::zero(field.resolution()));
    for (std::size_t l = 0; l < g.size(); ++l) out[l] = out[l] + q.weight[i] * g[l];
  }
  return out;
}

GridFunction conditional_block(const GridFunction& G, long level) {
  const int J = G.level();
  if (level < 0 || level > J)
    throw ValidationError("conditioning level " + std::to_string(level) + " outside [0, " + std::to_string(J) + "]");
  const Eigen::Index width = Eigen::Index(1) << (J - level);
  Eigen::VectorXd out(G.size());
  const auto& x = G.samples();
  for (Eigen::Index b = 0; b < G.size(); b += width) out.segment(b, width).setConstant(x.segment(b, width).mean());
  return GridFunction(std::move(out));
}

MartingaleTrace build_martingale(const HarmonicField& field, const Weight& v, const ScalePlan& plan,
                                 const WaveletBasis& basis) {
  const int J = field.resolution();
  MartingaleTrace tr;
  for (long a : plan.alphas)
    if (a <= J) tr.alphas.push_back(a);
  const auto fitted = truncate_plan(plan, J - 1);
  tr.block_alphas = fitted.alphas;

  std::vector<double> scales;
  for (long a : tr.alphas) scales.push_back(std::exp2(-static_cast<double>(a)));
  scales.push_back(std::exp2(-static_cast<double>(J)));
  VerticalAverager avg(v, scales, J);
  auto I = avg.apply(field.spectrum());
  const GridFunction& deep = I.back();

  tr.G = block_averages(deep, basis, plan);
  for (const auto& g : tr.G) tr.max_block_average = std::max(tr.max_block_average, g.sup_norm());

  const std::size_t nL = tr.alphas.size();
  tr.Lambda.assign(tr.G.size(), {});
  for (std::size_t l = 0; l < tr.G.size(); ++l)
    for (std::size_t L = 0; L < nL; ++L) tr.Lambda[l].push_back(conditional_block(tr.G[l], tr.alphas[L]));

  for (std::size_t L = 0; L < nL; ++L) {
    GridFunction gamma = GridFunction::zero(J);
    for (std::size_t l = 0; l < tr.G.size(); ++l) gamma = gamma + tr.Lambda[l][L];
    tr.approximation_defect.push_back((I[L] - gamma).sup_norm());
    tr.Gamma.push_back(std::move(gamma));
  }

  // Lower generation of block l: alphas[l-1]; the remainder sits above the last fitted level.
  for (std::size_t l = 1; l < tr.G.size(); ++l) {
    const long lower = tr.block_alphas[std::min(l - 1, tr.block_alphas.size() - 1)];
    for (std::size_t L = 0; L < nL && L < l; ++L) {
      const double ratio = tr.Lambda[l][L].sup_norm() / std::exp2(static_cast<double>(tr.alphas[L] - lower));
      tr.max_lambda_decay = std::max(tr.max_lambda_decay, ratio);
    }
  }

  for (std::size_t L = 0; L + 1 < nL; ++L) {
    tr.increments.push_back(tr.Gamma[L + 1] - tr.Gamma[L]);
    tr.tower_residual.push_back((conditional_block(tr.Gamma[L + 1], tr.alphas[L]) - tr.Gamma[L]).sup_norm());
    GridFunction sq(tr.increments.back().samples().array().square().matrix());
    GridFunction term = conditional_block(sq, tr.alphas[L]);
    tr.S2.push_back(tr.S2.empty() ? term : tr.S2.back() + term);
  }
  return tr;
}

SquareFunctionReport square_function(const MartingaleTrace& trace) {
  SquareFunctionReport r;
  for (std::size_t N = 0; N < trace.S2.size(); ++N) {
    r.max_S2_per_term.push_back(trace.S2[N].sup_norm() / static_cast<double>(N + 1));
    if (N > 0 && (trace.S2[N].samples() - trace.S2[N - 1].samples()).minCoeff() < -1e-12) r.monotone = false;
  }
  for (const auto& d : trace.increments) r.max_increment = std::max(r.max_increment, d.sup_norm());
  return r;
}

double scale_insensitivity(const HarmonicField& field, const Weight& v, const ScalePlan& plan) {
  const int J = field.resolution();
  std::vector<double> scales;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (reference, probe)
  for (std::size_t L = 0; L + 1 < plan.alphas.size() && plan.alphas[L + 1] <= J; ++L) {
    const std::size_t ref = scales.size();
    scales.push_back(std::exp2(-static_cast<double>(plan.alphas[L])));
    for (long q = 4 * plan.alphas[L] + 1; q < 4 * plan.alphas[L + 1]; ++q) {
      pairs.emplace_back(ref, scales.size());
      scales.push_back(std::exp2(-0.25 * static_cast<double>(q)));
    }
  }
  if (scales.empty()) return 0.0;
  VerticalAverager avg(v, scales, J);
  auto I = avg.apply(field.spectrum());
  double worst = 0.0;
  for (auto [ref, probe] : pairs) worst = std::max(worst, (I[probe] - I[ref]).sup_norm());
  return worst;
}

double triple_log(const Weight& v, double level) {
  const double lv = v.log_dyadic(level);
  if (!(lv > 1.0)) return -std::numeric_limits<double>::infinity();
  const double llv = std::log(lv);
  if (!(llv > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(llv);
}

long minimal_usable_level(const Weight& v) {
  for (long level = 1; level <= (1L << 20); ++level)
    if (triple_log(v, static_cast<double>(level)) > kTripleLogThreshold) return level;
  return -1;
}

LILReport lil_montecarlo(const Weight& v, const ScalePlan& plan, const WaveletBasis& basis, int trials,
                         std::uint64_t seed, int J, unsigned threads) {
  if (trials < 1) throw ValidationError("trials must be positive");
  LILReport rep;
  rep.minimal_usable = minimal_usable_level(v);
  for (std::size_t L = 1; L < plan.alphas.size(); ++L)
    if (plan.alphas[L] <= static_cast<long>(kMaxLevel)) rep.alphas.push_back(plan.alphas[L]);
  bool any = false;
  for (long a : rep.alphas) {
    rep.usable.push_back(triple_log(v, static_cast<double>(a)) > kTripleLogThreshold);
    any = any || rep.usable.back();
  }
  if (!any) {
    const std::string deepest = rep.alphas.empty() ? "none" : "2^-" + std::to_string(rep.alphas.back());
    const std::string need =
        rep.minimal_usable < 0 ? "no level up to 2^20 suffices" : "needs level >= " + std::to_string(rep.minimal_usable);
    throw ValidationError("deepest scale " + deepest + " is too shallow for the log-log-log statistic; " + need +
                          " (raise l_max)");
  }

  std::vector<double> scales, log_v, denom;
  for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
    const double a = static_cast<double>(rep.alphas[i]);
    scales.push_back(std::exp2(-a));
    log_v.push_back(v.log_dyadic(a));
    denom.push_back(rep.usable[i] ? std::sqrt(log_v.back() * triple_log(v, a)) : 0.0);
  }
  const VerticalAverager avg(v, scales, J);

  rep.trials.resize(static_cast<std::size_t>(trials));
  parallel_for(rep.trials.size(), threads, [&](std::size_t n) {
    auto u = normalize_member(random_member(v, plan, basis, 1.0, derive_seed(seed, n), J), v);
    const auto X = forward_spectrum(u);
    LILTrial tr;
    std::vector<double> idx;
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const double peak = avg.apply_one(X, i).sup_norm();
      tr.statistic.push_back(rep.usable[i] ? peak / denom[i] : 0.0);
      tr.max_statistic = std::max(tr.max_statistic, tr.statistic.back());
      tr.naive_ratio.push_back(peak / log_v[i]);
      if (peak > log_v[i] * (1.0 + 1e-9)) tr.within_log_bound = false;
      idx.push_back(static_cast<double>(i + 1));
    }
    tr.naive_slope = ols_slope(idx, tr.naive_ratio);
    // I_u still accumulates from 0 at s = 1, so the ratio first rises; the limit shows past the peak
    const auto peak_it = std::max_element(tr.naive_ratio.begin(), tr.naive_ratio.end());
    const auto peak = static_cast<std::size_t>(peak_it - tr.naive_ratio.begin());
    tr.naive_decreasing = peak + 1 < tr.naive_ratio.size();
    for (std::size_t i = peak + 1; i < tr.naive_ratio.size(); ++i)
      tr.naive_decreasing = tr.naive_decreasing && tr.naive_ratio[i] < tr.naive_ratio[i - 1];
    rep.trials[n] = std::move(tr);
  });

  std::vector<double> stats;
  int decreasing = 0;
  for (const auto& t : rep.trials) {
    stats.push_back(t.max_statistic);
    rep.ensemble_max = std::max(rep.ensemble_max, t.max_statistic);
    decreasing += t.naive_decreasing ? 1 : 0;
    rep.all_within_log_bound = rep.all_within_log_bound && t.within_log_bound;
  }
  rep.quantile95 = quantile(stats, 0.95);
  rep.fraction_decreasing = static_cast<double>(decreasing) / static_cast<double>(trials);
  return rep;
}

}  // namespace growthwave
