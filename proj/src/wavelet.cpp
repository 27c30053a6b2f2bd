#include "growthwave/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/Polynomials>

#include "growthwave/error.hpp"

namespace growthwave {

namespace {

constexpr int kMaxOrder = 20;
constexpr double kHoelderPerOrder = 0.55;

using cplx = std::complex<long double>;

// Newton polish of a root of sum_k c_k y^k.
cplx polish_root(const std::vector<long double>& c, cplx y) {
  for (int it = 0; it < 50; ++it) {
    cplx p = 0, dp = 0;
    for (std::size_t k = c.size(); k-- > 0;) {
      dp = dp * y + p;
      p = p * y + c[k];
    }
    if (std::abs(dp) == 0.0L) break;
    cplx step = p / dp;
    y -= step;
    if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(y))) break;
  }
  return y;
}

}  // namespace

Eigen::VectorXd daubechies_filter(int order) {
  if (order < 1 || order > kMaxOrder)
    throw ValidationError("wavelet order must lie in [1, " + std::to_string(kMaxOrder) + "]");
  const int p = order;
  // P(y) = sum_{k<p} binom(p-1+k, k) y^k; its roots give the minimum-phase factor
  std::vector<long double> coef(static_cast<std::size_t>(p));
  long double binom = 1.0L;
  for (int k = 0; k < p; ++k) {
    coef[static_cast<std::size_t>(k)] = binom;
    binom = binom * static_cast<long double>(p + k) / static_cast<long double>(k + 1);
  }
  std::vector<cplx> poly{1.0L};
  auto multiply = [&poly](cplx a0, cplx a1) {
    std::vector<cplx> out(poly.size() + 1, cplx(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      out[i] += a0 * poly[i];
      out[i + 1] += a1 * poly[i];
    }
    poly.swap(out);
  };
  for (int i = 0; i < p; ++i) multiply(1.0L, 1.0L);
  if (p > 1) {
    Eigen::VectorXd c(p);
    for (int k = 0; k < p; ++k) c(k) = static_cast<double>(coef[static_cast<std::size_t>(k)]);
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(c);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
      std::complex<double> r0 = solver.roots()(i);
      cplx y = polish_root(coef, cplx(r0.real(), r0.imag()));
      cplx b = 1.0L - 2.0L * y;
      cplx s = std::sqrt(b * b - 1.0L);
      cplx z = std::abs(b + s) < 1.0L ? b + s : b - s;
      multiply(1.0L, -z);
    }
  }
  Eigen::VectorXd h(2 * p);
  long double sum = 0.0L;
  for (int i = 0; i < 2 * p; ++i) sum += poly[static_cast<std::size_t>(i)].real();
  const long double scale = std::sqrt(2.0L) / sum;
  for (int i = 0; i < 2 * p; ++i) h(i) = static_cast<double>(poly[static_cast<std::size_t>(i)].real() * scale);
  return h;
}

Eigen::VectorXd quadrature_mirror(const Eigen::VectorXd& lowpass) {
  const Eigen::Index L = lowpass.size();
  Eigen::VectorXd g(L);
  for (Eigen::Index k = 0; k < L; ++k) g(k) = ((k % 2) ? -1.0 : 1.0) * lowpass(L - 1 - k);
  return g;
}

double regularity_estimate(int order) { return kHoelderPerOrder * order; }

int required_order(const ScalePlan& plan) {
  const double need = plan.m + 2.0;
  for (int order = 1; order <= kMaxOrder; ++order)
    if (regularity_estimate(order) > need) return order;
  throw ValidationError("required_order: m = " + std::to_string(plan.m) + " needs a wavelet order above " +
                        std::to_string(kMaxOrder));
}

double WaveletBasis::phi(double x) const {
  const double pos = x / table_step();
  if (pos < 0.0 || pos > static_cast<double>(phi_table.size() - 1)) return 0.0;
  const auto i = static_cast<Eigen::Index>(std::floor(pos));
  if (i >= phi_table.size() - 1) return phi_table(phi_table.size() - 1);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * phi_table(i) + w * phi_table(i + 1);
}

double WaveletBasis::psi(double x) const {
  const double pos = x / table_step();
  if (pos < 0.0 || pos > static_cast<double>(psi_table.size() - 1)) return 0.0;
  const auto i = static_cast<Eigen::Index>(std::floor(pos));
  if (i >= psi_table.size() - 1) return psi_table(psi_table.size() - 1);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * psi_table(i) + w * psi_table(i + 1);
}

WaveletBasis build_basis(int order, int tab_depth, int j0) {
  if (order < 1) throw ValidationError("build_basis needs order >= 1");
  if (tab_depth < 8 || tab_depth > 16) throw ValidationError("build_basis needs tab_depth in [8, 16]");
  if (j0 < 0) throw ValidationError("build_basis needs j0 >= 0");
  WaveletBasis b;
  b.order = order;
  b.r_eff = regularity_estimate(order);
  b.lowpass = daubechies_filter(order);
  b.highpass = quadrature_mirror(b.lowpass);
  b.tab_depth = tab_depth;
  b.coarse_level = j0;
  const int L = static_cast<int>(b.lowpass.size());
  b.support_length = L - 1;
  const Eigen::Index scale = Eigen::Index(1) << tab_depth;
  const Eigen::Index n_nodes = b.support_length * scale + 1;
  const double sqrt2 = std::sqrt(2.0);

  // integer-node values: eigenvector of M_{nk} = sqrt2 h_{2n-k} for eigenvalue 1 with sum 1
  Eigen::VectorXd nodes = Eigen::VectorXd::Zero(b.support_length + 1);
  if (order == 1) {
    nodes(0) = 1.0;
  } else {
    const int n = b.support_length + 1;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 1, n);
    for (int r = 0; r < n; ++r) {
      for (int k = 0; k < n; ++k) {
        int idx = 2 * r - k;
        if (idx >= 0 && idx < L) sys(r, k) = sqrt2 * b.lowpass(idx);
      }
      sys(r, r) -= 1.0;
    }
    sys.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    nodes = sys.colPivHouseholderQr().solve(rhs);
  }

  // cascade on the fixed dyadic grid, started from the piecewise-linear interpolant of the nodes
  Eigen::VectorXd cur(n_nodes);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    Eigen::Index k = i / scale;
    double w = static_cast<double>(i % scale) / static_cast<double>(scale);
    double right = k + 1 <= b.support_length ? nodes(k + 1) : 0.0;
    cur(i) = (1.0 - w) * nodes(k) + w * right;
  }
  if (order == 1) cur(n_nodes - 1) = 0.0;
  Eigen::VectorXd next(n_nodes);
  double change = 0.0;
  int it = 0;
  for (it = 1; it <= 60; ++it) {
    for (Eigen::Index i = 0; i < n_nodes; ++i) {
      double acc = 0.0;
      for (int k = 0; k < L; ++k) {
        Eigen::Index src = 2 * i - k * scale;
        if (src >= 0 && src < n_nodes) acc += b.lowpass(k) * cur(src);
      }
      next(i) = sqrt2 * acc;
    }
    change = (next - cur).cwiseAbs().maxCoeff();
    cur.swap(next);
    if (change <= 1e-12) break;
  }
  if (change > 1e-12)
    throw NumericalError("cascade iteration did not converge for order " + std::to_string(order));
  b.cascade_iterations = std::min(it, 60);
  b.cascade_change = change;
  b.phi_table = cur;

  b.psi_table.resize(n_nodes);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    double acc = 0.0;
    for (int k = 0; k < L; ++k) {
      Eigen::Index src = 2 * i - k * scale;
      if (src >= 0 && src < n_nodes) acc += b.highpass(k) * b.phi_table(src);
    }
    b.psi_table(i) = sqrt2 * acc;
  }
  return b;
}

double CoeffTree::energy() const {
  double e = scaling.squaredNorm();
  for (const auto& d : details) e += d.squaredNorm();
  return e;
}

CoeffTree CoeffTree::zero(int j0, int J) {
  CoeffTree t;
  t.j0 = j0;
  t.J = J;
  t.scaling = Eigen::VectorXd::Zero(Eigen::Index(1) << j0);
  for (int j = j0; j < J; ++j) t.details.push_back(Eigen::VectorXd::Zero(Eigen::Index(1) << j));
  return t;
}

CoeffTree analyze(const GridFunction& f, const WaveletBasis& basis) {
  const int J = f.level();
  const int j0 = basis.coarse_level;
  if (J <= j0)
    throw ValidationError("analyze: resolution J = " + std::to_string(J) + " must exceed j0 = " + std::to_string(j0));
  CoeffTree tree;
  tree.j0 = j0;
  tree.J = J;
  tree.details.resize(static_cast<std::size_t>(J - j0));
  Eigen::VectorXd a = f.samples() / std::sqrt(static_cast<double>(f.size()));
  for (int j = J - 1; j >= j0; --j) {
    tree.detail(j) = analysis_step(a, basis.highpass);
    Eigen::VectorXd next = analysis_step(a, basis.lowpass);
    a.swap(next);
  }
  tree.scaling = a;
  return tree;
}

GridFunction synthesize(const CoeffTree& tree, const WaveletBasis& basis) {
  Eigen::VectorXd a = tree.scaling;
  for (int j = tree.j0; j < tree.J; ++j) a = synthesis_step(a, tree.detail(j), basis.lowpass, basis.highpass);
  return GridFunction(a * std::sqrt(static_cast<double>(a.size())));
}

std::vector<Eigen::VectorXd> approximation_pyramid(const GridFunction& f, const WaveletBasis& basis) {
  const int J = f.level();
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(J + 1));
  out[static_cast<std::size_t>(J)] = f.samples() / std::sqrt(static_cast<double>(f.size()));
  for (int j = J - 1; j >= 0; --j)
    out[static_cast<std::size_t>(j)] = analysis_step(out[static_cast<std::size_t>(j + 1)], basis.lowpass);
  return out;
}

GridFunction synthesize_approx(const Eigen::VectorXd& c, const WaveletBasis& basis, int J) {
  int j = 0;
  while ((Eigen::Index(1) << j) < c.size()) ++j;
  if ((Eigen::Index(1) << j) != c.size() || j > J)
    throw ValidationError("synthesize_approx: coefficient length must be 2^j with j <= J");
  Eigen::VectorXd y = upsample_approx(c, basis.lowpass, J - j);
  return GridFunction(y * std::sqrt(static_cast<double>(y.size())));
}

std::vector<GridFunction> partial_sums(const CoeffTree& tree, const WaveletBasis& basis) {
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(tree.J - tree.j0 + 1));
  const double root_n = std::sqrt(std::ldexp(1.0, tree.J));
  Eigen::VectorXd a = tree.scaling;
  out.emplace_back(upsample_approx(a, basis.lowpass, tree.J - tree.j0) * root_n);
  for (int j = tree.j0; j < tree.J; ++j) {
    a = synthesis_step(a, tree.detail(j), basis.lowpass, basis.highpass);
    out.emplace_back(upsample_approx(a, basis.lowpass, tree.J - j - 1) * root_n);
  }
  return out;
}

GridFunction partial_sum(const CoeffTree& tree, int N_level, const WaveletBasis& basis) {
  if (N_level < tree.j0 - 1 || N_level >= tree.J)
    throw ValidationError("partial_sum: N = " + std::to_string(N_level) + " outside [" + std::to_string(tree.j0 - 1) +
                          ", " + std::to_string(tree.J - 1) + "]");
  Eigen::VectorXd a = tree.scaling;
  for (int j = tree.j0; j <= N_level; ++j) a = synthesis_step(a, tree.detail(j), basis.lowpass, basis.highpass);
  const int lifted = N_level + 1 > tree.j0 ? N_level + 1 : tree.j0;
  Eigen::VectorXd y = upsample_approx(a, basis.lowpass, tree.J - lifted);
  return GridFunction(y * std::sqrt(static_cast<double>(y.size())));
}

BlockSeq blocks_from_partial_sums(const std::vector<GridFunction>& sums, int j0, const ScalePlan& plan) {
  if (sums.empty()) throw ValidationError("block decomposition needs at least one partial sum");
  const int J = j0 + static_cast<int>(sums.size()) - 1;
  if (plan.alphas.empty() || plan.alphas.back() > J - 1)
    throw ValidationError("block_decompose: plan level alpha = " +
                          std::to_string(plan.alphas.empty() ? 0 : plan.alphas.back()) +
                          " is deeper than the resolution allows (J - 1 = " + std::to_string(J - 1) + ")");
  auto at = [&](long level) -> const GridFunction& {
    long clipped = std::clamp<long>(level, j0 - 1, J - 1);
    return sums[static_cast<std::size_t>(clipped - (j0 - 1))];
  };
  BlockSeq out;
  out.alphas = plan.alphas;
  out.blocks.push_back(at(plan.alphas[0]));
  for (std::size_t l = 1; l < plan.alphas.size(); ++l) out.blocks.push_back(at(plan.alphas[l]) - at(plan.alphas[l - 1]));
  out.remainder = at(J - 1) - at(plan.alphas.back());
  return out;
}

BlockSeq block_decompose(const CoeffTree& tree, const ScalePlan& plan, const WaveletBasis& basis) {
  if (plan.alphas.empty() || plan.alphas.back() > tree.J - 1)
    throw ValidationError("block_decompose: plan is deeper than the resolution J = " + std::to_string(tree.J));
  return blocks_from_partial_sums(partial_sums(tree, basis), tree.j0, plan);
}

GridFunction wavelet_on_grid(const WaveletBasis& basis, int J, int j, long k) {
  if (j < 0 || j >= J) throw ValidationError("wavelet_on_grid: generation out of range");
  CoeffTree tree = CoeffTree::zero(j, J);
  const long n = 1L << j;
  tree.detail(j)(((k % n) + n) % n) = 1.0;
  return synthesize(tree, basis);
}

GridFunction scaling_on_grid(const WaveletBasis& basis, int J, int j, long k) {
  if (j < 0 || j > J) throw ValidationError("scaling_on_grid: level out of range");
  const long n = 1L << j;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c(((k % n) + n) % n) = 1.0;
  return synthesize_approx(c, basis, J);
}

}  // namespace growthwave
