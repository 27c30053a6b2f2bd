#include "growthwave/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <unsupported/Eigen/FFT>

#include "growthwave/error.hpp"

namespace growthwave {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

}  // namespace

Spectrum forward_spectrum(const GridFunction& f) {
  std::vector<double> in(f.samples().data(), f.samples().data() + f.size());
  Spectrum out;
  fft_engine().fwd(out, in);
  out.resize(static_cast<std::size_t>(f.size() / 2 + 1));
  return out;
}

GridFunction inverse_spectrum(const Spectrum& X, int J) {
  const Eigen::Index N = Eigen::Index(1) << J;
  if (static_cast<Eigen::Index>(X.size()) != N / 2 + 1) throw ValidationError("spectrum length does not match 2^J");
  if (N == 1) return GridFunction(Eigen::VectorXd::Constant(1, X[0].real()));
  std::vector<double> out;
  fft_engine().inv(out, X, N);
  return GridFunction(Eigen::Map<const Eigen::VectorXd>(out.data(), N));
}

GridFunction apply_multiplier(const Spectrum& X, int J, const std::function<double(long)>& m) {
  Spectrum Y(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) Y[k] = X[k] * m(static_cast<long>(k));
  return inverse_spectrum(Y, J);
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  if (f.size() != g.size()) throw ValidationError("convolve: grid sizes differ");
  auto F = forward_spectrum(f);
  auto G = forward_spectrum(g);
  const double inv_n = 1.0 / static_cast<double>(f.size());
  for (std::size_t k = 0; k < F.size(); ++k) F[k] *= G[k] * inv_n;
  return inverse_spectrum(F, f.level());
}

double periodic_poisson_kernel(double x, double s) {
  if (!(s > 0.0)) throw ValidationError("Poisson kernel needs s > 0");
  // sinh/(cosh - cos) rewritten to stay finite for large s
  const double e = std::exp(-2.0 * kPi * s);
  return (1.0 - e * e) / (1.0 - 2.0 * e * std::cos(2.0 * kPi * x) + e * e);
}

GridFunction poisson_extend(const GridFunction& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("poisson_extend needs t > 0");
  return apply_multiplier(forward_spectrum(f), f.level(),
                          [t](long k) { return std::exp(-2.0 * kPi * t * static_cast<double>(k)); });
}

std::vector<double> half_dyadic_scales(int J) {
  std::vector<double> t;
  for (int j = 0; j <= 2 * J; ++j) t.push_back(std::exp2(-0.5 * j));
  return t;
}

struct HarmonicField::Cache {
  std::mutex mutex;
  std::vector<std::unique_ptr<GridFunction>> levels;
};

HarmonicField::HarmonicField(GridFunction boundary)
    : boundary_(std::move(boundary)),
      spectrum_(forward_spectrum(boundary_)),
      t_grid_(half_dyadic_scales(boundary_.level())),
      cache_(std::make_shared<Cache>()) {
  cache_->levels.resize(t_grid_.size());
}

const GridFunction& HarmonicField::level(std::size_t i) const {
  if (i >= t_grid_.size()) throw ValidationError("HarmonicField: t-grid index out of range");
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& slot = cache_->levels[i];
  if (!slot) slot = std::make_unique<GridFunction>(at(t_grid_[i]));
  return *slot;
}

GridFunction HarmonicField::at(double t) const {
  if (!(t > 0.0)) throw ValidationError("HarmonicField::at needs t > 0");
  return apply_multiplier(spectrum_, boundary_.level(),
                          [t](long k) { return std::exp(-2.0 * kPi * t * static_cast<double>(k)); });
}

double smoothstep(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  auto s = [](double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
  const double a = s(2.0 - x), b = s(x - 1.0);
  return a / (a + b);
}

double sigma_symbol(double delta, double k) {
  const double x = delta * std::abs(k);
  const double eta = smoothstep(x);
  const double damp = std::exp(-2.0 * kPi * x);
  return eta > 0.0 ? eta * 2.0 * std::cosh(2.0 * kPi * x) - damp : -damp;
}

SigmaKernel sigma_kernel(double delta, int J) {
  if (!(delta > 0.0) || delta > 1.0) throw ValidationError("sigma_kernel needs delta in (0, 1]");
  const long half = 1L << (J - 1);
  if (2.0 / delta > static_cast<double>(half))
    throw ValidationError("sigma_kernel: band 2/delta = " + std::to_string(2.0 / delta) +
                          " exceeds the Nyquist frequency of the grid");
  SigmaKernel out;
  out.delta = delta;
  out.fourier_symbol.resize(static_cast<std::size_t>(half + 1));
  Spectrum X(static_cast<std::size_t>(half + 1));
  const double N = std::ldexp(1.0, J);
  for (long k = 0; k <= half; ++k) {
    double s = sigma_symbol(delta, static_cast<double>(k));
    out.fourier_symbol[static_cast<std::size_t>(k)] = s;
    X[static_cast<std::size_t>(k)] = N * s;
  }
  out.kernel = inverse_spectrum(X, J);
  out.l1_norm = out.kernel.l1_norm();
  return out;
}

std::optional<long> bandlimit_violation(const GridFunction& sigma, double cutoff, double rel_tol) {
  auto X = forward_spectrum(sigma);
  double peak = 0.0;
  for (const auto& x : X) peak = std::max(peak, std::abs(x));
  for (std::size_t k = 0; k < X.size(); ++k)
    if (static_cast<double>(k) > cutoff && std::abs(X[k]) > rel_tol * peak) return static_cast<long>(k);
  return std::nullopt;
}

PairingReport pairing_bound_check(const HarmonicField& field, const GridFunction& sigma, double delta, const Weight& v) {
  if (!(delta > 0.0) || delta > 1.0) throw ValidationError("pairing_bound_check needs delta in (0, 1]");
  if (sigma.size() != field.boundary().size()) throw ValidationError("pairing_bound_check: grid sizes differ");
  if (auto bad = bandlimit_violation(sigma, 1.0 / delta))
    throw ValidationError("pairing_bound_check: sigma is not bandlimited to 1/delta; frequency " +
                          std::to_string(*bad) + " is active");
  PairingReport r;
  r.t = field.t_grid();
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    double p = field.level(i).samples().dot(sigma.samples()) / static_cast<double>(sigma.size());
    r.pairings.push_back(p);
    r.max_abs_pairing = std::max(r.max_abs_pairing, std::abs(p));
  }
  r.sigma_l1 = sigma.l1_norm();
  r.ratio = r.sigma_l1 > 0.0 ? r.max_abs_pairing / (v(delta) * r.sigma_l1) : 0.0;
  return r;
}

double box_spline(int r, double x) {
  if (r < 1) throw ValidationError("box_spline needs r >= 1");
  // centered cardinal B-spline: sum_k (-1)^k C(r,k) (x + r/2 - k)_+^{r-1} / (r-1)!
  double acc = 0.0, binom = 1.0, fact = 1.0;
  for (int i = 2; i < r; ++i) fact *= i;
  for (int k = 0; k <= r; ++k) {
    double y = x + 0.5 * r - k;
    if (y > 0.0) acc += ((k % 2) ? -1.0 : 1.0) * binom * (r == 1 ? 1.0 : std::pow(y, r - 1));
    binom = binom * (r - k) / (k + 1);
  }
  if (std::abs(x) > 0.5 * r) return 0.0;
  return std::max(0.0, acc / fact);
}

DilatedReport dilated_test_pairing(const HarmonicField& field, int r_fold, const std::vector<double>& scales,
                                   const Weight& v, int m) {
  if (r_fold < m + 2)
    throw ValidationError("dilated_test_pairing: r_fold = " + std::to_string(r_fold) + " must be at least m + 2 = " +
                          std::to_string(m + 2));
  const int J = field.resolution();
  DilatedReport rep;
  for (double a : scales) {
    if (!(a > 0.0) || a > 1.0) throw ValidationError("dilated_test_pairing: scale a must lie in (0, 1]");
    double best = 0.0;
    for (double t : field.t_grid()) {
      // pairing(y) = sum_k u_hat(k, t) a sinc^r(a k) e^{2 pi i k y}
      auto p = apply_multiplier(field.spectrum(), J, [a, t, r_fold](long k) {
        const double xi = a * static_cast<double>(k);
        const double sinc = k == 0 ? 1.0 : std::sin(kPi * xi) / (kPi * xi);
        return a * std::pow(sinc, r_fold) * std::exp(-2.0 * kPi * t * static_cast<double>(k));
      });
      best = std::max(best, p.sup_norm());
    }
    rep.a.push_back(a);
    rep.max_ratio_per_a.push_back(best / (a * v(a)));
    rep.max_ratio = std::max(rep.max_ratio, rep.max_ratio_per_a.back());
  }
  return rep;
}

namespace {

GridFunction project(const GridFunction& f, const WaveletBasis& basis, int J_level) {
  return partial_sum(analyze(f, basis), J_level - 1, basis);
}

template <typename KernelFn>
DefectPair defect_with(const WaveletBasis& basis, int J_level, int J, KernelFn&& kernel) {
  if (J_level < basis.coarse_level || J_level >= J)
    throw ValidationError("mra_poisson_defect: J_level must lie in [j0, J)");
  const Eigen::Index N = Eigen::Index(1) << J;
  const double cell = std::ldexp(1.0, -J_level);
  DefectPair out;
  for (int i = 0; i < 8; ++i) {
    const double w = cell * i / 8.0;
    Eigen::VectorXd s(N);
    for (Eigen::Index y = 0; y < N; ++y) s(y) = kernel(w - static_cast<double>(y) / static_cast<double>(N));
    GridFunction g(s);
    out.defect_PE = std::max(out.defect_PE, (g - project(g, basis, J_level)).l1_norm());

    // (I - E) applied to a unit point mass at x, then smoothed by the kernel
    const auto x = static_cast<Eigen::Index>(std::llround(w * static_cast<double>(N))) % N;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(N);
    delta(x) = static_cast<double>(N);
    GridFunction d(delta);
    GridFunction resid = d - project(d, basis, J_level);
    Eigen::VectorXd ks(N);
    for (Eigen::Index y = 0; y < N; ++y) ks(y) = kernel(static_cast<double>(y) / static_cast<double>(N));
    out.defect_DP = std::max(out.defect_DP, convolve(resid, GridFunction(ks)).l1_norm());
  }
  return out;
}

}  // namespace

DefectPair mra_poisson_defect(const WaveletBasis& basis, double s, int J_level, int J) {
  if (!(s > 0.0)) throw ValidationError("mra_poisson_defect needs s > 0");
  if (s < std::ldexp(1.0, -J))
    throw ValidationError("mra_poisson_defect: s is below the grid resolution 2^-" + std::to_string(J));
  return defect_with(basis, J_level, J, [s](double x) { return periodic_poisson_kernel(x, s); });
}

DefectPair mra_constant_defect(const WaveletBasis& basis, int J_level, int J) {
  return defect_with(basis, J_level, J, [](double) { return 1.0; });
}

}  // namespace growthwave
