#include "growthwave/weight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "growthwave/error.hpp"

namespace growthwave {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kRelTol = 1e-12;

}  // namespace

Weight Weight::power(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw ValidationError("power weight needs exponent a > 0 (a = 0 is the bounded weight v = 1)");
  Weight w;
  w.family_ = WeightFamily::Power;
  w.param_ = a;
  return w;
}

Weight Weight::log_power(double b) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw ValidationError("logpow weight needs exponent b > 0");
  Weight w;
  w.family_ = WeightFamily::LogPower;
  w.param_ = b;
  return w;
}

Weight Weight::table(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2)
    throw ValidationError("weight table needs matching t and v arrays with at least two samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(t[i] <= 1.0) || !std::isfinite(v[i]) || !(v[i] >= 1.0))
      throw ValidationError("weight table sample " + std::to_string(i) +
                            " needs t in (0,1] and finite v >= 1");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw ValidationError("weight table t must be strictly increasing (sample " + std::to_string(i) + ")");
    if (i > 0 && v[i] > v[i - 1])
      throw ValidationError("weight table is not monotone: v increases at sample " + std::to_string(i));
  }
  Weight w;
  w.family_ = WeightFamily::Table;
  w.param_ = 0.0;
  w.t_ = std::move(t);
  w.v_ = std::move(v);
  for (std::size_t i = 0; i < w.t_.size(); ++i) {
    w.log_t_.push_back(std::log(w.t_[i]));
    w.log_v_.push_back(std::log(w.v_[i]));
  }
  // close the table at (1, 1) so the tail v = 1 is continuous
  if (w.t_.back() < 1.0) {
    w.log_t_.push_back(0.0);
    w.log_v_.push_back(0.0);
  } else if (w.v_.back() != 1.0) {
    throw ValidationError("weight table must have v(1) = 1");
  }
  if (!(w.log_v_[0] > w.log_v_[1]))
    throw ValidationError("weight table is flat at its smallest t; v must be unbounded as t -> 0");
  return w;
}

double Weight::log_eval_log_t(double log_t) const {
  if (log_t >= 0.0) return 0.0;
  switch (family_) {
    case WeightFamily::Power:
      return -param_ * log_t;
    case WeightFamily::LogPower:
      return param_ * std::log1p(-log_t);
    case WeightFamily::Table: {
      const auto& lt = log_t_;
      const auto& lv = log_v_;
      std::size_t hi;
      if (log_t <= lt.front()) {
        hi = 1;
      } else {
        hi = static_cast<std::size_t>(std::upper_bound(lt.begin(), lt.end(), log_t) - lt.begin());
        hi = std::min(hi, lt.size() - 1);
      }
      std::size_t lo = hi - 1;
      double slope = (lv[hi] - lv[lo]) / (lt[hi] - lt[lo]);
      return lv[lo] + slope * (log_t - lt[lo]);
    }
  }
  return 0.0;
}

double Weight::operator()(double t) const {
  if (!(t > 0.0)) throw ValidationError("weight evaluated at t <= 0");
  if (t > 1.0) return 1.0;
  return std::exp(log_eval_log_t(std::log(t)));
}

double Weight::log_dyadic(double level) const {
  if (level <= 0.0) return 0.0;
  if (family_ == WeightFamily::LogPower) return param_ * std::log1p(level * kLn2);
  return log_eval_log_t(-level * kLn2);
}

double Weight::dyadic(double level) const {
  if (family_ == WeightFamily::Power) return level <= 0.0 ? 1.0 : std::exp2(param_ * level);
  return std::exp(log_dyadic(level));
}

std::string Weight::describe() const {
  std::ostringstream os;
  switch (family_) {
    case WeightFamily::Power: os << "power(" << param_ << ")"; break;
    case WeightFamily::LogPower: os << "logpow(" << param_ << ")"; break;
    case WeightFamily::Table: os << "table(" << t_.size() << " samples)"; break;
  }
  return os.str();
}

double doubling_constant(const Weight& w, int grid_depth) {
  if (grid_depth < 4) throw ValidationError("doubling_constant needs grid_depth >= 4");
  double D = 1.0;
  for (int k = 0; k <= 4 * grid_depth; ++k) {
    double level = k / 4.0;
    double r = std::exp(w.log_dyadic(level) - w.log_dyadic(level - 1.0));
    D = std::max(D, r);
  }
  return D;
}

double default_band_base(const Weight& w) {
  double D = doubling_constant(w, 20);
  return std::max(2.0, std::ceil(D * D - kRelTol) + 1.0);
}

std::vector<long> scale_sequence(const Weight& w, double A, int l_max) {
  if (!(A > 1.0) || !std::isfinite(A)) throw ValidationError("scale_sequence needs A > 1");
  if (l_max < 1) throw ValidationError("scale_sequence needs l_max >= 1");
  const double log_A = std::log(A);
  // beyond this the dyadic scales underflow any double-based grid
  constexpr long kMaxAlpha = 1L << 40;
  std::vector<long> alphas{0};
  for (int l = 1; l <= l_max; ++l) {
    const double target = l * log_A;
    auto reaches = [&](long a) { return w.log_dyadic(static_cast<double>(a)) >= target - kRelTol * std::max(1.0, target); };
    long lo = alphas.back();  // reaches(lo) false: v(2^{-alpha_{l-1}}) < A^l
    long step = 1;
    long hi = lo + step;
    while (!reaches(hi)) {
      lo = hi;
      step *= 2;
      hi = lo + step;
      if (hi > kMaxAlpha)
        throw ValidationError("scale_sequence: weight never reaches A^" + std::to_string(l) +
                              " (growth too slow for the requested l_max)");
    }
    while (hi - lo > 1) {
      long mid = lo + (hi - lo) / 2;
      if (reaches(mid)) hi = mid; else lo = mid;
    }
    const double upper = (l + 1) * log_A;
    if (!(w.log_dyadic(static_cast<double>(hi)) < upper - kRelTol * std::max(1.0, upper)))
      throw ValidationError("scale_sequence: weight jumps past the band [A^" + std::to_string(l) + ", A^" +
                            std::to_string(l + 1) + ") at l = " + std::to_string(l) + "; choose a larger A");
    alphas.push_back(hi);
  }
  return alphas;
}

SmoothnessCertificate smoothness_exponent(const Weight& w, const std::vector<long>& alphas, double A) {
  (void)A;
  if (alphas.size() < 2) throw ValidationError("smoothness_exponent needs l_max >= 1");
  const long deepest = std::min<long>(std::max<long>(alphas.back(), 20), 2000);
  for (int m = 1; m <= 64; ++m) {
    // t^{m-1} v(t) nondecreasing on (0,1]: walking from t = 1 towards 0 the log value must not rise
    bool monotone = true;
    double prev = 0.0;
    for (long k = 1; k <= 4 * deepest && monotone; ++k) {
      double level = k / 4.0;
      double val = -(m - 1) * level * kLn2 + w.log_dyadic(level);
      if (val > prev + 1e-12 * std::max(1.0, std::abs(prev))) monotone = false;
      prev = val;
    }
    if (!monotone) continue;
    double gamma = 0.0;
    for (std::size_t l = 1; l < alphas.size(); ++l) {
      double log_r = -m * kLn2 * static_cast<double>(alphas[l] - alphas[l - 1]) +
                     w.log_dyadic(static_cast<double>(alphas[l])) - w.log_dyadic(static_cast<double>(alphas[l - 1]));
      gamma = std::max(gamma, std::exp(log_r));
    }
    if (gamma < 1.0) return {m, gamma};
  }
  throw NumericalError("smoothness_exponent: no m <= 64 gives ratios below 1");
}

std::optional<long> power_type_gap(const std::vector<long>& alphas) {
  if (alphas.size() < 3) return std::nullopt;
  std::vector<long> gaps;
  for (std::size_t l = 1; l < alphas.size(); ++l) gaps.push_back(alphas[l] - alphas[l - 1]);
  std::size_t half = (gaps.size() + 1) / 2;
  long first = *std::max_element(gaps.begin(), gaps.begin() + static_cast<long>(half));
  long all = *std::max_element(gaps.begin(), gaps.end());
  if (first == all) return all;
  return std::nullopt;
}

ScalePlan make_plan(const Weight& w, double A, int l_max) {
  ScalePlan plan;
  plan.A = A > 0.0 ? A : default_band_base(w);
  plan.alphas = scale_sequence(w, plan.A, l_max);
  auto cert = smoothness_exponent(w, plan.alphas, plan.A);
  plan.m = cert.m;
  plan.gamma = cert.gamma;
  plan.power_type_gap = power_type_gap(plan.alphas);
  return plan;
}

ScalePlan truncate_plan(const ScalePlan& plan, long max_level) {
  ScalePlan out = plan;
  out.alphas.clear();
  for (long a : plan.alphas)
    if (a <= max_level) out.alphas.push_back(a);
  return out;
}

}  // namespace growthwave
