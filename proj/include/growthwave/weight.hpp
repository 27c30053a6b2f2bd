#pragma once

#include <optional>
#include <string>
#include <vector>

namespace growthwave {

enum class WeightFamily { Power, LogPower, Table };

// Doubling weight v on (0, inf): non-increasing, v = 1 for t > 1, unbounded at 0+.
class Weight {
 public:
  static Weight power(double a);
  static Weight log_power(double b);
  // Samples (t_i, v_i) with t strictly increasing in (0, 1] and v non-increasing, v >= 1.
  // Interpolated linearly in (ln t, ln v); extrapolated below t_0 with the first segment's slope.
  static Weight table(std::vector<double> t, std::vector<double> v);

  double operator()(double t) const;
  // v(2^{-level}) evaluated without forming 2^{-level}, so level may run past the double range.
  double dyadic(double level) const;
  double log_dyadic(double level) const;

  WeightFamily family() const { return family_; }
  double parameter() const { return param_; }
  const std::vector<double>& table_t() const { return t_; }
  const std::vector<double>& table_v() const { return v_; }
  std::string describe() const;

 private:
  Weight() = default;
  double log_eval_log_t(double log_t) const;

  WeightFamily family_ = WeightFamily::Power;
  double param_ = 1.0;
  std::vector<double> t_, v_, log_t_, log_v_;
};

struct ScalePlan {
  double A = 2.0;
  std::vector<long> alphas;  // alphas[0] = 0, strictly increasing, size l_max + 1
  int m = 1;
  double gamma = 0.0;
  std::optional<long> power_type_gap;

  int l_max() const { return static_cast<int>(alphas.size()) - 1; }
};

struct SmoothnessCertificate {
  int m = 1;
  double gamma = 0.0;
};

double doubling_constant(const Weight& w, int grid_depth = 20);

// max(2, ceil(D^2) + 1) with D on a depth-20 grid.
double default_band_base(const Weight& w);

// alphas part of the plan; any A > 1 is accepted, band membership is verified per level.
std::vector<long> scale_sequence(const Weight& w, double A, int l_max);

SmoothnessCertificate smoothness_exponent(const Weight& w, const std::vector<long>& alphas, double A);

std::optional<long> power_type_gap(const std::vector<long>& alphas);

// Full plan. A <= 0 selects the default base.
ScalePlan make_plan(const Weight& w, double A, int l_max);

// Same plan cut to the levels whose generations fit below resolution J (alpha_l <= max_level).
ScalePlan truncate_plan(const ScalePlan& plan, long max_level);

}  // namespace growthwave
