#include <cmath>
#include <numbers>

#include "doctest.h"
#include "growthwave/error.hpp"
#include "growthwave/growth.hpp"
#include "growthwave/support.hpp"

using namespace growthwave;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction sampled(int J, const std::function<double(double)>& f) {
  Eigen::VectorXd s(Eigen::Index(1) << J);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = f(static_cast<double>(i) / static_cast<double>(s.size()));
  return GridFunction(s);
}

}  // namespace

TEST_CASE("growth norm oracles") {
  const int J = 10;
  auto p1 = Weight::power(1.0);
  CHECK(growth_norm(HarmonicField(GridFunction::constant(J, 1.0)), p1) == doctest::Approx(1.0).epsilon(1e-14));

  auto c = sampled(J, [](double x) { return std::cos(2 * kPi * x); });
  HarmonicField field(c);
  double grid_oracle = 0.0;
  for (double t : field.t_grid()) grid_oracle = std::max(grid_oracle, std::exp(-2 * kPi * t) / p1(t));
  const double K = growth_norm(field, p1);
  CHECK(K == doctest::Approx(grid_oracle).epsilon(1e-12));
  // dense scalar search for the continuum sup
  double dense = 0.0;
  for (int i = 1; i <= 200000; ++i) {
    double t = i * 1e-5;
    dense = std::max(dense, std::exp(-2 * kPi * t) * std::min(1.0, t));
  }
  CHECK(dense == doctest::Approx(std::exp(-1.0) / (2 * kPi)).epsilon(1e-6));
  CHECK(K <= dense);
  CHECK(K >= 0.99 * dense);

  HarmonicField scaled(GridFunction(-3.0 * c.samples()));
  CHECK(growth_norm(scaled, p1) == doctest::Approx(3.0 * K).epsilon(1e-13));
}

TEST_CASE("M_N profile oracles") {
  const int J = 10;
  auto b = build_basis(4, 12, 3);
  auto prof = msum_profile(HarmonicField(GridFunction::constant(J, 1.0)), b);
  REQUIRE(prof.M.size() == static_cast<std::size_t>(J));
  for (double M : prof.M) CHECK(M == doctest::Approx(1.0).epsilon(1e-12));

  // single wavelet boundary: coarse partial sums of the boundary vanish, finer ones do not
  const int jw = 6;
  auto w = wavelet_on_grid(b, J, jw, 9);
  auto tree = analyze(w, b);
  for (int N = 2; N < jw; ++N) CHECK(partial_sum(tree, N, b).sup_norm() <= 1e-8);
  for (int N = jw; N < J; ++N) CHECK(partial_sum(tree, N, b).sup_norm() > 0.1);
  auto field_prof = msum_profile(HarmonicField(w), b);
  for (int N = jw; N < J; ++N) CHECK(field_prof.M[static_cast<std::size_t>(N)] > 0.1);
}

TEST_CASE("characterize: constants and finite expansions") {
  // power(0.5) grows only by sqrt(2) per level; the quarter-mean flag needs about 14 levels
  const int J = 14;
  auto b = build_basis(8, 12, 3);
  for (const auto& v : {Weight::power(1.0), Weight::power(0.5)}) {
    auto plan = make_plan(v, 0.0, 6);
    auto r = characterize(HarmonicField(GridFunction::constant(J, 1.0)), v, b, plan);
    CHECK(r.K_direct == doctest::Approx(1.0));
    CHECK(r.K_wavelet == doctest::Approx(1.0));
    CHECK(r.equivalence_ratio == doctest::Approx(1.0));
    CHECK(r.h_v0_candidate);
    CHECK(r.h_v0_trend < 0.0);

    CoeffTree t = CoeffTree::zero(3, J);
    t.scaling(2) = 0.5;
    t.detail(4)(3) = 1.0;
    t.detail(5)(20) = -0.7;
    auto fin = characterize(HarmonicField(synthesize(t, b)), v, b, plan);
    CHECK(fin.h_v0_candidate);
    CHECK(fin.K_direct > 0.0);
  }
}

TEST_CASE("random members: determinism, block targets, zero amplitude") {
  const int J = 11;
  auto b = build_basis(8, 12, 3);
  auto v = Weight::power(1.0);
  auto plan = make_plan(v, 0.0, 8);
  auto m1 = random_member(v, plan, b, 1.0, 1234, J);
  auto m2 = random_member(v, plan, b, 1.0, 1234, J);
  CHECK(m1.samples() == m2.samples());
  auto m3 = random_member(v, plan, b, 1.0, 1235, J);
  CHECK(m1.samples() != m3.samples());
  CHECK(random_member(v, plan, b, 0.0, 7, J).sup_norm() == 0.0);

  auto fitted = truncate_plan(plan, J - 1);
  auto blocks = block_decompose(analyze(m1, b), fitted, b);
  CHECK(blocks.blocks[0].sup_norm() == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t l = 1; l < blocks.blocks.size(); ++l)
    CHECK(blocks.blocks[l].sup_norm() == doctest::Approx(v.dyadic(static_cast<double>(fitted.alphas[l]))).epsilon(1e-10));
  CHECK(blocks.remainder.sup_norm() <= 1e-10);

  auto normed = normalize_member(m1, v);
  CHECK(growth_norm(HarmonicField(normed), v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coefficient checks") {
  const int J = 11;
  auto b = build_basis(8, 12, 3);
  auto p1 = Weight::power(1.0);
  auto plan = make_plan(p1, 0.0, 8);
  auto ones = field_coefficients(HarmonicField(GridFunction::constant(J, 1.0)), b);
  CHECK(coefficient_check(ones, p1, plan, CoefficientDirection::Forward, 1.0).max_ratio <= 1e-12);

  auto tree = coefficient_member(p1, b, 1.0, 99, J);
  auto cc = coefficient_check({tree}, p1, plan, CoefficientDirection::Converse, 1.0);
  CHECK(cc.max_ratio <= 1.0 + 1e-8);
  CHECK(cc.max_ratio >= 1.0 - 1e-12);
  CHECK(cc.pass);
  auto boundary = synthesize(tree, b);
  auto again = coefficient_check({analyze(boundary, b)}, p1, plan, CoefficientDirection::Converse, 1.0);
  CHECK(again.max_ratio <= 1.0 + 1e-8);

  auto lp = Weight::log_power(1.0);
  auto lplan = make_plan(lp, 0.0, 4);
  CHECK_THROWS_WITH_AS(coefficient_check({tree}, lp, lplan, CoefficientDirection::Converse, 1.0),
                       doctest::Contains("power-type"), ValidationError);
  CHECK_NOTHROW(coefficient_check({tree}, lp, lplan, CoefficientDirection::Forward, 1.0));
}

TEST_CASE("counterexample series for a logarithmic weight") {
  const int J = 14;
  auto haar = build_basis(1, 12, 3);
  auto lp = Weight::log_power(1.0);
  auto plan = make_plan(lp, 0.0, 4);
  auto ce = counterexample_series(lp, plan, haar, 4, J);
  CHECK(ce.a == doctest::Approx(1.0));
  CHECK(ce.step == 1);
  REQUIRE(ce.terms.size() == 4);
  std::vector<double> x, y;
  for (const auto& t : ce.terms) {
    CAPTURE(t.d);
    CHECK(t.ratio >= 0.5 * ce.a * t.d);
    CHECK(t.ratio == doctest::Approx(t.d + 1.0).epsilon(1e-10));
    CHECK(t.coeff_ratio <= 1.0 + 1e-8);
    x.push_back(t.d);
    y.push_back(t.ratio);
  }
  CHECK(ols_slope(x, y) >= 0.4 * ce.a);
  // d = 1: at least one wavelet peak
  CHECK(ce.terms[0].norm >= ce.a * lp.dyadic(ce.step * ce.terms[0].s_d));

  auto pplan = make_plan(Weight::power(1.0), 0.0, 6);
  CHECK_THROWS_WITH_AS(counterexample_series(Weight::power(1.0), pplan, haar, 2, J), doctest::Contains("power-type"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(counterexample_series(lp, plan, haar, 4, 8), doctest::Contains("increase J"), ValidationError);
}
