#include <cmath>
#include <numbers>

#include "doctest.h"
#include "growthwave/error.hpp"
#include "growthwave/growth.hpp"
#include "growthwave/seqspace.hpp"

using namespace growthwave;

namespace {

GridFunction sampled(int J, const std::function<double(double)>& f) {
  Eigen::VectorXd s(Eigen::Index(1) << J);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = f(static_cast<double>(i) / static_cast<double>(s.size()));
  return GridFunction(s);
}

double max_diff(const WeightedSequence& a, const WeightedSequence& b) { return sup_abs(a + (-1.0) * b); }

}  // namespace

TEST_CASE("refinement coefficients") {
  auto haar = build_basis(1, 10, 3);
  auto g = refinement_coeffs(haar, 1);
  REQUIRE(g.size() == 2);
  CHECK(g(0) == doctest::Approx(0.5));
  CHECK(g(1) == doctest::Approx(0.5));
  CHECK(refinement_coeffs(haar, 3).isApprox(Eigen::VectorXd::Constant(8, 0.125)));
  CHECK_THROWS_AS(refinement_coeffs(haar, 0), ValidationError);

  for (int order : {1, 2, 3, 4, 6}) {
    auto b = build_basis(order, 10, 3);
    RefinementTable tab(b, 5);
    for (int j = 1; j <= 5; ++j) {
      CAPTURE(order);
      CAPTURE(j);
      const auto& gj = tab(j);
      CHECK((gj - refinement_coeffs(b, j)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(gj.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(gj.squaredNorm() - std::exp2(-j)) <= 1e-10);
      CHECK(gj.size() <= (2 * order) << j);
      // orthogonality of shifts by 2^j
      const Eigen::Index step = Eigen::Index(1) << j;
      for (Eigen::Index s = step; s < gj.size(); s += step)
        CHECK(std::abs(gj.head(gj.size() - s).dot(gj.tail(gj.size() - s))) <= 1e-10);
    }
    // composition: sum_m gamma(j, m) gamma(i, mu - 2^i m) = gamma(i + j, mu)
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 3; ++j) {
        Eigen::VectorXd comp = Eigen::VectorXd::Zero(tab(i + j).size());
        for (Eigen::Index m = 0; m < tab(j).size(); ++m)
          comp.segment(m << i, tab(i).size()) += tab(j)(m) * tab(i);
        CHECK((comp - tab(i + j)).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
}

TEST_CASE("restrict and extend") {
  auto b = build_basis(3, 10, 3);
  RefinementTable tab(b, 4);
  for (int d : {1, 2, 4}) {
    const int j = 3;
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(1 << j, -1.0, 2.0).array().sin();
    auto up = extend_level(x, tab(d), d);
    CHECK(up.size() == (1 << (j + d)));
    CHECK((restrict_level(up, tab(d), d) - x).cwiseAbs().maxCoeff() <= 1e-12);  // R Q = I
  }
  CHECK_THROWS_AS(restrict_level(Eigen::VectorXd::Zero(6), tab(1), 2), ValidationError);
}

TEST_CASE("sample coefficients") {
  const int J = 11;
  auto b = build_basis(4, 12, 3);
  auto v = Weight::power(1.0);
  auto plan = make_plan(v, 0.0, 8);
  auto ones = sample_coefficients(GridFunction::constant(J, 1.0), b, plan);
  CHECK(ones.levels == grid_levels(plan, J));
  for (std::size_t i = 0; i < ones.levels.size(); ++i) {
    CHECK(ones.entries[i].size() == (Eigen::Index(1) << ones.levels[i]));
    CHECK((ones.entries[i].array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
  auto f = sampled(J, [](double x) { return std::sin(2 * std::numbers::pi * x) + (x < 0.3 ? 1.0 : 0.0); });
  auto g = sampled(J, [](double x) { return x * x; });
  auto lin = sample_coefficients(f + 3.0 * g, b, plan) + (-1.0) * (sample_coefficients(f, b, plan) + 3.0 * sample_coefficients(g, b, plan));
  CHECK(sup_abs(lin) <= 1e-12);

  auto u = normalize_member(random_member(v, plan, b, 1.0, 5, J), v);
  CHECK(std::isfinite(weighted_norm(sample_coefficients(u, b, plan), v)));

  auto deep = make_plan(v, 2.0, 20);
  CHECK_THROWS_AS(sample_coefficients(GridFunction::constant(3, 1.0), b, ScalePlan{2.0, {5, 6}, 1, 0.0, {}}), ValidationError);
  CHECK(sample_coefficients(GridFunction::constant(J, 1.0), b, deep).levels.back() == J);
}

TEST_CASE("consistency defect") {
  const int J = 11;
  auto b = build_basis(4, 12, 3);
  auto v = Weight::power(1.0);
  auto plan = make_plan(v, 0.0, 8);
  auto f = sampled(J, [](double x) { return std::cos(6 * std::numbers::pi * x) + (x > 0.6 ? 2.0 : 0.0); });
  auto a = sample_coefficients(f, b, plan);
  CHECK(sup_abs(consistency_defect(a, b)) <= 1e-8);

  // one deepest entry perturbed: only the next coarser level moves, by -gamma * eps
  const double eps = 1e-3;
  auto p = a;
  const std::size_t last = p.levels.size() - 1;
  const Eigen::Index m0 = 37;
  p.entries[last](m0) += eps;
  auto dp = consistency_defect(p, b);
  const int d = static_cast<int>(p.levels[last] - p.levels[last - 1]);
  auto gam = refinement_coeffs(b, d);
  const Eigen::Index nf = Eigen::Index(1) << p.levels[last];
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(Eigen::Index(1) << p.levels[last - 1]);
  for (Eigen::Index k = 0; k < expect.size(); ++k)
    for (Eigen::Index n = 0; n < gam.size(); ++n)
      if (((k << d) + n) % nf == m0) expect(k) -= gam(n) * eps;
  CHECK((dp.entries[last - 1] - expect).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(expect.cwiseAbs().maxCoeff() > 0.0);
  for (std::size_t i = 0; i + 1 < last; ++i) CHECK(dp.entries[i].cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(dp.entries[last].cwiseAbs().maxCoeff() == 0.0);

  auto r1 = random_sequence(v, plan, J, 1), r2 = random_sequence(v, plan, J, 2);
  auto lin = consistency_defect(r1 + 2.0 * r2, b) + (-1.0) * (consistency_defect(r1, b) + 2.0 * consistency_defect(r2, b));
  CHECK(sup_abs(lin) <= 1e-10);
  CHECK_THROWS_AS(consistency_defect(WeightedSequence{{3}, {Eigen::VectorXd::Ones(8)}}, b), ValidationError);
}

TEST_CASE("projection onto the consistency lattice") {
  const int J = 11;
  auto b = build_basis(4, 12, 3);
  auto v = Weight::power(1.0);
  auto plan = make_plan(v, 0.0, 8);
  auto a = random_sequence(v, plan, J, 42);
  CHECK(weighted_norm(a, v) <= 1.0);
  auto pa = project_to_ell(a, b);
  CHECK(sup_abs(consistency_defect(pa, b)) <= 1e-8);
  CHECK(max_diff(project_to_ell(pa, b), pa) <= 1e-10);
  CHECK(weighted_norm(pa, v) < 50.0);

  // recursive correction equals the explicit double sum
  auto delta = consistency_defect(a, b);
  for (std::size_t j = 1; j < a.levels.size(); ++j) {
    Eigen::VectorXd direct = a.entries[j];
    for (std::size_t i = 0; i < j; ++i) {
      const int d = static_cast<int>(a.levels[j] - a.levels[i]);
      direct += extend_level(delta.entries[i], refinement_coeffs(b, d), d);
    }
    CHECK((direct - pa.entries[j]).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + direct.cwiseAbs().maxCoeff()));
  }

  // genuine families are fixed points
  auto f = sampled(J, [](double x) { return std::abs(x - 0.3) < 0.1 ? 1.0 : std::sin(10 * x); });
  auto s = sample_coefficients(f, b, plan);
  CHECK(max_diff(project_to_ell(s, b), s) <= 1e-8);

  // round trip through the deepest level
  auto g = synthesize_from_sequence(pa, b, J);
  CHECK(max_diff(sample_coefficients(g, b, plan), pa) <= 1e-6 * (1.0 + sup_abs(pa)));
}
