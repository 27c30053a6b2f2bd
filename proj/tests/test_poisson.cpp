#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "growthwave/error.hpp"
#include "growthwave/poisson.hpp"

using namespace growthwave;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction sampled(int J, const std::function<double(double)>& f) {
  Eigen::VectorXd s(Eigen::Index(1) << J);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = f(static_cast<double>(i) / static_cast<double>(s.size()));
  return GridFunction(s);
}

GridFunction random_grid(int J, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd s(Eigen::Index(1) << J);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = u(rng);
  return GridFunction(s);
}

// sigma with random coefficients on |k| <= band
GridFunction bandlimited(int J, long band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Spectrum X(static_cast<std::size_t>((1L << (J - 1)) + 1), {0.0, 0.0});
  const double N = std::ldexp(1.0, J);
  for (long k = 0; k <= band; ++k) X[static_cast<std::size_t>(k)] = {N * g(rng), k == 0 ? 0.0 : N * g(rng)};
  return inverse_spectrum(X, J);
}

}  // namespace

TEST_CASE("Poisson extension oracles") {
  const int J = 10;
  auto one = GridFunction::constant(J, 1.0);
  CHECK((poisson_extend(one, 0.3).samples().array() - 1.0).abs().maxCoeff() <= 1e-14);

  auto c = sampled(J, [](double x) { return std::cos(2 * kPi * x); });
  for (double t : {0.01, 0.1, 0.5}) {
    auto u = poisson_extend(c, t);
    CHECK((u.samples() - std::exp(-2 * kPi * t) * c.samples()).cwiseAbs().maxCoeff() <= 1e-13);
  }
  auto f = random_grid(J, 5);
  auto twice = poisson_extend(poisson_extend(f, 0.25), 0.25);
  CHECK((twice.samples() - poisson_extend(f, 0.5).samples()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(poisson_extend(f, 0.0), ValidationError);
  CHECK_THROWS_AS(poisson_extend(f, -1.0), ValidationError);
}

TEST_CASE("periodic Poisson kernel closed form matches the multiplier") {
  const int J = 10;
  const double s = 0.05;
  auto ker = sampled(J, [s](double x) { return periodic_poisson_kernel(x, s); });
  CHECK(ker.mean() == doctest::Approx(1.0).epsilon(1e-12));
  auto X = forward_spectrum(ker);
  for (long k : {0L, 1L, 7L, 40L})
    CHECK(X[static_cast<std::size_t>(k)].real() / 1024.0 == doctest::Approx(std::exp(-2 * kPi * s * k)).epsilon(1e-10));
}

TEST_CASE("harmonic field: semigroup, max principle, boundary limit") {
  const int J = 11;
  auto f = sampled(J, [](double x) { return std::sin(2 * kPi * x) + 0.3 * std::cos(6 * kPi * x) + 0.1; });
  HarmonicField field(f);
  CHECK(field.t_grid().size() == static_cast<std::size_t>(2 * J + 1));
  CHECK(field.t_grid().front() == 1.0);
  double prev = field.boundary().sup_norm();
  for (std::size_t i = field.t_grid().size(); i-- > 0;) {
    double cur = field.level(i).sup_norm();
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
  auto u = field.at(0.1);
  auto conv = convolve(u, sampled(J, [](double x) { return periodic_poisson_kernel(x, 0.2); }));
  CHECK((conv.samples() - field.at(0.3).samples()).cwiseAbs().maxCoeff() <= 1e-10 * f.sup_norm());
  double e1 = (field.at(1e-3).samples() - f.samples()).cwiseAbs().maxCoeff();
  double e2 = (field.at(1e-4).samples() - f.samples()).cwiseAbs().maxCoeff();
  CHECK(e2 < e1);
  CHECK(e2 < 1e-2);
}

TEST_CASE("sigma kernel symbol") {
  CHECK(sigma_symbol(0.5, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigma_symbol(1.0, 1) == doctest::Approx(std::exp(2 * kPi)).epsilon(1e-13));
  CHECK(sigma_symbol(1.0, 1) == doctest::Approx(535.4916555247646).epsilon(1e-12));
  for (double x : {0.0, 0.3, 0.7, 1.0}) CHECK(std::abs(sigma_symbol(1.0, x) - std::exp(2 * kPi * x)) <= 1e-10 * std::exp(2 * kPi * x));
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(2.0) == 0.0);
  CHECK(smoothstep(1.5) == doctest::Approx(0.5));
  for (double x = 1.0; x < 2.0; x += 0.01) CHECK(smoothstep(x + 0.01) <= smoothstep(x));
  CHECK_THROWS_AS(sigma_kernel(0.0, 10), ValidationError);
  CHECK_THROWS_AS(sigma_kernel(1.5, 10), ValidationError);
  CHECK_THROWS_AS(sigma_kernel(1.0 / 512, 10), ValidationError);
}

TEST_CASE("sigma kernel reconstructs bandlimited data") {
  const int J = 12;
  for (int j : {0, 2, 5}) {
    const double delta = std::ldexp(1.0, -j);
    auto K = sigma_kernel(delta, J);
    auto sigma = bandlimited(J, static_cast<long>(1.0 / delta), 100 + static_cast<unsigned>(j));
    auto P = sampled(J, [delta](double x) { return periodic_poisson_kernel(x, delta); });
    auto rec = convolve(convolve(sigma, P), K.kernel);
    CHECK((rec - sigma).l1_norm() <= 1e-8 * sigma.l1_norm());
    CHECK(K.l1_norm > 0.0);
  }
}

TEST_CASE("pairing bound check oracles") {
  const int J = 10;
  auto w = Weight::power(1.0);
  HarmonicField one(GridFunction::constant(J, 1.0));
  auto two = GridFunction::constant(J, 2.0);
  auto r1 = pairing_bound_check(one, two, 0.5, w);
  for (double p : r1.pairings) CHECK(p == doctest::Approx(2.0).epsilon(1e-13));

  HarmonicField cosf(sampled(J, [](double x) { return std::cos(2 * kPi * x); }));
  auto sigma = sampled(J, [](double x) { return 2 * std::cos(2 * kPi * x); });
  auto r2 = pairing_bound_check(cosf, sigma, 1.0, w);
  for (std::size_t i = 0; i < r2.t.size(); ++i)
    CHECK(r2.pairings[i] == doctest::Approx(std::exp(-2 * kPi * r2.t[i])).epsilon(1e-12));

  auto rough = sampled(J, [](double x) { return std::cos(2 * kPi * 9 * x); });
  CHECK_THROWS_WITH_AS(pairing_bound_check(cosf, rough, 0.25, w), doctest::Contains("frequency 9"), ValidationError);
}

TEST_CASE("box splines") {
  CHECK(box_spline(2, 0.0) == doctest::Approx(1.0));
  CHECK(box_spline(2, 0.5) == doctest::Approx(0.5));
  CHECK(box_spline(2, 1.0) == doctest::Approx(0.0));
  CHECK(box_spline(1, 0.2) == 1.0);
  for (int r : {1, 2, 3, 4, 6}) {
    double acc = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) acc += box_spline(r, -0.5 * r + r * (i + 0.5) / n) * r / n;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
  }
  // cubic B-spline central value 2/3
  CHECK(box_spline(4, 0.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("dilated test pairing") {
  const int J = 10;
  auto w = Weight::power(1.0);
  HarmonicField one(GridFunction::constant(J, 1.0));
  auto rep = dilated_test_pairing(one, 4, {1.0, 0.25, 1.0 / 64}, w, 2);
  // u = 1: pairing = a for every y, t
  for (std::size_t i = 0; i < rep.a.size(); ++i) CHECK(rep.max_ratio_per_a[i] == doctest::Approx(1.0 / w(rep.a[i])).epsilon(1e-12));

  // spectral route against direct quadrature with the closed-form spline
  auto f = sampled(J, [](double x) { return std::sin(2 * kPi * x) + 0.5 * std::cos(10 * kPi * x); });
  HarmonicField field(f);
  const double a = 0.125, t = field.t_grid()[3];
  auto u = field.level(3);
  double best = 0;
  for (Eigen::Index yi = 0; yi < u.size(); yi += 16) {
    double y = static_cast<double>(yi) / static_cast<double>(u.size()), acc = 0;
    for (Eigen::Index xi = 0; xi < u.size(); ++xi) {
      double x = static_cast<double>(xi) / static_cast<double>(u.size());
      double z = y - x;
      z -= std::round(z);
      acc += u[xi] * box_spline(4, z / a);
    }
    best = std::max(best, std::abs(acc / static_cast<double>(u.size())));
  }
  (void)t;
  auto single = dilated_test_pairing(HarmonicField(u), 4, {a}, w, 2);
  // the single-level field also sweeps t > 0, which only lowers the pairing
  CHECK(single.max_ratio * a * w(a) == doctest::Approx(best).epsilon(1e-3));
  CHECK_THROWS_AS(dilated_test_pairing(field, 3, {0.5}, w, 2), ValidationError);
}

TEST_CASE("projection defects") {
  auto b = build_basis(3, 12, 3);
  auto c = mra_constant_defect(b, 6, 11);
  CHECK(c.defect_PE <= 1e-8);
  CHECK(c.defect_DP <= 1e-8);
  auto big = mra_poisson_defect(b, 1.0, 6, 11);
  CHECK(big.defect_PE <= 1e-3);
  CHECK(big.defect_DP <= 1e-3);
  auto d1 = mra_poisson_defect(b, 0.25, 6, 11);
  auto d2 = mra_poisson_defect(b, 0.0625, 6, 11);
  CHECK(d2.defect_PE > d1.defect_PE);
  CHECK_THROWS_AS(mra_poisson_defect(b, 1e-5, 6, 11), ValidationError);
}
