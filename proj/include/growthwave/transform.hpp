#pragma once

// Periodized two-channel filter bank steps on power-of-two lengths.
//   analysis:  a[k] = sum_m h[m] x[(2k+m) mod n],  d[k] = sum_m g[m] x[(2k+m) mod n]
//   synthesis: the transpose of the analysis pair.

#include <Eigen/Core>
#include <cassert>

namespace growthwave {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived, typename FilterDerived>
Vec<typename Derived::Scalar> analysis_step(const Eigen::MatrixBase<Derived>& x,
                                            const Eigen::MatrixBase<FilterDerived>& filter) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  assert(n >= 2 && (n & (n - 1)) == 0);
  const Eigen::Index mask = n - 1;
  const Eigen::Index len = filter.size();
  Vec<Scalar> out(n / 2);
  for (Eigen::Index k = 0; k < n / 2; ++k) {
    Scalar acc(0);
    for (Eigen::Index m = 0; m < len; ++m) acc += Scalar(filter(m)) * x((2 * k + m) & mask);
    out(k) = acc;
  }
  return out;
}

// Accumulates the transpose of analysis_step into y (length 2 * coarse.size()).
template <typename Derived, typename FilterDerived, typename OutDerived>
void synthesis_accumulate(const Eigen::MatrixBase<Derived>& coarse, const Eigen::MatrixBase<FilterDerived>& filter,
                          Eigen::MatrixBase<OutDerived>& y) {
  const Eigen::Index n = 2 * coarse.size();
  assert(y.size() == n);
  const Eigen::Index mask = n - 1;
  const Eigen::Index len = filter.size();
  for (Eigen::Index k = 0; k < coarse.size(); ++k) {
    const auto c = coarse(k);
    if (c == decltype(c)(0)) continue;
    for (Eigen::Index m = 0; m < len; ++m) y((2 * k + m) & mask) += filter(m) * c;
  }
}

template <typename DerivedA, typename DerivedD, typename LoDerived, typename HiDerived>
Vec<typename DerivedA::Scalar> synthesis_step(const Eigen::MatrixBase<DerivedA>& approx,
                                              const Eigen::MatrixBase<DerivedD>& detail,
                                              const Eigen::MatrixBase<LoDerived>& lo,
                                              const Eigen::MatrixBase<HiDerived>& hi) {
  Vec<typename DerivedA::Scalar> y = Vec<typename DerivedA::Scalar>::Zero(2 * approx.size());
  synthesis_accumulate(approx, lo, y);
  synthesis_accumulate(detail, hi, y);
  return y;
}

// Lifts approximation coefficients at a coarse level to `levels` finer levels with zero details.
template <typename Derived, typename LoDerived>
Vec<typename Derived::Scalar> upsample_approx(const Eigen::MatrixBase<Derived>& approx,
                                              const Eigen::MatrixBase<LoDerived>& lo, int levels) {
  Vec<typename Derived::Scalar> cur = approx;
  for (int i = 0; i < levels; ++i) {
    Vec<typename Derived::Scalar> next = Vec<typename Derived::Scalar>::Zero(2 * cur.size());
    synthesis_accumulate(cur, lo, next);
    cur.swap(next);
  }
  return cur;
}

}  // namespace growthwave
