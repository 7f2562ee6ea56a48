#ifndef QTELE_QUADRATURE_HPP
#define QTELE_QUADRATURE_HPP

#include <cstddef>
#include <type_traits>

#include "qtele/errors.hpp"

namespace qtele {

/// Composite Simpson rule on [a, b] with `intervals` (even) subintervals.
/// Works for real or complex integrands.
template <typename F>
auto simpson(F&& f, double a, double b, std::size_t intervals) {
  using R = std::decay_t<decltype(f(a))>;
  if (intervals < 2 || intervals % 2 != 0) {
    throw ValidationError("simpson needs an even number of intervals >= 2");
  }
  const double h = (b - a) / static_cast<double>(intervals);
  R odd{}, even{};
  for (std::size_t i = 1; i < intervals; ++i) {
    const R v = f(a + h * static_cast<double>(i));
    if (i % 2 == 1) odd += v; else even += v;
  }
  return (f(a) + f(b) + 4.0 * odd + 2.0 * even) * (h / 3.0);
}

/// Tensor-product Simpson rule over [a1, b1] x [a2, b2].
template <typename F>
auto simpson_2d(F&& f, double a1, double b1, double a2, double b2, std::size_t intervals) {
  return simpson(
      [&](double x1) {
        return simpson([&](double x2) { return f(x1, x2); }, a2, b2, intervals);
      },
      a1, b1, intervals);
}

}  // namespace qtele

#endif  // QTELE_QUADRATURE_HPP
