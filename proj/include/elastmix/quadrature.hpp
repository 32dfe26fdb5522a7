#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "elastmix/common.hpp"
#include "elastmix/grid.hpp"

namespace elastmix {

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule on [0, 1], exact for polynomials of degree 2n-1.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need at least one point");
  if (n == 1) return {{0.5}, {1.0}};
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    // [-1, 1] -> [0, 1], ascending.
    rule.points[n - 1 - k] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - k] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

/// Calls fn(x, w) at the tensor-product points of `box`. Degenerate axes
/// (lo == hi) contribute a single point with unit weight; the weights are
/// normalized so they sum to 1 (i.e. they compute averages).
template <int Dim, class Fn>
void for_each_quadrature_point(const Box<Dim>& box, const QuadratureRule& rule, Fn&& fn) {
  std::array<int, Dim> count{};
  std::size_t total = 1;
  for (int k = 0; k < Dim; ++k) {
    count[k] = box.size(k) > 0.0 ? rule.size() : 1;
    total *= count[k];
  }
  Vec<Dim> x;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double w = 1.0;
    for (int k = 0; k < Dim; ++k) {
      const int q = static_cast<int>(rest % count[k]);
      rest /= count[k];
      if (count[k] == 1 && !(box.size(k) > 0.0)) {
        x[k] = box.lo[k];
      } else {
        x[k] = box.lo[k] + box.size(k) * rule.points[q];
        w *= rule.weights[q];
      }
    }
    fn(static_cast<const Vec<Dim>&>(x), w);
  }
}

/// Average of f over the (possibly degenerate) box. For a box of measure zero
/// in every direction this is the point value.
template <int Dim, class Fn>
auto average_over(const Box<Dim>& box, const QuadratureRule& rule, Fn&& f) {
  using Result = std::decay_t<decltype(f(box.lo))>;
  Result acc = f(box.lo) * 0.0;
  for_each_quadrature_point<Dim>(box, rule, [&](const Vec<Dim>& x, double w) { acc += w * f(x); });
  return acc;
}

/// Measure of the box restricted to its non-degenerate axes.
template <int Dim>
double measure(const Box<Dim>& box) {
  double m = 1.0;
  for (int k = 0; k < Dim; ++k)
    if (box.size(k) > 0.0) m *= box.size(k);
  return m;
}

}  // namespace elastmix
