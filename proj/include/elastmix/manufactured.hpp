#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "elastmix/common.hpp"
#include "elastmix/material.hpp"

namespace elastmix {

/// Exact solution of the pure displacement problem on [0,1]^n with u = 0 on
/// the boundary: sigma = C eps(u) and f = div sigma (the load convention of
/// the mixed form, (div sigma, v) = (f, v)).
template <int Dim>
struct ExactSolution {
  std::string name;
  LameParams material;
  std::function<Vec<Dim>(const Vec<Dim>&)> u;
  std::function<Eigen::Matrix<double, Dim, Dim>(const Vec<Dim>&)> grad_u;  // (grad u)_{ij} = d u_i / d x_j
  std::function<SymTensor<Dim>(const Vec<Dim>&)> sigma;
  std::function<Vec<Dim>(const Vec<Dim>&)> f;
};

namespace detail {

/// Solution with u_i = S(x) = prod_k p(x_k) for every component i.
/// With g = grad S and H = hess S:
///   eps_ij = (g_i + g_j) / 2,  sigma = mu (g 1^T + 1 g^T) + lambda (sum g) I,
///   f = mu lap(u) + (mu + lambda) grad div u = mu tr(H) 1 + (mu + lambda) H 1.
template <int Dim>
ExactSolution<Dim> product_solution(std::string name, const LameParams& mat, std::function<double(double)> p,
                                    std::function<double(double)> dp, std::function<double(double)> ddp) {
  mat.validate(Dim);
  struct Factors {
    std::array<double, Dim> v, d, dd;
  };
  auto factors = [p, dp, ddp](const Vec<Dim>& x) {
    Factors fa;
    for (int k = 0; k < Dim; ++k) {
      fa.v[k] = p(x[k]);
      fa.d[k] = dp(x[k]);
      fa.dd[k] = ddp(x[k]);
    }
    return fa;
  };
  // Product of fa.v over all axes except the listed ones.
  auto rest = [](const Factors& fa, int skip1, int skip2) {
    double r = 1.0;
    for (int k = 0; k < Dim; ++k)
      if (k != skip1 && k != skip2) r *= fa.v[k];
    return r;
  };
  auto gradient = [factors, rest](const Vec<Dim>& x) {
    const auto fa = factors(x);
    Vec<Dim> g;
    for (int k = 0; k < Dim; ++k) g[k] = fa.d[k] * rest(fa, k, -1);
    return g;
  };
  auto hessian = [factors, rest](const Vec<Dim>& x) {
    const auto fa = factors(x);
    SymTensor<Dim> H;
    for (int a = 0; a < Dim; ++a)
      for (int b = 0; b < Dim; ++b)
        H(a, b) = (a == b) ? fa.dd[a] * rest(fa, a, -1) : fa.d[a] * fa.d[b] * rest(fa, a, b);
    return H;
  };

  ExactSolution<Dim> s;
  s.name = std::move(name);
  s.material = mat;
  s.u = [factors, rest](const Vec<Dim>& x) { return Vec<Dim>::Constant(rest(factors(x), -1, -1)); };
  s.grad_u = [gradient](const Vec<Dim>& x) {
    const Vec<Dim> g = gradient(x);
    return Eigen::Matrix<double, Dim, Dim>(Vec<Dim>::Ones() * g.transpose());
  };
  s.sigma = [gradient, mat](const Vec<Dim>& x) {
    const Vec<Dim> g = gradient(x);
    SymTensor<Dim> t = mat.mu * (g * Vec<Dim>::Ones().transpose() + Vec<Dim>::Ones() * g.transpose());
    t.diagonal().array() += mat.lambda * g.sum();
    return t;
  };
  s.f = [hessian, mat](const Vec<Dim>& x) {
    const SymTensor<Dim> H = hessian(x);
    return Vec<Dim>(mat.mu * H.trace() * Vec<Dim>::Ones() + (mat.mu + mat.lambda) * H * Vec<Dim>::Ones());
  };
  return s;
}

}  // namespace detail

/// u_i(x) = prod_k sin(pi x_k) for all i.
template <int Dim>
ExactSolution<Dim> sine_solution(const LameParams& material) {
  static_assert(Dim == 2 || Dim == 3, "sine_solution supports n = 2, 3");
  constexpr double pi = std::numbers::pi;
  return detail::product_solution<Dim>(
      "sine", material, [](double t) { return std::sin(pi * t); }, [](double t) { return pi * std::cos(pi * t); },
      [](double t) { return -pi * pi * std::sin(pi * t); });
}

/// u_i(x) = prod_k x_k (1 - x_k) for all i.
template <int Dim>
ExactSolution<Dim> polynomial_solution(const LameParams& material) {
  static_assert(Dim == 2 || Dim == 3, "polynomial_solution supports n = 2, 3");
  return detail::product_solution<Dim>(
      "polynomial", material, [](double t) { return t * (1.0 - t); }, [](double t) { return 1.0 - 2.0 * t; },
      [](double) { return -2.0; });
}

/// Looks a solution up by name ("sine" or "polynomial").
template <int Dim>
ExactSolution<Dim> solution_by_name(const std::string& name, const LameParams& material) {
  if (name == "sine") return sine_solution<Dim>(material);
  if (name == "polynomial") return polynomial_solution<Dim>(material);
  throw InvalidArgument("unknown solution '" + name + "' (expected sine or polynomial)");
}

}  // namespace elastmix
