#pragma once

#include <cmath>
#include <string>

#include "elastmix/common.hpp"

namespace elastmix {

/// Isotropic Lamé parameters. lambda is stored directly; see the helpers
/// below for (E, nu) conversions.
struct LameParams {
  double mu = 0.5;
  double lambda = 1.0;

  void validate(int dim) const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("LameParams: mu must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("LameParams: lambda must be non-negative");
    if (!(2.0 * mu + dim * lambda > 0.0)) throw InvalidArgument("LameParams: 2 mu + n lambda must be positive");
  }

  /// Smallest eigenvalue of the compliance map on symmetric tensors.
  double compliance_lower_bound(int dim) const { return 1.0 / (2.0 * mu + dim * lambda); }

  static LameParams from_young_poisson(double young, double poisson) {
    if (!(young > 0.0) || !(poisson >= 0.0 && poisson < 0.5))
      throw InvalidArgument("LameParams: need E > 0 and 0 <= nu < 1/2");
    return {young / (2.0 * (1.0 + poisson)), young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))};
  }
  double young() const { return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu); }
  double poisson() const { return lambda / (2.0 * (lambda + mu)); }
};

namespace detail {

template <int Dim>
void require_symmetric(const SymTensor<Dim>& t, const char* who) {
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  for (int i = 0; i < Dim; ++i)
    for (int j = i + 1; j < Dim; ++j)
      if (std::abs(t(i, j) - t(j, i)) > 1e-12 * scale)
        throw InvalidArgument(std::string(who) + ": tensor is not symmetric");
}

}  // namespace detail

/// A sigma = (sigma - lambda / (2 mu + n lambda) tr(sigma) I) / (2 mu).
template <int Dim>
SymTensor<Dim> apply_compliance(const LameParams& p, const SymTensor<Dim>& sigma) {
  detail::require_symmetric<Dim>(sigma, "apply_compliance");
  const double shift = p.lambda / (2.0 * p.mu + Dim * p.lambda) * sigma.trace();
  return (sigma - shift * SymTensor<Dim>::Identity()) / (2.0 * p.mu);
}

/// C eps = 2 mu eps + lambda tr(eps) I, the inverse of apply_compliance.
template <int Dim>
SymTensor<Dim> apply_stiffness(const LameParams& p, const SymTensor<Dim>& eps) {
  detail::require_symmetric<Dim>(eps, "apply_stiffness");
  return 2.0 * p.mu * eps + p.lambda * eps.trace() * SymTensor<Dim>::Identity();
}

/// (A s) : t without the symmetry check, for assembly loops.
template <int Dim>
double compliance_product(const LameParams& p, const SymTensor<Dim>& s, const SymTensor<Dim>& t) {
  const double c = p.lambda / (2.0 * p.mu + Dim * p.lambda);
  return (s.cwiseProduct(t).sum() - c * s.trace() * t.trace()) / (2.0 * p.mu);
}

}  // namespace elastmix
