#pragma once

#include <Eigen/Dense>

#include "elastmix/assembly.hpp"
#include "elastmix/element.hpp"

namespace elastmix {

/// Member of the global stress space: one coefficient per stress DOF.
template <int Dim>
struct StressField {
  DofMap<Dim> dofs;
  Eigen::VectorXd coeffs;

  explicit StressField(const DofMap<Dim>& map) : dofs(map), coeffs(Eigen::VectorXd::Zero(map.num_stress())) {}
  StressField(const DofMap<Dim>& map, Eigen::VectorXd c) : dofs(map), coeffs(std::move(c)) {
    if (coeffs.size() != dofs.num_stress()) throw InvalidArgument("StressField: coefficient count mismatch");
  }

  LocalStress<Dim> local(const MultiIndex<Dim>& l) const {
    LocalStress<Dim> out{dofs.grid().element_box(l), {}};
    const auto map = dofs.stress_dofs(l);
    for (int a = 0; a < StressLayout<Dim>::size; ++a) out.coeffs[a] = coeffs[map[a]];
    return out;
  }

  SymTensor<Dim> value(const Vec<Dim>& x) const { return local(dofs.grid().locate(x)).value(x); }
  Vec<Dim> divergence(const Vec<Dim>& x) const { return local(dofs.grid().locate(x)).divergence(x); }
};

/// Member of the global displacement space.
template <int Dim>
struct DisplacementField {
  DofMap<Dim> dofs;
  Eigen::VectorXd coeffs;

  explicit DisplacementField(const DofMap<Dim>& map)
      : dofs(map), coeffs(Eigen::VectorXd::Zero(map.num_displacement())) {}
  DisplacementField(const DofMap<Dim>& map, Eigen::VectorXd c) : dofs(map), coeffs(std::move(c)) {
    if (coeffs.size() != dofs.num_displacement()) throw InvalidArgument("DisplacementField: coefficient count mismatch");
  }

  LocalDisplacement<Dim> local(const MultiIndex<Dim>& l) const {
    LocalDisplacement<Dim> out{dofs.grid().element_box(l), {}};
    const auto map = dofs.displacement_dofs(l);
    for (int a = 0; a < DisplacementLayout<Dim>::size; ++a) out.coeffs[a] = coeffs[map[a]];
    return out;
  }

  Vec<Dim> value(const Vec<Dim>& x) const { return local(dofs.grid().locate(x)).value(x); }
};

}  // namespace elastmix
