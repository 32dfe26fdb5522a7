#pragma once

#include "elastmix/assembly.hpp"
#include "elastmix/fields.hpp"
#include "elastmix/quadrature.hpp"

namespace elastmix {

/// Interpolation of a continuous symmetric tensor field into the stress space.
///
/// sigma_ii: averages over every face perpendicular to x_i and over every
/// element. sigma_ij: averages over every (n-2)-face perpendicular to x_i and
/// x_j; in 2D these faces are vertices and the average is the point value.
/// Each shared entity is visited once, so the result is conforming.
template <int Dim, class Field>
StressField<Dim> interp_stress(const DofMap<Dim>& dofs, Field&& sigma, int npts = 5) {
  const QuadratureRule rule = gauss_legendre(npts);
  const auto& grid = dofs.grid();
  StressField<Dim> out(dofs);
  auto component = [&](int i, int j) {
    return [&, i, j](const Vec<Dim>& x) { return SymTensor<Dim>(sigma(x))(i, j); };
  };
  for (int i = 0; i < Dim; ++i) {
    parallel::for_chunks(grid.num_faces(i), [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t f = b; f < e; ++f) {
        const auto face = grid.face_from_flat(i, f);
        out.coeffs[dofs.face_dof(face)] = average_over<Dim>(grid.face_box(face), rule, component(i, i));
      }
    });
    parallel::for_chunks(grid.num_elements(), [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k)
        out.coeffs[dofs.volume_dof(k, i)] =
            average_over<Dim>(grid.element_box(grid.element_index(k)), rule, component(i, i));
    });
  }
  for (auto [i, j] : axis_pairs<Dim>()) {
    parallel::for_chunks(grid.num_ridges(i, j), [&, i = i, j = j](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        const auto ridge = grid.ridge_from_flat(i, j, r);
        out.coeffs[dofs.ridge_dof(ridge)] = average_over<Dim>(grid.ridge_box(ridge), rule, component(i, j));
      }
    });
  }
  return out;
}

/// Elementwise L2 projection onto the displacement space: per element and
/// component i, the best approximation of u_i in span{1, x_i}.
template <int Dim, class Field>
DisplacementField<Dim> project_displacement(const DofMap<Dim>& dofs, Field&& u, int npts = 5) {
  const QuadratureRule rule = gauss_legendre(npts);
  const auto& grid = dofs.grid();
  DisplacementField<Dim> out(dofs);
  parallel::for_chunks(grid.num_elements(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto l = grid.element_index(k);
      const Box<Dim> box = grid.element_box(l);
      // Moments (mean of u_i, mean of u_i s_i).
      Eigen::Matrix<double, Dim, 2> mom = Eigen::Matrix<double, Dim, 2>::Zero();
      for_each_quadrature_point<Dim>(box, rule, [&](const Vec<Dim>& x, double w) {
        const Vec<Dim> ux = u(x);
        const Vec<Dim> s = box.to_reference(x);
        mom.col(0) += w * ux;
        mom.col(1) += w * ux.cwiseProduct(s);
      });
      // Inverse of the Gram matrix [[1, 1/2], [1/2, 1/3]] of {1, s}.
      for (int i = 0; i < Dim; ++i) {
        out.coeffs[dofs.displacement_dof(k, i, 0)] = 4.0 * mom(i, 0) - 6.0 * mom(i, 1);
        out.coeffs[dofs.displacement_dof(k, i, 1)] = -6.0 * mom(i, 0) + 12.0 * mom(i, 1);
      }
    }
  });
  return out;
}

}  // namespace elastmix
