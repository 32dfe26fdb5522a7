#pragma once

#include <array>
#include <cstdio>
#include <ostream>
#include <vector>

#include <Eigen/Sparse>

#include "elastmix/common.hpp"
#include "elastmix/element.hpp"
#include "elastmix/grid.hpp"
#include "elastmix/material.hpp"
#include "elastmix/quadrature.hpp"

namespace elastmix {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Global numbering of the discrete spaces.
///
/// Stress unknowns come first: for each axis i the face DOFs of sigma_ii
/// (faces perpendicular to x_i, flattened) followed by its volume DOFs (one
/// per element), then for each pair (i, j) the (n-2)-face DOFs of sigma_ij.
/// Displacement unknowns are numbered separately from 0, element-major, with
/// the local order of DisplacementLayout. A shared entity owns exactly one
/// index, which is what makes the stress space H(div)-conforming.
template <int Dim>
class DofMap {
public:
  using Layout = StressLayout<Dim>;

  explicit DofMap(const TensorGrid<Dim>& grid) : grid_(grid) {
    int next = 0;
    for (int i = 0; i < Dim; ++i) {
      face_offset_[i] = next;
      next += static_cast<int>(grid_.num_faces(i));
      volume_offset_[i] = next;
      next += static_cast<int>(grid_.num_elements());
    }
    int p = 0;
    for (auto [i, j] : axis_pairs<Dim>()) {
      shear_offset_[p++] = next;
      next += static_cast<int>(grid_.num_ridges(i, j));
    }
    num_stress_ = next;
    num_displacement_ = static_cast<int>(grid_.num_elements()) * DisplacementLayout<Dim>::size;
  }

  const TensorGrid<Dim>& grid() const { return grid_; }
  int num_stress() const { return num_stress_; }
  int num_displacement() const { return num_displacement_; }
  int num_total() const { return num_stress_ + num_displacement_; }

  bool operator==(const DofMap& other) const { return grid_ == other.grid_; }

  int face_dof(const FaceId<Dim>& f) const {
    return face_offset_[f.axis] + static_cast<int>(grid_.face_flat(f));
  }
  int volume_dof(std::size_t element, int axis) const {
    return volume_offset_[axis] + static_cast<int>(element);
  }
  int ridge_dof(const RidgeId<Dim>& r) const {
    return shear_offset_[pair_index(Dim, r.i, r.j)] + static_cast<int>(grid_.ridge_flat(r));
  }
  int displacement_dof(std::size_t element, int component, int moment) const {
    return static_cast<int>(element) * DisplacementLayout<Dim>::size + DisplacementLayout<Dim>::index(component, moment);
  }

  /// Local-to-global stress map of an element, in StressLayout order.
  std::array<int, Layout::size> stress_dofs(const MultiIndex<Dim>& l) const {
    std::array<int, Layout::size> out{};
    const std::size_t e = grid_.element_flat(l);
    const auto faces = grid_.element_faces(l);
    for (int i = 0; i < Dim; ++i) {
      out[Layout::diag(i, 0)] = face_dof(faces[2 * i]);
      out[Layout::diag(i, 1)] = face_dof(faces[2 * i + 1]);
      out[Layout::diag(i, 2)] = volume_dof(e, i);
    }
    const auto ridges = grid_.element_ridges(l);
    for (int p = 0; p < num_pairs(Dim); ++p)
      for (int c = 0; c < 4; ++c) out[Layout::shear(p, c)] = ridge_dof(ridges[4 * p + c]);
    return out;
  }

  std::array<int, DisplacementLayout<Dim>::size> displacement_dofs(const MultiIndex<Dim>& l) const {
    std::array<int, DisplacementLayout<Dim>::size> out{};
    const std::size_t e = grid_.element_flat(l);
    for (int a = 0; a < DisplacementLayout<Dim>::size; ++a)
      out[a] = static_cast<int>(e) * DisplacementLayout<Dim>::size + a;
    return out;
  }

  /// Closed-form stress count: sum_i [faces perp. x_i + elements] + sum_{i<j} ridges(i, j).
  static std::size_t expected_num_stress(const TensorGrid<Dim>& g) {
    std::size_t n = 0;
    for (int i = 0; i < Dim; ++i) n += g.num_faces(i) + g.num_elements();
    for (auto [i, j] : axis_pairs<Dim>()) n += g.num_ridges(i, j);
    return n;
  }

private:
  TensorGrid<Dim> grid_;
  std::array<int, Dim> face_offset_{};
  std::array<int, Dim> volume_offset_{};
  std::array<int, num_pairs(Dim)> shear_offset_{};
  int num_stress_ = 0;
  int num_displacement_ = 0;
};

template <int Dim>
DofMap<Dim> build_dof_map(const TensorGrid<Dim>& grid) {
  return DofMap<Dim>(grid);
}

/// The discrete saddle-point operator [[M, B^T], [B, 0]].
template <int Dim>
struct SaddleSystem {
  DofMap<Dim> dofs;
  LameParams material;
  SparseMatrix M;  ///< (A sigma, tau), stress x stress
  SparseMatrix B;  ///< (div tau, v), displacement x stress

  /// Full symmetric indefinite matrix, stress unknowns first.
  SparseMatrix kkt() const {
    const int ns = dofs.num_stress(), nt = dofs.num_total();
    std::vector<Triplet> t;
    t.reserve(M.nonZeros() + 2 * B.nonZeros());
    for (int k = 0; k < M.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(M, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
        t.emplace_back(ns + it.row(), it.col(), it.value());
        t.emplace_back(it.col(), ns + it.row(), it.value());
      }
    SparseMatrix K(nt, nt);
    K.setFromTriplets(t.begin(), t.end());
    return K;
  }

  /// Right-hand side [0; F] of the full system.
  Eigen::VectorXd kkt_rhs(const Eigen::VectorXd& load) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.num_total());
    rhs.tail(dofs.num_displacement()) = load;
    return rhs;
  }
};

namespace detail {

/// Element-loop scatter of a local matrix into a global sparse matrix.
/// `local(box)` returns the element matrix; `rows(l)` / `cols(l)` the maps.
template <int Dim, class LocalFn, class RowMap, class ColMap>
SparseMatrix scatter(const TensorGrid<Dim>& grid, int nrows, int ncols, LocalFn&& local, RowMap&& rows, ColMap&& cols) {
  const std::size_t ne = grid.num_elements();
  std::vector<std::vector<Triplet>> chunks(parallel::num_chunks(ne));
  parallel::for_chunks(ne, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& out = chunks[c];
    for (std::size_t e = begin; e < end; ++e) {
      const auto l = grid.element_index(e);
      const auto m = local(grid.element_box(l));
      const auto r = rows(l);
      const auto cc = cols(l);
      for (int a = 0; a < m.rows(); ++a)
        for (int b = 0; b < m.cols(); ++b)
          if (m(a, b) != 0.0) out.emplace_back(r[a], cc[b], m(a, b));
    }
  });
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.size();
  all.reserve(total);
  for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  SparseMatrix out(nrows, ncols);
  out.setFromTriplets(all.begin(), all.end());
  return out;
}

}  // namespace detail

/// Assembles M and B; no boundary conditions are imposed (u = 0 on the
/// boundary is natural in this formulation).
template <int Dim>
SaddleSystem<Dim> assemble(const TensorGrid<Dim>& grid, const LameParams& material) {
  material.validate(Dim);
  DofMap<Dim> dofs(grid);
  const int ns = dofs.num_stress(), nv = dofs.num_displacement();
  auto smap = [&](const MultiIndex<Dim>& l) { return dofs.stress_dofs(l); };
  auto vmap = [&](const MultiIndex<Dim>& l) { return dofs.displacement_dofs(l); };
  SaddleSystem<Dim> sys{dofs, material, {}, {}};
  sys.M = detail::scatter<Dim>(grid, ns, ns, [&](const Box<Dim>& b) { return local_compliance_matrix<Dim>(b, material); }, smap, smap);
  sys.B = detail::scatter<Dim>(grid, nv, ns, [](const Box<Dim>& b) { return local_div_matrix<Dim>(b); }, vmap, smap);
  return sys;
}

/// Global L2 Gram matrix of the stress space (Frobenius inner product).
template <int Dim>
SparseMatrix assemble_stress_gram(const DofMap<Dim>& dofs) {
  auto smap = [&](const MultiIndex<Dim>& l) { return dofs.stress_dofs(l); };
  return detail::scatter<Dim>(dofs.grid(), dofs.num_stress(), dofs.num_stress(),
                              [](const Box<Dim>& b) { return local_stress_gram<Dim>(b); }, smap, smap);
}

/// Global (div sigma, div tau) matrix.
template <int Dim>
SparseMatrix assemble_divdiv(const DofMap<Dim>& dofs) {
  auto smap = [&](const MultiIndex<Dim>& l) { return dofs.stress_dofs(l); };
  return detail::scatter<Dim>(dofs.grid(), dofs.num_stress(), dofs.num_stress(),
                              [](const Box<Dim>& b) { return local_divdiv_matrix<Dim>(b); }, smap, smap);
}

/// Global L2 mass matrix of the displacement space (block diagonal).
template <int Dim>
SparseMatrix assemble_displacement_mass(const DofMap<Dim>& dofs) {
  auto vmap = [&](const MultiIndex<Dim>& l) { return dofs.displacement_dofs(l); };
  return detail::scatter<Dim>(dofs.grid(), dofs.num_displacement(), dofs.num_displacement(),
                              [](const Box<Dim>& b) { return local_displacement_mass<Dim>(b); }, vmap, vmap);
}

/// F_b = (f, psi_b) with an npts-per-axis Gauss rule.
template <int Dim, class Load>
Eigen::VectorXd assemble_load(const TensorGrid<Dim>& grid, Load&& f, const DofMap<Dim>& dofs, int npts = 5) {
  const QuadratureRule rule = gauss_legendre(npts);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs.num_displacement());
  parallel::for_chunks(grid.num_elements(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const auto l = grid.element_index(e);
      const Box<Dim> box = grid.element_box(l);
      const double vol = box.volume();
      const auto map = dofs.displacement_dofs(l);
      for_each_quadrature_point<Dim>(box, rule, [&](const Vec<Dim>& x, double w) {
        const Vec<Dim> fx = f(x);
        const auto psi = eval_displacement_shapes<Dim>(box, x);
        for (int i = 0; i < Dim; ++i)
          for (int m = 0; m < 2; ++m) {
            const int a = DisplacementLayout<Dim>::index(i, m);
            F[map[a]] += w * vol * fx[i] * psi[a];
          }
      });
    }
  });
  return F;
}

/// Matrix Market coordinate (general, real) export.
inline void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  char buf[64];
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
}

}  // namespace elastmix
