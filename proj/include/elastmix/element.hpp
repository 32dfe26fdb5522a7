#pragma once

#include <array>
#include <span>
#include <string>

#include "elastmix/common.hpp"
#include "elastmix/grid.hpp"
#include "elastmix/material.hpp"
#include "elastmix/quadrature.hpp"

namespace elastmix {

// Local spaces on an n-rectangle K:
//   stress       sigma_ii in P2(x_i), sigma_ij in Q1(x_i, x_j)   (2n^2 + n functions)
//   displacement v_i in P1(x_i)                                   (2n functions)
//
// Local stress DOF order: for each axis i the triple (average over the low
// face perp. to x_i, average over the high face, volume average), then for
// each pair (i, j) in lexicographic order the four (n-2)-face averages at
// the corners (0,0), (1,0), (0,1), (1,1) of the (x_i, x_j) square.
// Local displacement DOF order: (component i, moment m) -> 2 i + m with
// moments {1, s_i}, s_i the element-local coordinate in [0, 1].

enum class StressDofKind { DiagFace, DiagVolume, ShearCorner };

struct StressDofTag {
  StressDofKind kind;
  int i;
  int j;    // == i for diagonal DOFs
  int sub;  // face side (0 low / 1 high), 0 for volume, corner 0..3 for shear
};

template <int Dim>
struct StressLayout {
  static constexpr int num_diag = 3 * Dim;
  static constexpr int num_shear = 4 * num_pairs(Dim);
  static constexpr int size = num_diag + num_shear;
  static_assert(size == 2 * Dim * Dim + Dim);

  /// m = 0 low face, 1 high face, 2 volume.
  static constexpr int diag(int i, int m) { return 3 * i + m; }
  static constexpr int shear(int pair, int corner) { return num_diag + 4 * pair + corner; }

  static StressDofTag tag(int a) {
    if (a < 0 || a >= size) throw InvalidArgument("StressLayout: local index out of range");
    if (a < num_diag) {
      const int i = a / 3, m = a % 3;
      return m < 2 ? StressDofTag{StressDofKind::DiagFace, i, i, m} : StressDofTag{StressDofKind::DiagVolume, i, i, 0};
    }
    const int p = (a - num_diag) / 4, c = (a - num_diag) % 4;
    const auto ij = axis_pairs<Dim>()[p];
    return {StressDofKind::ShearCorner, ij[0], ij[1], c};
  }
};

template <int Dim>
struct DisplacementLayout {
  static constexpr int size = 2 * Dim;
  static constexpr int index(int component, int moment) { return 2 * component + moment; }
};

template <int Dim>
using LocalStressVector = Eigen::Matrix<double, StressLayout<Dim>::size, 1>;
template <int Dim>
using LocalDisplacementVector = Eigen::Matrix<double, DisplacementLayout<Dim>::size, 1>;

// -- 1D and 2D reference functions --------------------------------------------

/// Quadratic on [0,1] dual to (p(0), p(1), mean of p): m = 0, 1, 2.
inline double diag_basis(int m, double s) {
  switch (m) {
    case 0: return 1.0 - 4.0 * s + 3.0 * s * s;
    case 1: return -2.0 * s + 3.0 * s * s;
    default: return 6.0 * s - 6.0 * s * s;
  }
}
inline double diag_basis_derivative(int m, double s) {
  switch (m) {
    case 0: return -4.0 + 6.0 * s;
    case 1: return -2.0 + 6.0 * s;
    default: return 6.0 - 12.0 * s;
  }
}

/// Bilinear nodal functions on the unit square, k = 0..3 counterclockwise
/// from the origin: (0,0), (1,0), (1,1), (0,1).
inline double nodal_basis(int k, double x, double y) {
  switch (k) {
    case 0: return (x - 1.0) * (y - 1.0);
    case 1: return -(x - 0.0) * (y - 1.0);
    case 2: return (x - 0.0) * (y - 0.0);
    default: return -(x - 1.0) * (y - 0.0);
  }
}
inline std::array<double, 2> nodal_basis_gradient(int k, double x, double y) {
  switch (k) {
    case 0: return {y - 1.0, x - 1.0};
    case 1: return {-(y - 1.0), -x};
    case 2: return {y, x};
    default: return {-y, -(x - 1.0)};
  }
}

/// Lexicographic corner (0,0), (1,0), (0,1), (1,1) -> nodal function index.
constexpr std::array<int, 4> corner_to_nodal{0, 1, 3, 2};

// -- shape function evaluation ----------------------------------------------------

/// Values and divergences of all local stress shape functions at one point.
/// Shape function a has a single independent component (i, j) (mirrored to
/// (j, i) when i != j) with scalar value `value[a]`.
template <int Dim>
struct StressShapes {
  std::array<double, StressLayout<Dim>::size> value{};
  std::array<Vec<Dim>, StressLayout<Dim>::size> div{};
};

template <int Dim>
StressShapes<Dim> eval_stress_shapes(const Box<Dim>& box, const Vec<Dim>& x) {
  using L = StressLayout<Dim>;
  const Vec<Dim> s = box.to_reference(x);
  StressShapes<Dim> out;
  for (int i = 0; i < Dim; ++i) {
    const double h = box.size(i);
    for (int m = 0; m < 3; ++m) {
      const int a = L::diag(i, m);
      out.value[a] = diag_basis(m, s[i]);
      out.div[a] = Vec<Dim>::Zero();
      out.div[a][i] = diag_basis_derivative(m, s[i]) / h;
    }
  }
  int p = 0;
  for (auto [i, j] : axis_pairs<Dim>()) {
    for (int c = 0; c < 4; ++c) {
      const int a = L::shear(p, c);
      const int k = corner_to_nodal[c];
      out.value[a] = nodal_basis(k, s[i], s[j]);
      const auto g = nodal_basis_gradient(k, s[i], s[j]);
      out.div[a] = Vec<Dim>::Zero();
      out.div[a][i] = g[1] / box.size(j);  // row i: d/dx_j sigma_ij
      out.div[a][j] = g[0] / box.size(i);  // row j: d/dx_i sigma_ji
    }
    ++p;
  }
  return out;
}

/// Displacement shape functions psi_{i,m} = e_i * {1, s_i}[m] at x.
template <int Dim>
std::array<double, DisplacementLayout<Dim>::size> eval_displacement_shapes(const Box<Dim>& box,
                                                                           const Vec<Dim>& x) {
  const Vec<Dim> s = box.to_reference(x);
  std::array<double, DisplacementLayout<Dim>::size> out{};
  for (int i = 0; i < Dim; ++i) {
    out[DisplacementLayout<Dim>::index(i, 0)] = 1.0;
    out[DisplacementLayout<Dim>::index(i, 1)] = s[i];
  }
  return out;
}

namespace detail {

template <int Dim>
void check_element_box(const Box<Dim>& box) {
  for (int k = 0; k < Dim; ++k)
    if (!(box.size(k) > 0.0)) throw InvalidArgument("element box has zero extent on axis " + std::to_string(k));
}

/// phi_a : phi_b from the scalar values of two shape functions.
template <int Dim>
double shape_contraction(int a, int b, double va, double vb) {
  using L = StressLayout<Dim>;
  const bool da = a < L::num_diag, db = b < L::num_diag;
  if (da && db) return (a / 3 == b / 3) ? va * vb : 0.0;
  if (!da && !db) return ((a - L::num_diag) / 4 == (b - L::num_diag) / 4) ? 2.0 * va * vb : 0.0;
  return 0.0;
}

}  // namespace detail

// -- local polynomials ------------------------------------------------------------

/// A member of Sigma(K), given by its DOF coefficients.
template <int Dim>
struct LocalStress {
  Box<Dim> box;
  LocalStressVector<Dim> coeffs = LocalStressVector<Dim>::Zero();

  SymTensor<Dim> value(const Vec<Dim>& x) const {
    const auto sh = eval_stress_shapes<Dim>(box, x);
    SymTensor<Dim> t = SymTensor<Dim>::Zero();
    for (int a = 0; a < StressLayout<Dim>::size; ++a) {
      const auto tag = StressLayout<Dim>::tag(a);
      t(tag.i, tag.j) += coeffs[a] * sh.value[a];
      if (tag.i != tag.j) t(tag.j, tag.i) += coeffs[a] * sh.value[a];
    }
    return t;
  }

  Vec<Dim> divergence(const Vec<Dim>& x) const {
    const auto sh = eval_stress_shapes<Dim>(box, x);
    Vec<Dim> d = Vec<Dim>::Zero();
    for (int a = 0; a < StressLayout<Dim>::size; ++a) d += coeffs[a] * sh.div[a];
    return d;
  }
};

template <int Dim>
struct LocalDisplacement {
  Box<Dim> box;
  LocalDisplacementVector<Dim> coeffs = LocalDisplacementVector<Dim>::Zero();

  Vec<Dim> value(const Vec<Dim>& x) const {
    const auto sh = eval_displacement_shapes<Dim>(box, x);
    Vec<Dim> v = Vec<Dim>::Zero();
    for (int i = 0; i < Dim; ++i)
      for (int m = 0; m < 2; ++m) v[i] += coeffs[DisplacementLayout<Dim>::index(i, m)] * sh[DisplacementLayout<Dim>::index(i, m)];
    return v;
  }
};

/// Builds the local stress polynomial whose DOFs are `coeffs`.
template <int Dim>
LocalStress<Dim> local_from_dofs(std::span<const double> coeffs, const Box<Dim>& box) {
  if (coeffs.size() != static_cast<std::size_t>(StressLayout<Dim>::size))
    throw InvalidArgument("local_from_dofs: expected " + std::to_string(StressLayout<Dim>::size) +
                          " coefficients, got " + std::to_string(coeffs.size()));
  detail::check_element_box<Dim>(box);
  LocalStress<Dim> out{box, {}};
  for (int a = 0; a < StressLayout<Dim>::size; ++a) out.coeffs[a] = coeffs[a];
  return out;
}

// -- degrees of freedom ----------------------------------------------------------

/// Sub-box of K on which local stress DOF a averages.
template <int Dim>
Box<Dim> dof_support(const Box<Dim>& box, int a) {
  const auto tag = StressLayout<Dim>::tag(a);
  Box<Dim> b = box;
  switch (tag.kind) {
    case StressDofKind::DiagFace:
      b.lo[tag.i] = b.hi[tag.i] = tag.sub == 0 ? box.lo[tag.i] : box.hi[tag.i];
      break;
    case StressDofKind::DiagVolume:
      break;
    case StressDofKind::ShearCorner:
      b.lo[tag.i] = b.hi[tag.i] = (tag.sub & 1) ? box.hi[tag.i] : box.lo[tag.i];
      b.lo[tag.j] = b.hi[tag.j] = (tag.sub & 2) ? box.hi[tag.j] : box.lo[tag.j];
      break;
  }
  return b;
}

/// Applies the local stress DOF functionals to a smooth symmetric field.
/// Averages use the tensor Gauss rule `rule` on each sub-entity; for
/// Dim == 2 the shear functionals are vertex values.
template <int Dim, class Field>
LocalStressVector<Dim> stress_dofs(Field&& field, const Box<Dim>& box, const QuadratureRule& rule = gauss_legendre(5)) {
  detail::check_element_box<Dim>(box);
  LocalStressVector<Dim> out;
  for (int a = 0; a < StressLayout<Dim>::size; ++a) {
    const auto tag = StressLayout<Dim>::tag(a);
    out[a] = average_over<Dim>(dof_support<Dim>(box, a), rule,
                               [&](const Vec<Dim>& x) { return SymTensor<Dim>(field(x))(tag.i, tag.j); });
  }
  return out;
}

// -- local matrices ----------------------------------------------------------------

inline const QuadratureRule& assembly_rule() {
  static const QuadratureRule rule = gauss_legendre(3);
  return rule;
}

/// (A phi_a, phi_b)_K, exact (3-point Gauss per axis).
template <int Dim>
Eigen::Matrix<double, StressLayout<Dim>::size, StressLayout<Dim>::size> local_compliance_matrix(
    const Box<Dim>& box, const LameParams& material) {
  constexpr int N = StressLayout<Dim>::size;
  detail::check_element_box<Dim>(box);
  material.validate(Dim);
  const double c = material.lambda / (2.0 * material.mu + Dim * material.lambda);
  const double vol = box.volume();
  Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
  for_each_quadrature_point<Dim>(box, assembly_rule(), [&](const Vec<Dim>& x, double w) {
    const auto sh = eval_stress_shapes<Dim>(box, x);
    std::array<double, N> tr{};
    for (int a = 0; a < StressLayout<Dim>::num_diag; ++a) tr[a] = sh.value[a];
    for (int a = 0; a < N; ++a)
      for (int b = 0; b <= a; ++b) {
        const double ab = detail::shape_contraction<Dim>(a, b, sh.value[a], sh.value[b]) - c * tr[a] * tr[b];
        m(a, b) += w * vol * ab / (2.0 * material.mu);
      }
  });
  m.template triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m;
}

/// L2 Gram matrix (phi_a, phi_b)_K with the Frobenius inner product.
template <int Dim>
Eigen::Matrix<double, StressLayout<Dim>::size, StressLayout<Dim>::size> local_stress_gram(const Box<Dim>& box) {
  return local_compliance_matrix<Dim>(box, LameParams{0.5, 0.0});
}

/// (div phi_a, div phi_b)_K.
template <int Dim>
Eigen::Matrix<double, StressLayout<Dim>::size, StressLayout<Dim>::size> local_divdiv_matrix(const Box<Dim>& box) {
  constexpr int N = StressLayout<Dim>::size;
  detail::check_element_box<Dim>(box);
  const double vol = box.volume();
  Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
  for_each_quadrature_point<Dim>(box, assembly_rule(), [&](const Vec<Dim>& x, double w) {
    const auto sh = eval_stress_shapes<Dim>(box, x);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) m(a, b) += w * vol * sh.div[a].dot(sh.div[b]);
  });
  return m;
}

/// (div phi_a, psi_b)_K as a (2n) x (2n^2+n) matrix.
template <int Dim>
Eigen::Matrix<double, DisplacementLayout<Dim>::size, StressLayout<Dim>::size> local_div_matrix(const Box<Dim>& box) {
  constexpr int N = StressLayout<Dim>::size;
  constexpr int V = DisplacementLayout<Dim>::size;
  detail::check_element_box<Dim>(box);
  const double vol = box.volume();
  Eigen::Matrix<double, V, N> m = Eigen::Matrix<double, V, N>::Zero();
  for_each_quadrature_point<Dim>(box, assembly_rule(), [&](const Vec<Dim>& x, double w) {
    const auto sh = eval_stress_shapes<Dim>(box, x);
    const auto psi = eval_displacement_shapes<Dim>(box, x);
    for (int i = 0; i < Dim; ++i)
      for (int mo = 0; mo < 2; ++mo) {
        const int b = DisplacementLayout<Dim>::index(i, mo);
        for (int a = 0; a < N; ++a) m(b, a) += w * vol * sh.div[a][i] * psi[b];
      }
  });
  return m;
}

/// (psi_a, psi_b)_K.
template <int Dim>
Eigen::Matrix<double, DisplacementLayout<Dim>::size, DisplacementLayout<Dim>::size> local_displacement_mass(
    const Box<Dim>& box) {
  constexpr int V = DisplacementLayout<Dim>::size;
  detail::check_element_box<Dim>(box);
  Eigen::Matrix<double, V, V> m = Eigen::Matrix<double, V, V>::Zero();
  const double vol = box.volume();
  for (int i = 0; i < Dim; ++i) {
    const int a0 = DisplacementLayout<Dim>::index(i, 0), a1 = DisplacementLayout<Dim>::index(i, 1);
    m(a0, a0) = vol;
    m(a0, a1) = m(a1, a0) = vol / 2.0;
    m(a1, a1) = vol / 3.0;
  }
  return m;
}

}  // namespace elastmix
