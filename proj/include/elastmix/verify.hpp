#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "elastmix/assembly.hpp"
#include "elastmix/fields.hpp"
#include "elastmix/manufactured.hpp"
#include "elastmix/quadrature.hpp"

namespace elastmix {

/// Error and superclose norms for one mesh level. Unset entries are NaN.
struct ErrorRecord {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  double h = unset;
  double err_sigma_l2 = unset;    ///< ||sigma - sigma_h||_0
  double err_sigma_div = unset;   ///< ||div(sigma - sigma_h)||_0
  double err_sigma_hdiv = unset;  ///< ||sigma - sigma_h||_H(div)
  double err_u_l2 = unset;        ///< ||u - u_h||_0
  double super_sigma_l2 = unset;  ///< ||Pi_h sigma - sigma_h||_0
  double super_sigma_div = unset;
  double super_sigma_hdiv = unset;
  double super_u_l2 = unset;  ///< ||P_h u - u_h||_0
  int stress_dofs = 0;
  int disp_dofs = 0;
};

/// Continuous-vs-discrete errors by elementwise Gauss quadrature; div sigma
/// is taken as the exact load f.
template <int Dim>
ErrorRecord error_norms(const ExactSolution<Dim>& exact, const StressField<Dim>& sigma_h,
                        const DisplacementField<Dim>& u_h, int npts = 5) {
  if (!(sigma_h.dofs == u_h.dofs)) throw InvalidArgument("error_norms: fields live on different grids");
  const auto& grid = sigma_h.dofs.grid();
  const QuadratureRule rule = gauss_legendre(npts);
  const std::size_t ne = grid.num_elements();
  std::vector<double> e_sig(ne), e_div(ne), e_u(ne);
  parallel::for_chunks(ne, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto l = grid.element_index(k);
      const auto sl = sigma_h.local(l);
      const auto ul = u_h.local(l);
      const double vol = sl.box.volume();
      double s = 0.0, d = 0.0, u = 0.0;
      for_each_quadrature_point<Dim>(sl.box, rule, [&](const Vec<Dim>& x, double w) {
        s += w * (exact.sigma(x) - sl.value(x)).squaredNorm();
        d += w * (exact.f(x) - sl.divergence(x)).squaredNorm();
        u += w * (exact.u(x) - ul.value(x)).squaredNorm();
      });
      e_sig[k] = vol * s;
      e_div[k] = vol * d;
      e_u[k] = vol * u;
    }
  });
  ErrorRecord r;
  r.h = grid.max_spacing();
  r.stress_dofs = sigma_h.dofs.num_stress();
  r.disp_dofs = sigma_h.dofs.num_displacement();
  const double s2 = pairwise_sum(e_sig), d2 = pairwise_sum(e_div);
  r.err_sigma_l2 = std::sqrt(s2);
  r.err_sigma_div = std::sqrt(d2);
  r.err_sigma_hdiv = std::sqrt(s2 + d2);
  r.err_u_l2 = std::sqrt(pairwise_sum(e_u));
  return r;
}

/// Discrete-vs-discrete norms, exact through the local Gram matrices.
/// Fills the super_* entries of `into`.
template <int Dim>
void superclose_norms(const StressField<Dim>& sigma_h, const StressField<Dim>& pi_sigma,
                      const DisplacementField<Dim>& u_h, const DisplacementField<Dim>& ph_u, ErrorRecord& into) {
  if (!(sigma_h.dofs == pi_sigma.dofs) || !(sigma_h.dofs == u_h.dofs) || !(u_h.dofs == ph_u.dofs))
    throw InvalidArgument("superclose_norms: fields live on different dof maps");
  const auto& dofs = sigma_h.dofs;
  const auto& grid = dofs.grid();
  const std::size_t ne = grid.num_elements();
  // Every element has the same size, so one set of local matrices serves all.
  const Box<Dim> box0 = grid.element_box(grid.element_index(0));
  const auto gram = local_stress_gram<Dim>(box0);
  const auto divdiv = local_divdiv_matrix<Dim>(box0);
  const auto mass = local_displacement_mass<Dim>(box0);
  std::vector<double> e_sig(ne), e_div(ne), e_u(ne);
  parallel::for_chunks(ne, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto l = grid.element_index(k);
      const auto sm = dofs.stress_dofs(l);
      const auto vm = dofs.displacement_dofs(l);
      LocalStressVector<Dim> ds;
      for (int a = 0; a < StressLayout<Dim>::size; ++a) ds[a] = sigma_h.coeffs[sm[a]] - pi_sigma.coeffs[sm[a]];
      LocalDisplacementVector<Dim> du;
      for (int a = 0; a < DisplacementLayout<Dim>::size; ++a) du[a] = u_h.coeffs[vm[a]] - ph_u.coeffs[vm[a]];
      e_sig[k] = ds.dot(gram * ds);
      e_div[k] = ds.dot(divdiv * ds);
      e_u[k] = du.dot(mass * du);
    }
  });
  const double s2 = std::max(0.0, pairwise_sum(e_sig)), d2 = std::max(0.0, pairwise_sum(e_div));
  into.super_sigma_l2 = std::sqrt(s2);
  into.super_sigma_div = std::sqrt(d2);
  into.super_sigma_hdiv = std::sqrt(s2 + d2);
  into.super_u_l2 = std::sqrt(std::max(0.0, pairwise_sum(e_u)));
}

template <int Dim>
ErrorRecord superclose_norms(const StressField<Dim>& sigma_h, const StressField<Dim>& pi_sigma,
                             const DisplacementField<Dim>& u_h, const DisplacementField<Dim>& ph_u) {
  ErrorRecord r;
  r.h = sigma_h.dofs.grid().max_spacing();
  r.stress_dofs = sigma_h.dofs.num_stress();
  r.disp_dofs = sigma_h.dofs.num_displacement();
  superclose_norms<Dim>(sigma_h, pi_sigma, u_h, ph_u, r);
  return r;
}

/// Least-squares slope of log(error) against log(h).
inline double fit_rate(std::span<const double> hs, std::span<const double> errors) {
  if (hs.size() != errors.size()) throw InvalidArgument("fit_rate: size mismatch");
  if (hs.size() < 3) throw InvalidArgument("fit_rate: need at least 3 (h, error) pairs");
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (!(hs[k] > 0.0) || !(errors[k] > 0.0)) throw InvalidArgument("fit_rate: values must be positive");
    if (k > 0 && !(hs[k] < hs[k - 1])) throw InvalidArgument("fit_rate: h must be strictly decreasing");
  }
  const double n = static_cast<double>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double x = std::log(hs[k]), y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// -- stability probes -------------------------------------------------------------

struct ProbeOptions {
  int max_dofs = 3000;  ///< dense eigensolves above this are refused
};

namespace detail {

template <int Dim>
void check_probe_budget(const DofMap<Dim>& dofs, const ProbeOptions& opt) {
  if (dofs.num_total() > opt.max_dofs)
    throw InvalidArgument("stability probe: " + std::to_string(dofs.num_total()) + " unknowns exceed the budget of " +
                          std::to_string(opt.max_dofs));
}

}  // namespace detail

/// Discrete inf-sup constant
///   beta_h = min_v sup_tau (div tau, v) / (||tau||_H(div) ||v||_0)
/// as the square root of the smallest eigenvalue of B S^-1 B^T x = beta^2 M_v x,
/// with S the H(div) Gram matrix of the stress space.
template <int Dim>
double infsup_probe(const TensorGrid<Dim>& grid, const LameParams& material, const ProbeOptions& opt = {}) {
  const auto sys = assemble<Dim>(grid, material);
  detail::check_probe_budget<Dim>(sys.dofs, opt);
  const Eigen::MatrixXd S = Eigen::MatrixXd(assemble_stress_gram<Dim>(sys.dofs)) + Eigen::MatrixXd(assemble_divdiv<Dim>(sys.dofs));
  const Eigen::MatrixXd B(sys.B);
  const Eigen::MatrixXd Mv(assemble_displacement_mass<Dim>(sys.dofs));
  const Eigen::LLT<Eigen::MatrixXd> chol(S);
  if (chol.info() != Eigen::Success) throw NumericalError("infsup_probe: H(div) Gram matrix is not positive definite");
  const Eigen::MatrixXd schur = B * chol.solve(B.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (schur + schur.transpose()), Mv,
                                                                Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("infsup_probe: eigensolver failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
}

struct KernelProbe {
  double alpha = 0.0;      ///< min over ker B of (A tau, tau) / ||tau||^2_H(div)
  int kernel_dim = 0;
  double max_div_ratio = 0.0;  ///< max over kernel basis of ||div tau||_0 / ||tau||_0
};

/// Coercivity of the compliance form on the discrete divergence-free space.
template <int Dim>
KernelProbe kernel_ellipticity_probe(const TensorGrid<Dim>& grid, const LameParams& material,
                                     const ProbeOptions& opt = {}) {
  const auto sys = assemble<Dim>(grid, material);
  detail::check_probe_budget<Dim>(sys.dofs, opt);
  const Eigen::MatrixXd B(sys.B);
  const Eigen::MatrixXd G(assemble_stress_gram<Dim>(sys.dofs));
  const Eigen::MatrixXd D(assemble_divdiv<Dim>(sys.dofs));
  const Eigen::MatrixXd MA(sys.M);

  // Orthonormal null space of B from the symmetric eigenproblem of B^T B. B has
  // full row rank (inf-sup), so the kernel has dimension #stress - #displacement.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> btb(B.transpose() * B);
  const int dim = sys.dofs.num_stress() - sys.dofs.num_displacement();
  const double top = btb.eigenvalues().maxCoeff();
  if (dim < 0 || (dim > 0 && btb.eigenvalues()[dim - 1] > 1e-12 * top) ||
      (dim < btb.eigenvalues().size() && btb.eigenvalues()[dim] <= 1e-12 * top))
    throw NumericalError("kernel_ellipticity_probe: divergence operator is rank deficient");
  KernelProbe out;
  out.kernel_dim = dim;
  if (dim == 0) return out;
  const Eigen::MatrixXd Z = btb.eigenvectors().leftCols(dim);

  const Eigen::MatrixXd zg = Z.transpose() * G * Z;
  const Eigen::MatrixXd zd = Z.transpose() * D * Z;
  const Eigen::MatrixXd za = Z.transpose() * MA * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (za + za.transpose()),
                                                                0.5 * (zg + zd + (zg + zd).transpose()),
                                                                Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("kernel_ellipticity_probe: eigensolver failed");
  out.alpha = eig.eigenvalues().minCoeff();
  for (int c = 0; c < dim; ++c)
    out.max_div_ratio = std::max(out.max_div_ratio, std::sqrt(std::max(0.0, zd(c, c)) / zg(c, c)));
  return out;
}

}  // namespace elastmix
