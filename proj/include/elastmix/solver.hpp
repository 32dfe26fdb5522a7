#pragma once

#include <chrono>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "elastmix/assembly.hpp"
#include "elastmix/fields.hpp"

namespace elastmix {

enum class SolveStrategy { Auto, Direct, Iterative };
enum class SolveStatus { Converged, NotConverged, Singular };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not converged";
    default: return "singular";
  }
}

struct SolveOptions {
  double tol = 1e-11;  ///< on ||K x - [0; F]|| / ||F||
  SolveStrategy strategy = SolveStrategy::Auto;
  std::size_t direct_limit = 200000;  ///< Auto switches to MINRES above this many unknowns
  int max_iterations = 50000;
  int refinement_steps = 3;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Converged;
  double relative_residual = 0.0;
  int iterations = 0;  ///< Krylov iterations, or refinement steps after factorization
  bool factorized = false;
  double wall_time_s = 0.0;
  std::string message;

  bool ok() const { return status == SolveStatus::Converged; }
};

template <int Dim>
struct Solution {
  StressField<Dim> sigma;
  DisplacementField<Dim> u;
  SolveReport report;
};

/// Block-diagonal preconditioner for MINRES with a fixed, externally supplied
/// inverse diagonal: diag(M)^-1 on the stress block and the inverse of the
/// lumped Schur complement diag(B diag(M)^-1 B^T) on the displacement block.
class SaddleDiagonalPreconditioner : public Eigen::DiagonalPreconditioner<double> {
public:
  void set_inverse_diagonal(Eigen::VectorXd d) { preset_ = std::move(d); }

  template <class Mat>
  SaddleDiagonalPreconditioner& analyzePattern(const Mat&) { return *this; }
  template <class Mat>
  SaddleDiagonalPreconditioner& factorize(const Mat& mat) {
    if (preset_.size() != mat.cols()) throw InvalidArgument("SaddleDiagonalPreconditioner: size mismatch");
    m_invdiag = preset_;
    m_isInitialized = true;
    return *this;
  }
  template <class Mat>
  SaddleDiagonalPreconditioner& compute(const Mat& mat) { return factorize(mat); }

private:
  Eigen::VectorXd preset_;
};

template <int Dim>
Eigen::VectorXd saddle_preconditioner_diagonal(const SaddleSystem<Dim>& sys) {
  const int ns = sys.dofs.num_stress(), nv = sys.dofs.num_displacement();
  Eigen::VectorXd inv(ns + nv);
  const Eigen::VectorXd dm = sys.M.diagonal();
  inv.head(ns) = dm.cwiseInverse();
  Eigen::VectorXd schur = Eigen::VectorXd::Zero(nv);
  for (int k = 0; k < sys.B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.B, k); it; ++it) schur[it.row()] += it.value() * it.value() / dm[it.col()];
  inv.tail(nv) = schur.cwiseInverse();
  return inv;
}

/// Solves [[M, B^T], [B, 0]] [sigma; u] = [0; F].
template <int Dim>
Solution<Dim> solve(const SaddleSystem<Dim>& sys, const Eigen::VectorXd& load, const SolveOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw InvalidArgument("solve: tolerance must be positive");
  if (load.size() != sys.dofs.num_displacement()) throw InvalidArgument("solve: load vector has wrong size");
  const auto start = std::chrono::steady_clock::now();
  const int ns = sys.dofs.num_stress();
  const SparseMatrix K = sys.kkt();
  const Eigen::VectorXd rhs = sys.kkt_rhs(load);
  const double fnorm = load.norm();

  SolveReport report;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(K.rows());
  auto residual = [&](const Eigen::VectorXd& y) { return fnorm > 0.0 ? (K * y - rhs).norm() / fnorm : (K * y).norm(); };

  const bool direct = opt.strategy == SolveStrategy::Direct ||
                      (opt.strategy == SolveStrategy::Auto && static_cast<std::size_t>(K.rows()) <= opt.direct_limit);
  if (fnorm == 0.0) {
    report.relative_residual = 0.0;
  } else if (direct) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) {
      report.status = SolveStatus::Singular;
      report.message = "sparse LU factorization failed: " + lu.lastErrorMessage();
    } else {
      report.factorized = true;
      x = lu.solve(rhs);
      report.relative_residual = residual(x);
      for (int step = 0; step < opt.refinement_steps && report.relative_residual > opt.tol; ++step) {
        x += lu.solve(Eigen::VectorXd(rhs - K * x));
        report.relative_residual = residual(x);
        ++report.iterations;
      }
    }
  } else {
    Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, SaddleDiagonalPreconditioner> minres;
    minres.preconditioner().set_inverse_diagonal(saddle_preconditioner_diagonal(sys));
    minres.setMaxIterations(opt.max_iterations);
    // MINRES monitors the preconditioned residual; aim a bit lower and check the true one below.
    minres.setTolerance(opt.tol * 1e-2);
    minres.compute(K);
    x = minres.solve(rhs);
    report.iterations = static_cast<int>(minres.iterations());
    report.relative_residual = residual(x);
  }

  if (report.status != SolveStatus::Singular && !(report.relative_residual <= opt.tol)) {
    report.status = SolveStatus::NotConverged;
    report.message = "relative residual " + std::to_string(report.relative_residual) + " above tolerance";
  }
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {StressField<Dim>(sys.dofs, x.head(ns)), DisplacementField<Dim>(sys.dofs, x.tail(sys.dofs.num_displacement())),
          report};
}

}  // namespace elastmix
