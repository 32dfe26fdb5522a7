// Solve the 2D sine problem on one mesh and report the errors.
//
//   sample_single_solve [N]

#include <cstdio>
#include <cstdlib>

#include "elastmix/elastmix.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 16;
  if (n < 1) {
    std::fprintf(stderr, "usage: %s [N >= 1]\n", argv[0]);
    return 2;
  }

  const elastmix::LameParams material{0.5, 1.0};
  const auto exact = elastmix::sine_solution<2>(material);
  const auto grid = elastmix::TensorGrid<2>::unit(n);
  const auto sys = elastmix::assemble<2>(grid, material);
  const Eigen::VectorXd load = elastmix::assemble_load<2>(grid, exact.f, sys.dofs);

  const auto sol = elastmix::solve<2>(sys, load);
  if (!sol.report.ok()) {
    std::fprintf(stderr, "solve failed: %s\n", sol.report.message.c_str());
    return 1;
  }

  auto rec = elastmix::error_norms<2>(exact, sol.sigma, sol.u);
  elastmix::superclose_norms<2>(sol.sigma, elastmix::interp_stress<2>(sys.dofs, exact.sigma), sol.u,
                                elastmix::project_displacement<2>(sys.dofs, exact.u), rec);

  std::printf("N = %d, %d stress + %d displacement unknowns, residual %.2e\n", n, rec.stress_dofs, rec.disp_dofs,
              sol.report.relative_residual);
  std::printf("||sigma - sigma_h||_H(div)    = %.6e\n", rec.err_sigma_hdiv);
  std::printf("||u - u_h||_0                 = %.6e\n", rec.err_u_l2);
  std::printf("||Pi_h sigma - sigma_h||_H(div) = %.6e\n", rec.super_sigma_hdiv);
  std::printf("||P_h u - u_h||_0             = %.6e\n", rec.super_u_l2);
  std::printf("sigma_h(0.3, 0.7) = [%g %g; %g %g]\n", sol.sigma.value({0.3, 0.7})(0, 0),
              sol.sigma.value({0.3, 0.7})(0, 1), sol.sigma.value({0.3, 0.7})(1, 0), sol.sigma.value({0.3, 0.7})(1, 1));
  return 0;
}
