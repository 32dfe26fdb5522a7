// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "elastmix/elastmix.hpp"

using namespace elastmix;

namespace {

std::mt19937_64 gen(7);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

template <int Dim>
Box<Dim> random_box() {
  Box<Dim> b;
  for (int k = 0; k < Dim; ++k) {
    b.lo[k] = uniform(-1.0, 1.0);
    b.hi[k] = b.lo[k] + uniform(0.2, 2.0);
  }
  return b;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (t > time_limit_s) {
    out.pass = false;
    out.detail += "; exceeded time limit";
  }
  if (!out.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s, limit %.0f s]\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), t,
              time_limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Random symmetric tensor field whose entries are full quadratics.
template <int Dim>
struct QuadraticField {
  struct Poly {
    double c0;
    Vec<Dim> c1;
    SymTensor<Dim> c2;
    double operator()(const Vec<Dim>& x) const { return c0 + c1.dot(x) + x.dot(c2 * x); }
    Vec<Dim> grad(const Vec<Dim>& x) const { return c1 + 2.0 * c2 * x; }
  };
  std::array<std::array<Poly, Dim>, Dim> e;

  static QuadraticField random() {
    QuadraticField f;
    for (int i = 0; i < Dim; ++i)
      for (int j = i; j < Dim; ++j) {
        Poly p{uniform(-1, 1), Vec<Dim>::Zero(), SymTensor<Dim>::Zero()};
        for (int a = 0; a < Dim; ++a) {
          p.c1[a] = uniform(-1, 1);
          for (int b = a; b < Dim; ++b) p.c2(a, b) = p.c2(b, a) = uniform(-1, 1);
        }
        f.e[i][j] = f.e[j][i] = p;
      }
    return f;
  }
  SymTensor<Dim> operator()(const Vec<Dim>& x) const {
    SymTensor<Dim> t;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) t(i, j) = e[i][j](x);
    return t;
  }
  Vec<Dim> divergence(const Vec<Dim>& x) const {
    Vec<Dim> d = Vec<Dim>::Zero();
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) d[i] += e[i][j].grad(x)[j];
    return d;
  }
};

template <int Dim>
LocalStress<Dim> local_interpolant(const std::function<SymTensor<Dim>(const Vec<Dim>&)>& f, const Box<Dim>& box) {
  const auto c = stress_dofs<Dim>(f, box);
  return local_from_dofs<Dim>(std::span<const double>(c.data(), c.size()), box);
}

template <int Dim>
double divergence_moment_defect(int trials) {
  double worst = 0.0;
  const auto rule = gauss_legendre(3);
  for (int t = 0; t < trials; ++t) {
    const auto box = random_box<Dim>();
    const auto sigma = QuadraticField<Dim>::random();
    const auto pi = local_interpolant<Dim>(sigma, box);
    LocalDisplacementVector<Dim> m = LocalDisplacementVector<Dim>::Zero(), scale = m;
    for_each_quadrature_point<Dim>(box, rule, [&](const Vec<Dim>& x, double w) {
      const auto psi = eval_displacement_shapes<Dim>(box, x);
      const Vec<Dim> ds = sigma.divergence(x);
      const Vec<Dim> d = ds - pi.divergence(x);
      for (int i = 0; i < Dim; ++i)
        for (int k = 0; k < 2; ++k) {
          const int b = DisplacementLayout<Dim>::index(i, k);
          m[b] += w * box.volume() * d[i] * psi[b];
          scale[b] += w * box.volume() * std::abs(ds[i] * psi[b]);
        }
    });
    worst = std::max(worst, m.cwiseAbs().maxCoeff() / std::max(1.0, scale.maxCoeff()));
  }
  return worst;
}

template <int Dim>
double shear_defect(int trials) {
  double worst = 0.0;
  const auto rule = gauss_legendre(3);
  for (int t = 0; t < trials; ++t) {
    const auto box = random_box<Dim>();
    std::vector<std::pair<double, Vec<Dim>>> lin(num_pairs(Dim));
    for (auto& [a, g] : lin) {
      a = uniform(-1, 1);
      for (int k = 0; k < Dim; ++k) g[k] = uniform(-1, 1);
    }
    auto sigma = [&](const Vec<Dim>& x) {
      SymTensor<Dim> s = SymTensor<Dim>::Zero();
      int p = 0;
      for (auto [i, j] : axis_pairs<Dim>()) {
        s(i, j) = s(j, i) = lin[p].first + lin[p].second.dot(x);
        ++p;
      }
      return s;
    };
    const auto pi = local_interpolant<Dim>(sigma, box);
    int p = 0;
    for (auto [i, j] : axis_pairs<Dim>()) {
      double ip[4] = {0, 0, 0, 0};
      for_each_quadrature_point<Dim>(box, rule, [&](const Vec<Dim>& x, double w) {
        const Vec<Dim> s = box.to_reference(x);
        const double diff = sigma(x)(i, j) - pi.value(x)(i, j);
        const double tau[4] = {1.0, s[i], s[j], s[i] * s[j]};
        for (int k = 0; k < 4; ++k) ip[k] += w * box.volume() * diff * tau[k];
      });
      for (double v : ip) worst = std::max(worst, std::abs(v) / (1.0 + lin[p].second.norm()));
      ++p;
    }
  }
  return worst;
}

template <int Dim>
double kernel_inclusion_residual() {
  const auto box = random_box<Dim>();
  const auto B = local_div_matrix<Dim>(box);
  const auto Mv = local_displacement_mass<Dim>(box);
  double worst = 0.0;
  for (int a = 0; a < StressLayout<Dim>::size; ++a) {
    const LocalDisplacement<Dim> proj{box, Mv.ldlt().solve(B.col(a))};
    for (int t = 0; t < 20; ++t) {
      Vec<Dim> s;
      for (int k = 0; k < Dim; ++k) s[k] = uniform(0, 1);
      const Vec<Dim> x = box.map(s);
      const Vec<Dim> div = eval_stress_shapes<Dim>(box, x).div[a];
      worst = std::max(worst, (div - proj.value(x)).norm() / std::max(1.0, div.norm()));
    }
  }
  return worst;
}

double rate_of(const StudyResult& r, const std::string& col) {
  for (const auto& rr : r.rates)
    if (rr.column == col) return rr.rate;
  return ErrorRecord::unset;
}

double max_energy_defect(const StudyResult& r) {
  double worst = 0.0;
  for (const auto& lv : r.levels) worst = std::max(worst, lv.energy_defect);
  return worst;
}

}  // namespace

int main() {
  std::vector<double> energy_defects;

  criterion(1, "divergence-moment orthogonality of the interpolation", 5.0, [] {
    const double d = std::max(divergence_moment_defect<2>(100), divergence_moment_defect<3>(100));
    return Outcome{d <= 1e-12, "max relative moment " + fmt("%.2e", d) + " (n = 2, 3; 100 fields each; bound 1e-12)"};
  });

  criterion(2, "shear L2 orthogonality of the interpolation", 5.0, [] {
    const double d = std::max(shear_defect<2>(100), shear_defect<3>(100));
    return Outcome{d <= 1e-12, "max relative inner product " + fmt("%.2e", d) + " (bound 1e-12)"};
  });

  criterion(3, "divergence of local stress space lies in local displacement space", 5.0, [] {
    const double d = std::max({kernel_inclusion_residual<2>(), kernel_inclusion_residual<3>(), kernel_inclusion_residual<4>()});
    return Outcome{d <= 1e-13, "max projection residual " + fmt("%.2e", d) + " (n = 2, 3, 4; bound 1e-13)"};
  });

  criterion(4, "interpolation reproduces the local space on a 4x4 grid", 5.0, [] {
    const DofMap<2> dofs(TensorGrid<2>::unit(4));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      std::array<double, 11> c;
      for (auto& v : c) v = uniform(-1, 1);
      auto sigma = [&](const Vec<2>& x) {
        SymTensor<2> s;
        s(0, 0) = c[0] + c[1] * x[0] + c[2] * x[0] * x[0];
        s(1, 1) = c[3] + c[4] * x[1] + c[5] * x[1] * x[1];
        s(0, 1) = s(1, 0) = c[6] + c[7] * x[0] + c[8] * x[1] + c[9] * x[0] * x[1];
        return s;
      };
      const auto pi = interp_stress<2>(dofs, sigma);
      for (int k = 0; k < 200; ++k) {
        const Vec<2> x(uniform(0, 1), uniform(0, 1));
        worst = std::max(worst, (pi.value(x) - sigma(x)).cwiseAbs().maxCoeff());
      }
    }
    return Outcome{worst <= 1e-11, "max pointwise deviation " + fmt("%.2e", worst) + " (bound 1e-11)"};
  });

  StudyConfig cfg2;
  cfg2.dim = 2;
  cfg2.levels = {4, 8, 16, 32};
  cfg2.mu = 0.5;
  cfg2.lambda = 1.0;
  cfg2.solution = "sine";
  StudyResult study2;

  criterion(5, "first-order convergence, 2D sine, N = 4..32", 120.0, [&] {
    study2 = run_study(cfg2);
    energy_defects.push_back(max_energy_defect(study2));
    const double rs = rate_of(study2, "err_sigma_hdiv"), ru = rate_of(study2, "err_u_l2");
    const bool ok = rs >= 0.85 && rs <= 1.30 && ru >= 0.85 && ru <= 1.30;
    return Outcome{ok, "rate H(div) " + fmt("%.3f", rs) + ", rate u L2 " + fmt("%.3f", ru) + " (range [0.85, 1.30])"};
  });

  criterion(6, "superconvergence, 2D sine, N = 4..32", 1.0, [&] {
    if (study2.levels.empty()) return Outcome{false, "criterion 5 run unavailable"};
    const double rs = rate_of(study2, "super_sigma_hdiv"), ru = rate_of(study2, "super_u_l2");
    bool below = true;
    for (const auto& lv : study2.levels)
      if (lv.n >= 8)
        below = below && lv.errors.super_sigma_hdiv < lv.errors.err_sigma_hdiv && lv.errors.super_u_l2 < lv.errors.err_u_l2;
    return Outcome{rs >= 1.40 && ru >= 1.40 && below,
                   "rate superclose H(div) " + fmt("%.3f", rs) + ", rate superclose u " + fmt("%.3f", ru) +
                       " (bound 1.40); superclose below plain error for N >= 8: " + (below ? "yes" : "no")};
  });

  criterion(7, "3D superconvergence smoke, sine, N = 2, 4, 8", 600.0, [&] {
    StudyConfig cfg3 = cfg2;
    cfg3.dim = 3;
    cfg3.levels = {2, 4, 8};
    const auto res = run_study(cfg3);
    energy_defects.push_back(max_energy_defect(res));
    const double r = rate_of(res, "super_sigma_hdiv");
    return Outcome{r >= 1.30, "rate superclose H(div) " + fmt("%.3f", r) + " (bound 1.30)"};
  });

  criterion(8, "stability probes, 2D, N = 2, 4, 8", 60.0, [] {
    const LameParams mat{0.5, 1.0};
    const double bound = mat.compliance_lower_bound(2) - 1e-10;
    bool ok = true;
    std::string detail = "beta_h";
    double prev = 0.0, min_alpha = 1e300;
    for (int n : {2, 4, 8}) {
      const auto grid = TensorGrid<2>::unit(n);
      const double beta = infsup_probe<2>(grid, mat);
      const double alpha = kernel_ellipticity_probe<2>(grid, mat).alpha;
      ok = ok && beta > 0.05 && (prev == 0.0 || beta > 0.9 * prev) && alpha >= bound;
      prev = beta;
      min_alpha = std::min(min_alpha, alpha);
      detail += " " + fmt("%.4f", beta);
    }
    detail += "; min kernel ellipticity " + fmt("%.12f", min_alpha) + " (bound " + fmt("%.12f", bound) + ")";
    return Outcome{ok, detail};
  });

  criterion(9, "solver fidelity and energy identity", 5.0, [&] {
    const LameParams mat{0.5, 1.0};
    const auto sys = assemble<2>(TensorGrid<2>::unit(2), mat);
    const Eigen::VectorXd F = assemble_load<2>(sys.dofs.grid(), sine_solution<2>(mat).f, sys.dofs);
    const Eigen::MatrixXd K(sys.kkt());
    const Eigen::VectorXd dense = K.fullPivLu().solve(sys.kkt_rhs(F));
    double worst = 0.0;
    for (auto strategy : {SolveStrategy::Direct, SolveStrategy::Iterative}) {
      SolveOptions opt;
      opt.strategy = strategy;
      const auto sol = solve<2>(sys, F, opt);
      if (!sol.report.ok()) return Outcome{false, std::string("solver: ") + sol.report.message};
      Eigen::VectorXd x(K.rows());
      x << sol.sigma.coeffs, sol.u.coeffs;
      worst = std::max(worst, (x - dense).norm() / dense.norm());
    }
    double energy = 0.0;
    for (double e : energy_defects) energy = std::max(energy, e);
    const bool ok = K.rows() == 45 && worst <= 1e-9 && energy <= 1e-9 && energy_defects.size() == 2;
    return Outcome{ok, "45 unknowns, max deviation from dense LU " + fmt("%.2e", worst) +
                           ", max energy identity defect over acceptance runs " + fmt("%.2e", energy) +
                           " (bounds 1e-9)"};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
