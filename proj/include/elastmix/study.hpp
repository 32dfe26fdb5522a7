#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "elastmix/assembly.hpp"
#include "elastmix/interpolate.hpp"
#include "elastmix/manufactured.hpp"
#include "elastmix/solver.hpp"
#include "elastmix/verify.hpp"

namespace elastmix {

/// Convergence study: one mesh per entry of `levels` (N cells per axis on
/// the unit box), solved, interpolated and measured.
struct StudyConfig {
  int dim = 2;
  std::vector<int> levels{4, 8, 16, 32};
  double mu = 0.5;
  double lambda = 1.0;
  std::string solution = "sine";
  std::string output = "study.csv";
  bool probe_infsup = false;
  int probe_max_dofs = 3000;
  int quad_points = 5;  ///< Gauss points per axis for load, interpolation and error norms
  double tol = 1e-11;

  void validate() const {
    if (dim != 2 && dim != 3) throw InvalidArgument("dim must be 2 or 3");
    if (levels.empty()) throw InvalidArgument("levels must not be empty");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (levels[k] < 1) throw InvalidArgument("levels must be positive");
      if (k > 0 && levels[k] <= levels[k - 1]) throw InvalidArgument("levels must be strictly increasing");
    }
    LameParams{mu, lambda}.validate(dim);
    if (solution != "sine" && solution != "polynomial")
      throw InvalidArgument("unknown solution '" + solution + "' (expected sine or polynomial)");
    if (quad_points < 1 || quad_points > 20) throw InvalidArgument("quad_points must be in [1, 20]");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (probe_max_dofs < 1) throw InvalidArgument("probe_max_dofs must be positive");
  }
};

struct LevelResult {
  int level = 0;
  int n = 0;
  ErrorRecord errors;
  double solve_residual = 0.0;
  double wall_time_s = 0.0;
  double beta_h = ErrorRecord::unset;
  double alpha_kernel = ErrorRecord::unset;
  /// |(A sigma_h, sigma_h) + (f, u_h)| / |(A sigma_h, sigma_h)|
  double energy_defect = 0.0;
};

struct RateResult {
  std::string column;
  double rate = ErrorRecord::unset;
  int levels_used = 0;
  bool coarsest_excluded = false;
};

struct StudyResult {
  StudyConfig config;
  std::vector<LevelResult> levels;
  std::vector<RateResult> rates;
  std::vector<std::string> warnings;
};

/// Columns that get a fitted rate, in CSV order.
inline const std::vector<std::string>& rate_columns() {
  static const std::vector<std::string> cols{"err_sigma_l2",   "err_sigma_div",    "err_sigma_hdiv", "err_u_l2",
                                             "super_sigma_l2", "super_sigma_hdiv", "super_u_l2"};
  return cols;
}

inline double column_value(const LevelResult& r, const std::string& col) {
  const ErrorRecord& e = r.errors;
  if (col == "err_sigma_l2") return e.err_sigma_l2;
  if (col == "err_sigma_div") return e.err_sigma_div;
  if (col == "err_sigma_hdiv") return e.err_sigma_hdiv;
  if (col == "err_u_l2") return e.err_u_l2;
  if (col == "super_sigma_l2") return e.super_sigma_l2;
  if (col == "super_sigma_hdiv") return e.super_sigma_hdiv;
  if (col == "super_u_l2") return e.super_u_l2;
  throw InvalidArgument("unknown column " + col);
}

/// Rates per column. With 4 or more levels the coarsest is dropped as
/// pre-asymptotic; fewer than 3 usable levels gives no fit.
inline std::vector<RateResult> fit_study_rates(const std::vector<LevelResult>& levels, std::vector<std::string>& warnings) {
  std::vector<RateResult> out;
  const bool drop = levels.size() >= 4;
  const std::size_t first = drop ? 1 : 0;
  if (levels.size() - first < 3) {
    warnings.push_back("fewer than 3 levels: no rates fitted");
    return out;
  }
  for (const auto& col : rate_columns()) {
    RateResult r{col, ErrorRecord::unset, static_cast<int>(levels.size() - first), drop};
    std::vector<double> hs, es;
    for (std::size_t k = first; k < levels.size(); ++k) {
      hs.push_back(levels[k].errors.h);
      es.push_back(column_value(levels[k], col));
    }
    try {
      r.rate = fit_rate(hs, es);
    } catch (const InvalidArgument& e) {
      warnings.push_back("no rate for " + col + ": " + e.what());
    }
    out.push_back(r);
  }
  return out;
}

template <int Dim>
LevelResult run_level(const StudyConfig& cfg, const ExactSolution<Dim>& exact, int level, int n) {
  const auto start = std::chrono::steady_clock::now();
  const LameParams mat{cfg.mu, cfg.lambda};
  const auto grid = TensorGrid<Dim>::unit(n);
  const auto sys = assemble<Dim>(grid, mat);
  const Eigen::VectorXd F = assemble_load<Dim>(grid, exact.f, sys.dofs, cfg.quad_points);
  SolveOptions opt;
  opt.tol = cfg.tol;
  const auto sol = solve<Dim>(sys, F, opt);
  if (!sol.report.ok())
    throw NumericalError("level N=" + std::to_string(n) + ": solver " + to_string(sol.report.status) + " (" +
                         sol.report.message + ")");

  LevelResult r;
  r.level = level;
  r.n = n;
  r.solve_residual = sol.report.relative_residual;
  r.errors = error_norms<Dim>(exact, sol.sigma, sol.u, cfg.quad_points);
  const auto pi_sigma = interp_stress<Dim>(sys.dofs, exact.sigma, cfg.quad_points);
  const auto ph_u = project_displacement<Dim>(sys.dofs, exact.u, cfg.quad_points);
  superclose_norms<Dim>(sol.sigma, pi_sigma, sol.u, ph_u, r.errors);

  const double energy = sol.sigma.coeffs.dot(sys.M * sol.sigma.coeffs);
  r.energy_defect = energy != 0.0 ? std::abs(energy + F.dot(sol.u.coeffs)) / std::abs(energy) : 0.0;

  if (cfg.probe_infsup) {
    const ProbeOptions popt{cfg.probe_max_dofs};
    r.beta_h = infsup_probe<Dim>(grid, mat, popt);
    r.alpha_kernel = kernel_ellipticity_probe<Dim>(grid, mat, popt).alpha;
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

template <int Dim>
StudyResult run_study_dim(const StudyConfig& cfg) {
  const auto exact = solution_by_name<Dim>(cfg.solution, LameParams{cfg.mu, cfg.lambda});
  StudyResult out;
  out.config = cfg;
  for (std::size_t k = 0; k < cfg.levels.size(); ++k)
    out.levels.push_back(run_level<Dim>(cfg, exact, static_cast<int>(k), cfg.levels[k]));
  out.rates = fit_study_rates(out.levels, out.warnings);
  return out;
}

/// Throws InvalidArgument on configuration errors and NumericalError on
/// solver failure.
inline StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.dim == 2) return run_study_dim<2>(cfg);
  return run_study_dim<3>(cfg);
}

// -- output ----------------------------------------------------------------------

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

/// One header line plus one row per level. wall_time_s is always last.
inline void write_csv(std::ostream& os, const StudyResult& res) {
  const bool probes = res.config.probe_infsup;
  os << "level,N,h,stress_dofs,disp_dofs,err_sigma_l2,err_sigma_div,err_sigma_hdiv,err_u_l2,"
        "super_sigma_l2,super_sigma_hdiv,super_u_l2,solve_residual";
  if (probes) os << ",beta_h,alpha_kernel";
  os << ",wall_time_s\r\n";
  for (const auto& r : res.levels) {
    const auto& e = r.errors;
    os << r.level << ',' << r.n << ',' << format_real(e.h) << ',' << e.stress_dofs << ',' << e.disp_dofs << ','
       << format_real(e.err_sigma_l2) << ',' << format_real(e.err_sigma_div) << ',' << format_real(e.err_sigma_hdiv)
       << ',' << format_real(e.err_u_l2) << ',' << format_real(e.super_sigma_l2) << ','
       << format_real(e.super_sigma_hdiv) << ',' << format_real(e.super_u_l2) << ',' << format_real(r.solve_residual);
    if (probes) os << ',' << format_real(r.beta_h) << ',' << format_real(r.alpha_kernel);
    os << ',' << format_real(r.wall_time_s) << "\r\n";
  }
}

/// Fitted rates: column, rate, levels_used, coarsest_excluded.
inline void write_rates_csv(std::ostream& os, const StudyResult& res) {
  os << "column,rate,levels_used,coarsest_excluded\r\n";
  for (const auto& r : res.rates)
    os << r.column << ',' << format_real(r.rate) << ',' << r.levels_used << ',' << (r.coarsest_excluded ? 1 : 0)
       << "\r\n";
}

/// Markdown rendering of the CSV data (errors and rates).
inline void write_markdown(std::ostream& os, const StudyResult& res) {
  char buf[64];
  os << "| N | h | err_sigma_hdiv | err_u_l2 | super_sigma_hdiv | super_u_l2 |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& r : res.levels) {
    const auto& e = r.errors;
    std::snprintf(buf, sizeof buf, "%.4e", e.h);
    os << "| " << r.n << " | " << buf;
    for (double v : {e.err_sigma_hdiv, e.err_u_l2, e.super_sigma_hdiv, e.super_u_l2}) {
      std::snprintf(buf, sizeof buf, "%.4e", v);
      os << " | " << buf;
    }
    os << " |\n";
  }
  if (!res.rates.empty()) {
    os << "\n| column | rate |\n|---|---|\n";
    for (const auto& r : res.rates) {
      std::snprintf(buf, sizeof buf, "%.3f", r.rate);
      os << "| " << r.column << " | " << buf << " |\n";
    }
    if (res.rates.front().coarsest_excluded) os << "\nRates exclude the coarsest level.\n";
  }
}

// -- config files ------------------------------------------------------------------

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw InvalidArgument("empty entry in list '" + text + "'");
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InvalidArgument("not an integer: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

/// Applies `key = value` lines ('#' starts a comment) to cfg. Keys: dim,
/// levels, mu, lambda, solution, output, probe_infsup, probe_max_dofs,
/// quad_points, tol.
inline void load_config(std::istream& is, StudyConfig& cfg) {
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  auto to_double = [](const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size()) throw InvalidArgument("config: bad number for " + key + ": '" + v + "'");
    return d;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "dim") cfg.dim = static_cast<int>(to_double(key, value));
    else if (key == "levels") cfg.levels = parse_int_list(value);
    else if (key == "mu") cfg.mu = to_double(key, value);
    else if (key == "lambda") cfg.lambda = to_double(key, value);
    else if (key == "solution") cfg.solution = value;
    else if (key == "output") cfg.output = value;
    else if (key == "probe_infsup") cfg.probe_infsup = (value == "true" || value == "1");
    else if (key == "probe_max_dofs") cfg.probe_max_dofs = static_cast<int>(to_double(key, value));
    else if (key == "quad_points") cfg.quad_points = static_cast<int>(to_double(key, value));
    else if (key == "tol") cfg.tol = to_double(key, value);
    else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

}  // namespace elastmix
