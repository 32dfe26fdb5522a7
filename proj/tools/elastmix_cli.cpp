// Convergence-study driver for the rectangular mixed elasticity element.
//
//   elastmix --dim 2 --levels 4,8,16,32 --mu 0.5 --lambda 1 --solution sine -o study.csv
//
// Writes <output> (one row per level), <stem>.rates.csv (fitted rates) and
// <stem>.md (markdown table). Exit codes: 0 ok, 1 numerical failure, 2 config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elastmix/elastmix.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  auto p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

template <int Dim>
void export_matrix(const elastmix::StudyConfig& cfg, const std::string& path) {
  const auto grid = elastmix::TensorGrid<Dim>::unit(cfg.levels.front());
  const auto sys = elastmix::assemble<Dim>(grid, {cfg.mu, cfg.lambda});
  std::ofstream os(path);
  if (!os) throw elastmix::InvalidArgument("cannot open " + path);
  elastmix::write_matrix_market(os, sys.kkt());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element convergence study for linear elasticity on rectangular grids"};

  std::string config_file;
  std::optional<int> dim, probe_max_dofs, quad_points;
  std::optional<std::string> levels, solution, output;
  std::optional<double> mu, lambda, tol;
  bool probe = false, quiet = false;
  std::string export_path;

  app.add_option("--config", config_file, "key = value file; flags override it")->check(CLI::ExistingFile);
  app.add_option("--dim", dim, "spatial dimension (2 or 3)");
  app.add_option("--levels", levels, "comma-separated cells per axis, strictly increasing");
  app.add_option("--mu", mu, "shear modulus");
  app.add_option("--lambda", lambda, "first Lame constant");
  app.add_option("--solution", solution, "manufactured solution: sine | polynomial");
  app.add_option("-o,--output", output, "CSV output path");
  app.add_flag("--probe-infsup", probe, "add beta_h and alpha_kernel columns (dense eigensolves)");
  app.add_option("--probe-max-dofs", probe_max_dofs, "unknown budget for the stability probes");
  app.add_option("--quad-points", quad_points, "Gauss points per axis for load, interpolation and norms");
  app.add_option("--tol", tol, "relative residual tolerance of the linear solve");
  app.add_option("--export-matrix", export_path, "write the saddle-point matrix of the first level (Matrix Market)");
  app.add_flag("-q,--quiet", quiet, "no summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  elastmix::StudyConfig cfg;
  elastmix::StudyResult result;
  try {
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      elastmix::load_config(is, cfg);
    }
    if (dim) cfg.dim = *dim;
    if (levels) cfg.levels = elastmix::parse_int_list(*levels);
    if (mu) cfg.mu = *mu;
    if (lambda) cfg.lambda = *lambda;
    if (solution) cfg.solution = *solution;
    if (output) cfg.output = *output;
    if (probe) cfg.probe_infsup = true;
    if (probe_max_dofs) cfg.probe_max_dofs = *probe_max_dofs;
    if (quad_points) cfg.quad_points = *quad_points;
    if (tol) cfg.tol = *tol;
    cfg.validate();
    if (!export_path.empty()) {
      if (cfg.dim == 2) export_matrix<2>(cfg, export_path);
      else export_matrix<3>(cfg, export_path);
    }
  } catch (const elastmix::InvalidArgument& e) {
    std::cerr << "elastmix: configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    result = elastmix::run_study(cfg);
  } catch (const elastmix::InvalidArgument& e) {
    std::cerr << "elastmix: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "elastmix: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  for (const auto& w : result.warnings) std::cerr << "elastmix: warning: " << w << '\n';

  const std::filesystem::path out(cfg.output);
  {
    std::ofstream csv(out, std::ios::binary);
    std::ofstream rates(sibling(out, ".rates.csv"), std::ios::binary);
    std::ofstream md(sibling(out, ".md"));
    if (!csv || !rates || !md) {
      std::cerr << "elastmix: configuration error: cannot write output next to " << out << '\n';
      return kExitConfig;
    }
    elastmix::write_csv(csv, result);
    elastmix::write_rates_csv(rates, result);
    elastmix::write_markdown(md, result);
  }

  if (!quiet) elastmix::write_markdown(std::cout, result);
  return kExitOk;
}
