#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "elastmix/elastmix.hpp"

using namespace elastmix;

namespace {

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

/// CSV text with the trailing wall_time_s field removed from every line.
std::string without_wall_time(const std::string& csv) {
  std::string out;
  for (const auto& line : split(csv, "\r\n")) {
    if (line.empty()) continue;
    out += line.substr(0, line.rfind(',')) + "\n";
  }
  return out;
}

StudyConfig small_config() {
  StudyConfig cfg;
  cfg.levels = {2, 4, 8};
  return cfg;
}

}  // namespace

TEST(Study, ParseIntList) {
  EXPECT_EQ(parse_int_list("4,8,16"), (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(parse_int_list(" 2 , 3"), (std::vector<int>{2, 3}));
  EXPECT_THROW(parse_int_list("4,x"), InvalidArgument);
  EXPECT_THROW(parse_int_list("4,,8"), InvalidArgument);
  EXPECT_THROW(parse_int_list("4.5"), InvalidArgument);
}

TEST(Study, LoadConfig) {
  std::istringstream is(
      "# study\n"
      "dim = 3\n"
      "levels = 2, 4, 8   # three levels\n"
      "mu = 0.75\n"
      "lambda = 2.5e1\n"
      "solution = \"polynomial\"\n"
      "output = out/study.csv\n"
      "probe_infsup = true\n"
      "probe_max_dofs = 500\n"
      "quad_points = 6\n"
      "tol = 1e-10\n");
  StudyConfig cfg;
  load_config(is, cfg);
  EXPECT_EQ(cfg.dim, 3);
  EXPECT_EQ(cfg.levels, (std::vector<int>{2, 4, 8}));
  EXPECT_DOUBLE_EQ(cfg.mu, 0.75);
  EXPECT_DOUBLE_EQ(cfg.lambda, 25.0);
  EXPECT_EQ(cfg.solution, "polynomial");
  EXPECT_EQ(cfg.output, "out/study.csv");
  EXPECT_TRUE(cfg.probe_infsup);
  EXPECT_EQ(cfg.probe_max_dofs, 500);
  EXPECT_EQ(cfg.quad_points, 6);
  EXPECT_DOUBLE_EQ(cfg.tol, 1e-10);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Study, ConfigErrors) {
  StudyConfig cfg;
  std::istringstream unknown("speed = 3\n"), bad_number("mu = fast\n"), no_eq("dim 2\n");
  EXPECT_THROW(load_config(unknown, cfg), InvalidArgument);
  EXPECT_THROW(load_config(bad_number, cfg), InvalidArgument);
  EXPECT_THROW(load_config(no_eq, cfg), InvalidArgument);

  auto invalid = [](auto mutate) {
    StudyConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
    EXPECT_THROW(run_study(c), InvalidArgument);
  };
  invalid([](StudyConfig& c) { c.dim = 4; });
  invalid([](StudyConfig& c) { c.levels = {8, 4}; });
  invalid([](StudyConfig& c) { c.levels = {4, 4}; });
  invalid([](StudyConfig& c) { c.levels = {}; });
  invalid([](StudyConfig& c) { c.levels = {0, 2}; });
  invalid([](StudyConfig& c) { c.mu = -1.0; });
  invalid([](StudyConfig& c) { c.solution = "cubic"; });
  invalid([](StudyConfig& c) { c.quad_points = 0; });
  invalid([](StudyConfig& c) { c.tol = 0.0; });
}

TEST(Study, CsvLayoutAndReproducibility) {
  const auto a = run_study(small_config());
  const auto b = run_study(small_config());
  std::ostringstream ca, cb;
  write_csv(ca, a);
  write_csv(cb, b);
  const auto lines = split(ca.str(), "\r\n");
  ASSERT_EQ(lines.size(), 5u);  // header, 3 rows, empty tail after the last CRLF
  EXPECT_EQ(lines[0],
            "level,N,h,stress_dofs,disp_dofs,err_sigma_l2,err_sigma_div,err_sigma_hdiv,err_u_l2,"
            "super_sigma_l2,super_sigma_hdiv,super_u_l2,solve_residual,wall_time_s");
  const auto row = split(lines[1], ",");
  ASSERT_EQ(row.size(), 14u);
  EXPECT_EQ(row[0], "0");
  EXPECT_EQ(row[1], "2");
  EXPECT_EQ(row[2], "5.000000000000000e-01");
  EXPECT_EQ(row[3], "29");
  EXPECT_EQ(row[4], "16");
  EXPECT_EQ(without_wall_time(ca.str()), without_wall_time(cb.str()));
}

TEST(Study, RatesAndWarnings) {
  const auto three = run_study(small_config());
  ASSERT_EQ(three.rates.size(), rate_columns().size());
  EXPECT_FALSE(three.rates.front().coarsest_excluded);
  EXPECT_EQ(three.rates.front().levels_used, 3);
  EXPECT_TRUE(three.warnings.empty());

  StudyConfig four = small_config();
  four.levels = {2, 4, 8, 16};
  const auto r4 = run_study(four);
  EXPECT_TRUE(r4.rates.front().coarsest_excluded);
  EXPECT_EQ(r4.rates.front().levels_used, 3);
  std::ostringstream rates, md;
  write_rates_csv(rates, r4);
  write_markdown(md, r4);
  EXPECT_EQ(split(rates.str(), "\r\n").size(), rate_columns().size() + 2);
  EXPECT_NE(md.str().find("Rates exclude the coarsest level."), std::string::npos);
  for (const auto& lv : r4.levels) {
    EXPECT_LE(lv.energy_defect, 1e-9);
    EXPECT_LE(lv.solve_residual, 1e-11);
  }

  StudyConfig single;
  single.levels = {2};
  single.solution = "polynomial";
  const auto r1 = run_study(single);
  EXPECT_EQ(r1.levels.size(), 1u);
  EXPECT_TRUE(r1.rates.empty());
  ASSERT_EQ(r1.warnings.size(), 1u);
  EXPECT_NE(r1.warnings[0].find("fewer than 3 levels"), std::string::npos);
}

TEST(Study, ProbeColumns) {
  StudyConfig cfg = small_config();
  cfg.probe_infsup = true;
  const auto res = run_study(cfg);
  std::ostringstream csv;
  write_csv(csv, res);
  const auto header = split(split(csv.str(), "\r\n")[0], ",");
  ASSERT_EQ(header.size(), 16u);
  EXPECT_EQ(header[13], "beta_h");
  EXPECT_EQ(header[14], "alpha_kernel");
  EXPECT_EQ(header[15], "wall_time_s");
  for (const auto& lv : res.levels) {
    EXPECT_GT(lv.beta_h, 0.05);
    EXPECT_GE(lv.alpha_kernel, 1.0 / 3.0 - 1e-10);
  }
  cfg.probe_max_dofs = 50;
  EXPECT_THROW(run_study(cfg), InvalidArgument);
}

TEST(Study, FormatReal) {
  EXPECT_EQ(format_real(1.0), "1.000000000000000e+00");
  EXPECT_EQ(format_real(-0.00123), "-1.230000000000000e-03");
  EXPECT_EQ(format_real(ErrorRecord::unset), "nan");
}

TEST(Study, ResultsIndependentOfThreadCount) {
  std::string bodies[2];
  const char* counts[2] = {"1", "4"};
  for (int k = 0; k < 2; ++k) {
    ::setenv("ELASTMIX_THREADS", counts[k], 1);
    StudyConfig cfg = small_config();
    cfg.dim = 3;
    std::ostringstream csv;
    write_csv(csv, run_study(cfg));
    bodies[k] = without_wall_time(csv.str());
  }
  ::unsetenv("ELASTMIX_THREADS");
  EXPECT_EQ(bodies[0], bodies[1]);
}
