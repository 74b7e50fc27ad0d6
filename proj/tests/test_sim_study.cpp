#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cpscan/detect.hpp"
#include "cpscan/errors.hpp"
#include "cpscan/sim_study.hpp"

using Catch::Matchers::ContainsSubstring;
using cpscan::H1Family;
using cpscan::H1Scenario;
using cpscan::Statistic;

namespace {

cpscan::EmpiricalNull small_null(Statistic s, std::size_t nsim = 400) {
  cpscan::NullGenSpec spec;
  spec.statistic = s;
  spec.nsim = nsim;
  spec.master_seed = 99;
  return cpscan::generate_null(spec, 2);
}

}  // namespace

TEST_CASE("grids", "[sim]") {
  const auto shift = cpscan::default_grid(H1Family::NormalShift);
  REQUIRE(shift.size() == 21);
  CHECK(shift[3] == 0.3);
  CHECK(shift.back() == 2.0);
  const auto expo = cpscan::default_grid(H1Family::ExponentialScale);
  REQUIRE(expo.size() == 9);
  CHECK(expo.front() == 1.0);
  CHECK(expo[4] == 2.0);
  CHECK(cpscan::arithmetic_grid(0.5, 2.5, 0.25).size() == 9);
  CHECK_THROWS_AS(cpscan::arithmetic_grid(1.0, 0.0, 0.1), cpscan::ArgumentError);
}

TEST_CASE("H1 series generators", "[sim]") {
  H1Scenario scn;
  cpscan::Stream s1(1, {0});
  scn.family = H1Family::UniformShift;
  const auto u0 = cpscan::simulate_h1_series(scn, 0.0, s1);
  REQUIRE(u0.size() == 57);
  CHECK(std::all_of(u0.begin(), u0.end(), [](double v) { return v > 0.0 && v < 4.0; }));

  cpscan::Stream s2(1, {1});
  const auto u1 = cpscan::simulate_h1_series(scn, 1.5, s2);
  CHECK(std::all_of(u1.begin(), u1.begin() + 20, [](double v) { return v > 0.0 && v < 4.0; }));
  CHECK(std::all_of(u1.begin() + 20, u1.end(), [](double v) { return v > 1.5 && v < 5.5; }));

  scn.family = H1Family::ExponentialScale;
  cpscan::Stream s3(1, {2});
  const auto e = cpscan::simulate_h1_series(scn, 2.0, s3);
  CHECK(std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; }));

  // m1 = 0 draws the same series as the null stream would: the shift enters additively
  scn.family = H1Family::NormalShift;
  cpscan::Stream a(5, {9}), b(5, {9});
  const auto x0 = cpscan::simulate_h1_series(scn, 0.0, a);
  const auto x1 = cpscan::simulate_h1_series(scn, 1.0, b);
  for (std::size_t t = 0; t < 57; ++t) {
    CHECK_THAT(x1[t] - x0[t], Catch::Matchers::WithinAbs(t < 20 ? 0.0 : 1.0, 1e-12));
  }
}

TEST_CASE("scenario validation", "[sim]") {
  H1Scenario scn;
  scn.tau = 5;
  CHECK_THROWS_AS(cpscan::validate(scn), cpscan::ArgumentError);
  scn.tau = 52;
  CHECK_THROWS_AS(cpscan::validate(scn), cpscan::ArgumentError);
  scn.tau = 51;
  CHECK_NOTHROW(cpscan::validate(scn));
  scn.param_grid.clear();
  CHECK_THROWS_AS(cpscan::validate(scn), cpscan::ArgumentError);
  scn = {};
  scn.family = H1Family::ExponentialScale;
  scn.param_grid = {0.0};
  CHECK_THROWS_AS(cpscan::validate(scn), cpscan::ArgumentError);
}

TEST_CASE("power study is deterministic and paired", "[sim]") {
  cpscan::NullBank bank;
  bank.emplace(Statistic::MinPWMW, small_null(Statistic::MinPWMW));
  bank.emplace(Statistic::Pettitt, small_null(Statistic::Pettitt));
  H1Scenario scn;
  scn.param_grid = {0.0, 1.5};
  scn.nsim2 = 60;
  const std::vector<Statistic> stats{Statistic::MinPWMW, Statistic::Pettitt};
  const auto a = cpscan::estimate_power(scn, stats, bank, 5, 1);
  const auto b = cpscan::estimate_power(scn, stats, bank, 5, 4);
  CHECK(a.power == b.power);
  REQUIRE(a.power.size() == 2);
  CHECK(a.power[1][0] > a.power[0][0]);

  // single-statistic runs see the same series as the paired run
  const auto only_v = cpscan::estimate_power(scn, {Statistic::MinPWMW}, bank, 5, 2);
  CHECK(only_v.power[0][0] == a.power[0][0]);
  CHECK(only_v.power[1][0] == a.power[1][0]);

  CHECK_THROWS_WITH(cpscan::estimate_power(scn, {Statistic::GaussianLR}, bank, 5, 1),
                    ContainsSubstring("statistic=LR") && ContainsSubstring("n=57"));
  scn.n = 56;
  CHECK_THROWS(cpscan::estimate_power(scn, stats, bank, 5, 1));
}

TEST_CASE("coverage study conditions on detection", "[sim]") {
  const auto null = small_null(Statistic::MinPWMW);
  H1Scenario scn;
  scn.param_grid = {1.5};
  scn.nsim2 = 15;
  cpscan::CoverageOptions opts;
  opts.nboot = 40;
  opts.keep_series = true;
  const std::vector<cpscan::BootMethod> methods{cpscan::BootMethod::Boot1,
                                                cpscan::BootMethod::Boot2};
  const auto r = cpscan::estimate_coverage(scn, methods, null, 11, opts, 1);
  REQUIRE(r.cells.size() == 1);
  const auto& cell = r.cells[0];
  REQUIRE(cell.series.size() == 15);
  CHECK(cell.attempts >= 15);
  for (std::size_t i = 0; i < cell.series.size(); ++i) {
    const auto out = cpscan::detect(cell.series[i], null, {6, Statistic::MinPWMW});
    REQUIRE(out.p_value == cell.detection_p[i]);
    REQUIRE(out.p_value <= scn.alpha);
  }
  REQUIRE(cell.methods.size() == 2);
  for (const auto& m : cell.methods) {
    CHECK(m.coverage >= 0.0);
    CHECK(m.coverage <= 1.0);
    CHECK(m.avg_length >= 0.0);
  }

  const auto again = cpscan::estimate_coverage(scn, methods, null, 11, opts, 3);
  CHECK(again.cells[0].attempts == cell.attempts);
  CHECK(again.cells[0].series == cell.series);
  CHECK(again.cells[0].methods[0].avg_length == cell.methods[0].avg_length);
  CHECK(again.cells[0].methods[1].coverage == cell.methods[1].coverage);
}

TEST_CASE("coverage study honours the attempt budget", "[sim]") {
  const auto null = small_null(Statistic::MinPWMW);
  H1Scenario scn;
  scn.param_grid = {0.0};
  scn.nsim2 = 50;
  cpscan::CoverageOptions opts;
  opts.nboot = 10;
  opts.attempt_budget = 100;
  CHECK_THROWS_AS(cpscan::estimate_coverage(scn, {cpscan::BootMethod::Boot1}, null, 1, opts, 1),
                  cpscan::BudgetExceededError);
}

TEST_CASE("study config parsing", "[sim]") {
  const auto cfg = cpscan::parse_study_config(R"({
    "family": "normal_shift", "tau": 20, "grid": {"from": 0, "to": 2, "by": 0.1},
    "statistics": ["v", "pettitt", "pettitt-std"], "nsim2": 1000, "seed": 42
  })");
  CHECK(cfg.scenario.param_grid.size() == 21);
  CHECK(cfg.statistics.size() == 3);
  CHECK(cfg.statistics[2] == Statistic::PettittStd);
  CHECK(cfg.seed == 42);
  CHECK(cfg.scenario.n == 57);
  CHECK(cfg.coverage.attempt_budget == 1000000);

  const auto same = cpscan::parse_study_config(R"({"seed": 42, "nsim2": 1000, "tau": 20,
    "statistics": ["v", "pettitt", "pettitt-std"], "grid": {"by": 0.1, "to": 2, "from": 0},
    "family": "normal_shift"})");
  CHECK(same.config_hash == cfg.config_hash);

  const auto expo = cpscan::parse_study_config(R"({"family": "exponential_scale", "seed": 1})");
  CHECK(expo.scenario.param_grid == cpscan::default_grid(H1Family::ExponentialScale));

  CHECK_THROWS_AS(cpscan::parse_study_config(R"({"tau": 20})"), cpscan::ArgumentError);
  CHECK_THROWS_AS(cpscan::parse_study_config(R"({"seed": 1, "tau": 60})"), cpscan::ArgumentError);
  CHECK_THROWS_AS(cpscan::parse_study_config(R"({"seed": 1, "colour": 3})"), cpscan::ArgumentError);
  CHECK_THROWS_AS(cpscan::parse_study_config(R"({"seed": 1, "statistics": ["z"]})"),
                  cpscan::ArgumentError);
  CHECK_THROWS_AS(cpscan::parse_study_config("[1,2"), cpscan::ArgumentError);
  CHECK_THROWS_AS(cpscan::parse_study_config(R"({"seed": "x"})"), cpscan::ArgumentError);
}

TEST_CASE("study CSV layout", "[sim]") {
  cpscan::PowerResult p;
  p.statistics = {Statistic::MinPWMW, Statistic::PettittStd};
  p.params = {0.0, 0.1};
  p.power = {{0.05, 0.04}, {0.25, 0.5}};
  std::ostringstream pout;
  cpscan::write_power_csv(p, pout, "m");
  CHECK(pout.str() == "# m\nparam,power_v,power_pettitt-std\n0,0.050000000000000003,0.040000000000000001\n"
                      "0.1,0.25,0.5\n");

  cpscan::CoverageResult c;
  c.methods = {cpscan::BootMethod::Boot1};
  cpscan::CoverageCell cell;
  cell.param = 1.5;
  cell.attempts = 210;
  cell.methods = {{cpscan::BootMethod::Boot1, 0.95, 0.01, 6.5, 2.0}};
  c.cells = {cell};
  std::ostringstream cout;
  cpscan::write_coverage_csv(c, cout, "m");
  CHECK(cout.str() ==
        "# m\nparam,attempts,coverage_boot1,coverage_se_boot1,avg_length_boot1,length_sd_boot1\n"
        "1.5,210,0.94999999999999996,0.01,6.5,2\n");
}

TEST_CASE("paired standard error of a power difference", "[sim]") {
  cpscan::PowerResult r;
  r.statistics = {Statistic::MinPWMW, Statistic::Pettitt};
  r.params = {1.0};
  // 10 series: both reject 5, only the first rejects 3, only the second 1, neither 1
  r.rejected = {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0}};
  r.power = {{0.8, 0.6}};
  // d = (3 - 1)/10; var = ((3 + 1)/10 - d^2)/10
  CHECK_THAT(cpscan::paired_difference_se(r, 0, 0, 1),
             Catch::Matchers::WithinAbs(std::sqrt((0.4 - 0.04) / 10.0), 1e-15));
  CHECK(cpscan::paired_difference_se(r, 0, 0, 0) == 0.0);
  CHECK_THROWS_AS(cpscan::paired_difference_se(r, 1, 0, 1), cpscan::ArgumentError);
}
