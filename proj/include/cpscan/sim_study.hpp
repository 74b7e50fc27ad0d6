#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpscan/bootstrap_ci.hpp"
#include "cpscan/null_mc.hpp"
#include "cpscan/random.hpp"
#include "cpscan/scan_stats.hpp"

namespace cpscan {

enum class H1Family {
  NormalShift,       // N(0,1) up to tau, N(m1,1) after
  UniformShift,      // U(0,4) up to tau, U(m1, 4+m1) after
  ExponentialScale,  // Exp(mean 1) up to tau, Exp(mean ratio) after
};

std::string_view family_token(H1Family f) noexcept;  // normal_shift | uniform_shift | exponential_scale
std::optional<H1Family> family_from_token(std::string_view token) noexcept;

// m1 in 0, 0.1, ..., 2 for the shift families; ratio in 1, 1.25, ..., 3 for
// the exponential family.
std::vector<double> default_grid(H1Family f);

// Inclusive arithmetic grid from..to in steps of `by`.
std::vector<double> arithmetic_grid(double from, double to, double by);

struct H1Scenario {
  H1Family family = H1Family::NormalShift;
  std::size_t tau = 20;
  std::vector<double> param_grid = default_grid(H1Family::NormalShift);
  std::size_t n = 57;
  std::size_t b = 6;
  std::size_t nsim2 = 1000;
  double alpha = 0.05;
};

void validate(const H1Scenario& scn);

// Draws x[1..tau] from the pre-change law, then x[tau+1..n] from the
// post-change law, both from `stream`.
std::vector<double> simulate_h1_series(const H1Scenario& scn, double param, Stream& stream);

using NullBank = std::map<Statistic, EmpiricalNull>;

struct PowerResult {
  std::vector<Statistic> statistics;
  std::vector<double> params;
  // power[i][k]: rejection rate (p < alpha) at params[i] for statistics[k]
  std::vector<std::vector<double>> power;
  // rejected[i][j * statistics.size() + k]: series j at params[i] rejected by statistics[k]
  std::vector<std::vector<unsigned char>> rejected;
};

// Standard error of power[i][k1] - power[i][k2]. Both rates come from the
// same series, so this uses the discordant pairs rather than two independent
// binomial variances.
double paired_difference_se(const PowerResult& r, std::size_t i, std::size_t k1, std::size_t k2);

// Every series is scored by all requested statistics (paired design).
// Series j at parameter v uses Stream(seed, {tag, bits(v), j}).
PowerResult estimate_power(const H1Scenario& scn, const std::vector<Statistic>& statistics,
                           const NullBank& nulls, std::uint64_t seed, unsigned threads = 0);

struct CoverageOptions {
  std::size_t nboot = 1000;
  double ci_alpha = 0.05;
  std::size_t attempt_budget = 1000000;
  bool keep_series = false;
};

struct MethodCoverage {
  BootMethod method = BootMethod::Boot1;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double avg_length = 0.0;
  double length_sd = 0.0;
};

struct CoverageCell {
  double param = 0.0;
  // simulated series needed to collect nsim2 detections
  std::size_t attempts = 0;
  std::vector<MethodCoverage> methods;
  // accepted series with their detection p-values (only with keep_series)
  std::vector<std::vector<double>> series;
  std::vector<double> detection_p;
};

struct CoverageResult {
  std::vector<BootMethod> methods;
  std::vector<CoverageCell> cells;
};

// For each parameter, simulates series until nsim2 of them are detected by
// the V test (p <= alpha) against `null`, then scores the bootstrap intervals
// of each method on them. Throws BudgetExceededError after
// options.attempt_budget attempts at one parameter.
CoverageResult estimate_coverage(const H1Scenario& scn, const std::vector<BootMethod>& methods,
                                 const EmpiricalNull& null, std::uint64_t seed,
                                 const CoverageOptions& options = {}, unsigned threads = 0);

// Study configuration file (JSON):
//   family          "normal_shift" | "uniform_shift" | "exponential_scale"
//   tau, n, b       integers (n default 57, b default 6)
//   grid            array of numbers, or {"from":, "to":, "by":}; default per family
//   nsim2           integer (default 1000)
//   alpha           detection level (default 0.05)
//   statistics      array of "v" | "pettitt" | "pettitt-std" | "tmax" | "tminp" | "lr"
//   ci_methods      array of "boot1" | "boot2"
//   seed            unsigned integer (required)
//   attempt_budget  integer (default 1000000)
//   nboot           integer (default 1000)
//   ci_alpha        real (default 0.05)
struct StudyConfig {
  H1Scenario scenario;
  std::vector<Statistic> statistics{Statistic::MinPWMW};
  std::vector<BootMethod> ci_methods{BootMethod::Boot1, BootMethod::Boot2};
  std::uint64_t seed = 0;
  CoverageOptions coverage;
  // FNV-1a 64 of the canonical (key-sorted) JSON text
  std::uint64_t config_hash = 0;
};

StudyConfig parse_study_config(std::string_view json_text);

// CSV: one row per grid value. A leading '#' manifest line carries `manifest`.
void write_power_csv(const PowerResult& r, std::ostream& out, const std::string& manifest);
void write_coverage_csv(const CoverageResult& r, std::ostream& out, const std::string& manifest);

}  // namespace cpscan
