#include "cpscan/scan_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "cpscan/errors.hpp"

namespace cpscan {

namespace {

struct StatisticNames {
  Statistic statistic;
  std::string_view file;
  std::string_view cli;
};

constexpr std::array<StatisticNames, 6> kNames{{
    {Statistic::MinPWMW, "V", "v"},
    {Statistic::Pettitt, "PETTITT", "pettitt"},
    {Statistic::PettittStd, "PETTITT_STD", "pettitt-std"},
    {Statistic::TMaxAbs, "TMAX", "tmax"},
    {Statistic::TMinP, "TMINP", "tminp"},
    {Statistic::GaussianLR, "LR", "lr"},
}};

void require_finite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw ArgumentError("series value at position " + std::to_string(i + 1) +
                          " is not finite");
    }
  }
}

ScanProfile make_profile(std::size_t n, std::size_t b, Objective objective) {
  ScanProfile p;
  p.objective = objective;
  const std::size_t count = n - 2 * b + 1;
  p.taus.resize(count);
  for (std::size_t i = 0; i < count; ++i) p.taus[i] = b + i;
  p.values.reserve(count);
  return p;
}

// Earliest tau attaining the extremum.
void finish_profile(ScanProfile& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    const bool better = p.objective == Objective::Minimize ? p.values[i] < p.values[best]
                                                           : p.values[i] > p.values[best];
    if (better) best = i;
  }
  p.extremum_value = p.values[best];
  p.tau_hat = p.taus[best];
  p.has_infinite = std::any_of(p.values.begin(), p.values.end(),
                               [](double v) { return std::isinf(v); });
}

// Running mean and sum of squared deviations (Welford); exact zero spread
// for constant runs.
struct Moments {
  double mean = 0.0;
  double ss = 0.0;
};

// forward[k] summarizes x[0..k), backward[k] summarizes x[k..n).
std::pair<std::vector<Moments>, std::vector<Moments>> segment_moments(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<Moments> forward(n + 1);
  std::vector<Moments> backward(n + 1);
  Moments acc;
  for (std::size_t k = 0; k < n; ++k) {
    const double delta = x[k] - acc.mean;
    acc.mean += delta / static_cast<double>(k + 1);
    acc.ss += delta * (x[k] - acc.mean);
    forward[k + 1] = acc;
  }
  acc = {};
  for (std::size_t k = n; k-- > 0;) {
    const double delta = x[k] - acc.mean;
    acc.mean += delta / static_cast<double>(n - k);
    acc.ss += delta * (x[k] - acc.mean);
    backward[k] = acc;
  }
  return {std::move(forward), std::move(backward)};
}

}  // namespace

Objective objective_of(Statistic s) noexcept {
  return (s == Statistic::MinPWMW || s == Statistic::TMinP) ? Objective::Minimize
                                                             : Objective::Maximize;
}

bool is_rank_based(Statistic s) noexcept {
  return s == Statistic::MinPWMW || s == Statistic::Pettitt || s == Statistic::PettittStd;
}

std::string_view file_token(Statistic s) noexcept {
  for (const auto& n : kNames)
    if (n.statistic == s) return n.file;
  return {};
}

std::optional<Statistic> statistic_from_file_token(std::string_view token) noexcept {
  for (const auto& n : kNames)
    if (n.file == token) return n.statistic;
  return std::nullopt;
}

std::string_view cli_token(Statistic s) noexcept {
  for (const auto& n : kNames)
    if (n.statistic == s) return n.cli;
  return {};
}

std::optional<Statistic> statistic_from_cli_token(std::string_view token) noexcept {
  for (const auto& n : kNames)
    if (n.cli == token) return n.statistic;
  return std::nullopt;
}

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ArgumentError("time series is empty");
  require_finite(values_);
}

void check_window(std::size_t n, std::size_t b) {
  if (b < 1) throw ArgumentError("boundary margin b must be >= 1");
  if (n < 2 * b) {
    throw ArgumentError("series length must be ≥ 2b (n=" + std::to_string(n) +
                        ", b=" + std::to_string(b) + ")");
  }
}

UProfile scan_u(std::span<const double> x, std::size_t b) {
  check_window(x.size(), b);
  require_finite(x);
  const std::size_t n = x.size();
  const Ranking r = rank_with_ties(x);

  UProfile out;
  out.tie_term = r.tie_term;
  out.u.reserve(n - 2 * b + 1);
  double prefix = 0.0;
  for (std::size_t t = 0; t < b - 1; ++t) prefix += r.ranks[t];
  for (std::size_t tau = b; tau <= n - b; ++tau) {
    prefix += r.ranks[tau - 1];
    const auto td = static_cast<double>(tau);
    out.u.push_back(prefix - td * (td + 1.0) / 2.0);
  }
  return out;
}

ScanProfile scan_wmw_pvalues(std::span<const double> x, std::size_t b,
                             const PValuePolicy& policy) {
  const UProfile up = scan_u(x, b);
  const std::size_t n = x.size();
  ScanProfile p = make_profile(n, b, Objective::Minimize);
  for (std::size_t i = 0; i < up.u.size(); ++i) {
    const std::size_t tau = b + i;
    p.values.push_back(wmw_p_from_u(up.u[i], tau, n - tau, up.tie_term, policy));
  }
  finish_profile(p);
  return p;
}

ScanProfile scan_pettitt(std::span<const double> x, std::size_t b, bool standardized) {
  const UProfile up = scan_u(x, b);
  const std::size_t n = x.size();
  ScanProfile p = make_profile(n, b, Objective::Maximize);
  for (std::size_t i = 0; i < up.u.size(); ++i) {
    const auto n1 = static_cast<double>(b + i);
    const auto n2 = static_cast<double>(n) - n1;
    double v = std::fabs(up.u[i] - n1 * n2 / 2.0);
    if (standardized) v /= std::sqrt(n1 * n2 * (n1 + n2 + 1.0) / 12.0);
    p.values.push_back(v);
  }
  finish_profile(p);
  return p;
}

ScanProfile scan_t(std::span<const double> x, std::size_t b, TScanMode mode) {
  check_window(x.size(), b);
  if (b < 2) throw ArgumentError("t scans need b >= 2 so each segment has two points");
  require_finite(x);
  const std::size_t n = x.size();
  const auto [left, right] = segment_moments(x);
  ScanProfile p =
      make_profile(n, b, mode == TScanMode::MinP ? Objective::Minimize : Objective::Maximize);
  for (std::size_t tau = b; tau <= n - b; ++tau) {
    const TTestResult r = t_from_summaries(tau, left[tau].mean, left[tau].ss, n - tau,
                                           right[tau].mean, right[tau].ss);
    p.values.push_back(mode == TScanMode::MinP ? r.p : std::fabs(r.t));
  }
  finish_profile(p);
  return p;
}

ScanProfile scan_gaussian_lr(std::span<const double> x, std::size_t b) {
  check_window(x.size(), b);
  require_finite(x);
  const std::size_t n = x.size();
  const auto [left, right] = segment_moments(x);
  const double total_ss = left[n].ss;
  if (!(total_ss > 0.0)) {
    throw DegenerateInputError("Gaussian likelihood ratio undefined for a constant series");
  }
  const double half_n = static_cast<double>(n) / 2.0;
  ScanProfile p = make_profile(n, b, Objective::Maximize);
  for (std::size_t tau = b; tau <= n - b; ++tau) {
    const double within = left[tau].ss + right[tau].ss;
    if (!(within > 0.0)) {
      p.values.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    // s^2 / s_tau^2 = total SS / within SS; rounding can push the log a hair
    // below zero when the split explains nothing
    p.values.push_back(std::max(0.0, half_n * std::log(total_ss / within)));
  }
  finish_profile(p);
  return p;
}

ScanProfile scan(std::span<const double> x, const ScanConfig& cfg) {
  switch (cfg.statistic) {
    case Statistic::MinPWMW:
      return scan_wmw_pvalues(x, cfg.b, cfg.policy);
    case Statistic::Pettitt:
      return scan_pettitt(x, cfg.b, false);
    case Statistic::PettittStd:
      return scan_pettitt(x, cfg.b, true);
    case Statistic::TMaxAbs:
      return scan_t(x, cfg.b, TScanMode::MaxAbsT);
    case Statistic::TMinP:
      return scan_t(x, cfg.b, TScanMode::MinP);
    case Statistic::GaussianLR:
      return scan_gaussian_lr(x, cfg.b);
  }
  throw ArgumentError("unknown statistic");
}

ScanExtremum scan_extremum(std::span<const double> x, const ScanConfig& cfg) {
  const ScanProfile p = scan(x, cfg);
  return {p.extremum_value, p.tau_hat};
}

}  // namespace cpscan
