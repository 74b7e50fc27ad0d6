#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpscan/rank_tests.hpp"

namespace cpscan {

enum class Statistic {
  MinPWMW,     // V: minimum two-sided WMW p-value
  Pettitt,     // W: max |U - E(U)|
  PettittStd,  // Ws: max |U - E(U)| / sd(U)
  TMaxAbs,     // max |t|
  TMinP,       // min t-test p-value
  GaussianLR,  // lambda: max (n/2)(ln s^2 - ln s_tau^2)
};

enum class Objective { Minimize, Maximize };

Objective objective_of(Statistic s) noexcept;

// Rank-based statistics are distribution-free under the null.
bool is_rank_based(Statistic s) noexcept;

// Token used in null files: V, PETTITT, PETTITT_STD, TMAX, TMINP, LR.
std::string_view file_token(Statistic s) noexcept;
std::optional<Statistic> statistic_from_file_token(std::string_view token) noexcept;

// Token used on the command line: v, pettitt, pettitt-std, tmax, tminp, lr.
std::string_view cli_token(Statistic s) noexcept;
std::optional<Statistic> statistic_from_cli_token(std::string_view token) noexcept;

// Validated series of finite observations.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

struct ScanConfig {
  std::size_t b = 6;
  Statistic statistic = Statistic::MinPWMW;
  PValuePolicy policy = PValuePolicy::reference_compatible();
};

// Per-split values for tau = b .. n-b, where tau is the size of the left
// segment (1-based split between positions tau and tau+1).
struct ScanProfile {
  std::vector<std::size_t> taus;
  std::vector<double> values;
  Objective objective = Objective::Minimize;
  double extremum_value = 0.0;
  // earliest tau attaining the extremum
  std::size_t tau_hat = 0;
  // set when some value is +infinity (perfect within-segment fit for the
  // Gaussian likelihood ratio, zero pooled variance for |t|)
  bool has_infinite = false;
};

ScanProfile scan_wmw_pvalues(std::span<const double> x, std::size_t b,
                             const PValuePolicy& policy = {});
ScanProfile scan_pettitt(std::span<const double> x, std::size_t b, bool standardized);

enum class TScanMode { MaxAbsT, MinP };
ScanProfile scan_t(std::span<const double> x, std::size_t b, TScanMode mode);

ScanProfile scan_gaussian_lr(std::span<const double> x, std::size_t b);

// Dispatch on cfg.statistic.
ScanProfile scan(std::span<const double> x, const ScanConfig& cfg);

// Extremum only; avoids building the profile where the caller needs the
// statistic value and location alone.
struct ScanExtremum {
  double value = 0.0;
  std::size_t tau_hat = 0;
};
ScanExtremum scan_extremum(std::span<const double> x, const ScanConfig& cfg);

// WMW U_tau for tau = b .. n-b from one ranking of the whole series, using
// the running prefix rank sum: U_tau = R1(tau) - tau(tau+1)/2.
struct UProfile {
  std::vector<double> u;
  double tie_term = 0.0;
};
UProfile scan_u(std::span<const double> x, std::size_t b);

// Throws ArgumentError unless 1 <= b and n >= 2b.
void check_window(std::size_t n, std::size_t b);

}  // namespace cpscan
