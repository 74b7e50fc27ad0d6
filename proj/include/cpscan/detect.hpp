#pragma once

#include <cstddef>
#include <span>

#include "cpscan/null_mc.hpp"
#include "cpscan/scan_stats.hpp"

namespace cpscan {

struct DetectOptions {
  // (count + 1) / (nsim + 1) instead of count / nsim; never returns 0.
  bool add_one = false;
};

struct DetectionOutcome {
  double p_value = 1.0;
  std::size_t tau_hat = 0;
  ScanProfile profile;
};

// #{null < observed} / nsim
double p_value_below(const EmpiricalNull& null, double observed, const DetectOptions& opts = {});
// #{null > observed} / nsim
double p_value_above(const EmpiricalNull& null, double observed, const DetectOptions& opts = {});

// Throws ArgumentError on a series length mismatch and MismatchError when the
// null was generated for another statistic, margin b, or (for V) p-value
// policy. Messages list both parameter sets.
void check_null_matches(const EmpiricalNull& null, std::size_t series_length,
                        const ScanConfig& cfg);

// Minimizing statistics (V, TMinP).
DetectionOutcome detect_change_point(std::span<const double> x, const EmpiricalNull& null,
                                     const ScanConfig& cfg, const DetectOptions& opts = {});

// Maximizing statistics (Pettitt, PettittStd, TMaxAbs, GaussianLR).
DetectionOutcome detect_change_point_max(std::span<const double> x, const EmpiricalNull& null,
                                         const ScanConfig& cfg, const DetectOptions& opts = {});

// Picks one of the two above from the statistic's objective.
DetectionOutcome detect(std::span<const double> x, const EmpiricalNull& null,
                        const ScanConfig& cfg, const DetectOptions& opts = {});

}  // namespace cpscan
