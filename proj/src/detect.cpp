#include "cpscan/detect.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "cpscan/errors.hpp"

namespace cpscan {

namespace {

double ratio(std::size_t count, std::size_t total, const DetectOptions& opts) {
  if (opts.add_one) {
    return static_cast<double>(count + 1) / static_cast<double>(total + 1);
  }
  return static_cast<double>(count) / static_cast<double>(total);
}

std::string request_description(std::size_t n, const ScanConfig& cfg) {
  std::ostringstream ss;
  ss << "statistic=" << file_token(cfg.statistic) << " n=" << n << " b=" << cfg.b
     << " policy=" << policy_token(cfg.policy);
  return ss.str();
}

}  // namespace

double p_value_below(const EmpiricalNull& null, double observed, const DetectOptions& opts) {
  if (null.values.empty()) throw ArgumentError("empirical null is empty");
  const auto count = std::lower_bound(null.values.begin(), null.values.end(), observed) -
                     null.values.begin();
  return ratio(static_cast<std::size_t>(count), null.values.size(), opts);
}

double p_value_above(const EmpiricalNull& null, double observed, const DetectOptions& opts) {
  if (null.values.empty()) throw ArgumentError("empirical null is empty");
  const auto count = null.values.end() -
                     std::upper_bound(null.values.begin(), null.values.end(), observed);
  return ratio(static_cast<std::size_t>(count), null.values.size(), opts);
}

void check_null_matches(const EmpiricalNull& null, std::size_t series_length,
                        const ScanConfig& cfg) {
  const NullGenSpec& s = null.spec;
  const auto mismatch = [&](const char* what) {
    return "null/request mismatch (" + std::string(what) + "): null has " + describe(s) +
           "; request has " + request_description(series_length, cfg);
  };
  if (s.n != series_length) throw ArgumentError(mismatch("series length"));
  if (s.statistic != cfg.statistic) throw MismatchError(mismatch("statistic"));
  if (s.b != cfg.b) throw MismatchError(mismatch("boundary margin"));
  // only the WMW p-value scan depends on the exact/approximate switching rule
  if (cfg.statistic == Statistic::MinPWMW && !(s.policy == cfg.policy)) {
    throw MismatchError(mismatch("p-value policy"));
  }
  if (null.objective != objective_of(cfg.statistic)) {
    throw MismatchError(mismatch("objective"));
  }
}

DetectionOutcome detect_change_point(std::span<const double> x, const EmpiricalNull& null,
                                     const ScanConfig& cfg, const DetectOptions& opts) {
  if (objective_of(cfg.statistic) != Objective::Minimize) {
    throw ArgumentError("detect_change_point expects a minimizing statistic (V or TMINP)");
  }
  check_null_matches(null, x.size(), cfg);
  DetectionOutcome out;
  out.profile = scan(x, cfg);
  out.tau_hat = out.profile.tau_hat;
  out.p_value = p_value_below(null, out.profile.extremum_value, opts);
  return out;
}

DetectionOutcome detect_change_point_max(std::span<const double> x, const EmpiricalNull& null,
                                         const ScanConfig& cfg, const DetectOptions& opts) {
  if (objective_of(cfg.statistic) != Objective::Maximize) {
    throw ArgumentError("detect_change_point_max expects a maximizing statistic");
  }
  check_null_matches(null, x.size(), cfg);
  DetectionOutcome out;
  out.profile = scan(x, cfg);
  out.tau_hat = out.profile.tau_hat;
  out.p_value = p_value_above(null, out.profile.extremum_value, opts);
  return out;
}

DetectionOutcome detect(std::span<const double> x, const EmpiricalNull& null,
                        const ScanConfig& cfg, const DetectOptions& opts) {
  return objective_of(cfg.statistic) == Objective::Minimize
             ? detect_change_point(x, null, cfg, opts)
             : detect_change_point_max(x, null, cfg, opts);
}

}  // namespace cpscan
