#include "cpscan/bootstrap_ci.hpp"

#include <algorithm>
#include <cmath>

#include "cpscan/errors.hpp"
#include "cpscan/parallel.hpp"
#include "cpscan/random.hpp"
#include "cpscan/scan_stats.hpp"

namespace cpscan {

namespace {

void check_spec(std::span<const double> x, const BootstrapSpec& spec) {
  check_window(x.size(), spec.b);
  if (spec.nboot < 1) throw ArgumentError("nboot must be >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
}

// Fills out[offset .. offset+len) with draws (with replacement) from
// x[from .. from+len).
void resample_segment(std::span<const double> x, std::size_t from, std::size_t len,
                      Stream& stream, std::vector<double>& out, std::size_t offset) {
  for (std::size_t k = 0; k < len; ++k) out[offset + k] = x[from + stream.index(len)];
}

BootstrapCI run(std::span<const double> x, const BootstrapSpec& spec, unsigned threads) {
  check_spec(x, spec);
  const std::size_t n = x.size();
  const std::size_t tau_hat = scan_wmw_pvalues(x, spec.b, spec.policy).tau_hat;
  if (spec.method == BootMethod::Boot2 && (tau_hat < 2 || tau_hat + 1 > n - 1)) {
    throw ArgumentError("Boot2 needs 2 <= tau_hat <= n-2 (use b >= 2)");
  }

  BootstrapCI ci;
  ci.method = spec.method;
  ci.tau_hat = tau_hat;
  ci.replicate_estimates.resize(spec.nboot);

  parallel_for(spec.nboot, threads, [&](std::size_t r) {
    Stream stream(spec.seed, {static_cast<std::uint64_t>(r)});
    std::size_t split = tau_hat;
    if (spec.method == BootMethod::Boot2) split = tau_hat - 1 + stream.index(3);
    std::vector<double> y(n);
    resample_segment(x, 0, split, stream, y, 0);
    resample_segment(x, split, n - split, stream, y, split);
    ci.replicate_estimates[r] = scan_wmw_pvalues(y, spec.b, spec.policy).tau_hat;
  });

  std::vector<double> sorted(ci.replicate_estimates.begin(), ci.replicate_estimates.end());
  std::sort(sorted.begin(), sorted.end());
  ci.lower = quantile_type7(sorted, spec.alpha / 2.0);
  ci.upper = quantile_type7(sorted, 1.0 - spec.alpha / 2.0);
  return ci;
}

}  // namespace

std::string_view method_token(BootMethod m) noexcept {
  return m == BootMethod::Boot1 ? "boot1" : "boot2";
}

std::optional<BootMethod> method_from_token(std::string_view token) noexcept {
  if (token == "boot1") return BootMethod::Boot1;
  if (token == "boot2") return BootMethod::Boot2;
  return std::nullopt;
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  const std::size_t m = sorted.size();
  const double h = static_cast<double>(m - 1) * p;  // 0-based position
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  const std::size_t hi = std::min(lo + 1, m - 1);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCI icboot1(std::span<const double> x, BootstrapSpec spec, unsigned threads) {
  spec.method = BootMethod::Boot1;
  return run(x, spec, threads);
}

BootstrapCI icboot2(std::span<const double> x, BootstrapSpec spec, unsigned threads) {
  spec.method = BootMethod::Boot2;
  return run(x, spec, threads);
}

BootstrapCI bootstrap_ci(std::span<const double> x, const BootstrapSpec& spec,
                         unsigned threads) {
  return run(x, spec, threads);
}

}  // namespace cpscan
