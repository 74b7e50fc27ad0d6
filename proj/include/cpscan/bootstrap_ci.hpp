#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cpscan/rank_tests.hpp"

namespace cpscan {

enum class BootMethod {
  // resample both segments around the point estimate tau_hat
  Boot1,
  // resample around tau', drawn uniformly from {tau_hat-1, tau_hat, tau_hat+1}
  // for each replicate
  Boot2,
};

std::string_view method_token(BootMethod m) noexcept;  // boot1 | boot2
std::optional<BootMethod> method_from_token(std::string_view token) noexcept;

struct BootstrapSpec {
  std::size_t nboot = 1000;
  BootMethod method = BootMethod::Boot1;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t b = 6;
  PValuePolicy policy = PValuePolicy::reference_compatible();
};

struct BootstrapCI {
  BootMethod method = BootMethod::Boot1;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t tau_hat = 0;
  // change-point estimate of each replicate, in replicate order
  std::vector<std::size_t> replicate_estimates;

  double length() const noexcept { return upper - lower; }
  bool contains(double tau) const noexcept { return lower <= tau && tau <= upper; }
};

// Type-7 (linear interpolation) empirical quantile of an ascending sample:
// h = (m-1)p + 1, result = s[floor h] + (h - floor h)(s[floor h + 1] - s[floor h]),
// 1-based, with s[m+1] read as s[m].
double quantile_type7(std::span<const double> sorted, double p);

// Replicate r consumes Stream(seed, {r}). For Boot2 the tau' draw comes
// first, then the left-segment indices, then the right-segment indices.
// Replicates are independent, so the interval does not depend on `threads`.
BootstrapCI icboot1(std::span<const double> x, BootstrapSpec spec, unsigned threads = 1);
BootstrapCI icboot2(std::span<const double> x, BootstrapSpec spec, unsigned threads = 1);
BootstrapCI bootstrap_ci(std::span<const double> x, const BootstrapSpec& spec,
                         unsigned threads = 1);

}  // namespace cpscan
