#pragma once

// Test-only oracles. Nothing here calls into the library's ranking, exact
// distribution or quadrature-free special functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oracle {

// U as a direct pairwise count, ties 1/2.
inline double pairwise_u(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (const double ai : a) {
    for (const double bj : b) {
      if (ai > bj) u += 1.0;
      else if (ai == bj) u += 0.5;
    }
  }
  return u;
}

// Counts of U = 0..n1*n2 over all C(n1+n2, n1) assignments of ranks
// 1..n1+n2 to the first sample (bitmask enumeration).
inline std::vector<std::uint64_t> enumerate_u_counts(int n1, int n2) {
  const int total = n1 + n2;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n1 * n2) + 1, 0);
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (__builtin_popcount(mask) != n1) continue;
    // U = sum over first-sample ranks r of (#second-sample ranks below r)
    int u = 0;
    int below_second = 0;
    for (int r = 0; r < total; ++r) {
      if (mask & (1u << r)) u += below_second;
      else ++below_second;
    }
    ++counts[static_cast<std::size_t>(u)];
  }
  return counts;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Exact two-sided p-value by enumeration: min(1, 2 min(P(U<=u), P(U>=u))).
inline double enumerated_p(int n1, int n2, int u) {
  const auto counts = enumerate_u_counts(n1, n2);
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t all = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    all += counts[k];
    if (static_cast<int>(k) <= u) lo += counts[k];
    if (static_cast<int>(k) >= u) hi += counts[k];
  }
  const double p = 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(all);
  return std::min(1.0, p);
}

// Composite Simpson rule on [a, b] with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double t_density(double x, double df) {
  const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                   std::sqrt(df * M_PI);
  return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
}

// P(|T| >= |t|) by quadrature: 1 - 2 * integral_0^|t| density.
inline double t_two_sided_by_quadrature(double t, double df) {
  const double inner = simpson([df](double x) { return t_density(x, df); }, 0.0, std::fabs(t), 20000);
  return 1.0 - 2.0 * inner;
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

// Random tie-free sample of size n (continuous draws).
inline std::vector<double> random_sample(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Random sample on a small integer grid, so ties are common.
inline std::vector<double> random_tied_sample(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> dist(0, levels - 1);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace oracle
