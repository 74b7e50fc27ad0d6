#include "cpscan/rank_tests.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <utility>

#include "cpscan/errors.hpp"
#include "cpscan/special_functions.hpp"

namespace cpscan {

namespace {

void require_sample(std::span<const double> s, const char* name) {
  if (s.empty()) {
    throw ArgumentError(std::string("sample '") + name + "' is empty");
  }
  for (const double v : s) {
    if (!std::isfinite(v)) {
      throw ArgumentError(std::string("sample '") + name + "' contains a non-finite value");
    }
  }
}

}  // namespace

Ranking rank_with_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  Ranking out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 share the midrank of ranks i+1..j
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = midrank;
    const auto t = static_cast<double>(j - i);
    if (j - i > 1) out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

UStatistic mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  require_sample(a, "a");
  require_sample(b, "b");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranking r = rank_with_ties(pooled);
  const double rank_sum = std::accumulate(r.ranks.begin(), r.ranks.begin() + a.size(), 0.0);
  const auto n1 = static_cast<double>(a.size());
  return {rank_sum - n1 * (n1 + 1.0) / 2.0, a.size(), b.size()};
}

UMoments moments_of_u_from_tie_term(std::size_t n1, std::size_t n2, double tie_term) {
  if (n1 == 0 || n2 == 0) throw ArgumentError("moments_of_u: sizes must be positive");
  const auto a = static_cast<double>(n1);
  const auto b = static_cast<double>(n2);
  const double big_n = a + b;
  const double var = a * b / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  return {a * b / 2.0, std::sqrt(std::max(0.0, var))};
}

UMoments moments_of_u(std::size_t n1, std::size_t n2,
                      std::span<const std::size_t> tie_group_sizes) {
  double tie_term = 0.0;
  std::size_t covered = 0;
  for (const std::size_t t : tie_group_sizes) {
    const auto td = static_cast<double>(t);
    tie_term += td * td * td - td;
    covered += t;
  }
  if (covered > n1 + n2) {
    throw ArgumentError("moments_of_u: tie groups cover more than n1 + n2 values");
  }
  return moments_of_u_from_tie_term(n1, n2, tie_term);
}

UDistribution::UDistribution(std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2) {
  if (n1 == 0 || n2 == 0) throw ArgumentError("UDistribution: sizes must be positive");
  // U(m, k) and U(k, m) share one distribution; run the DP over the smaller
  // size. Probability recurrence (the largest pooled value belongs to the
  // first sample with probability i/(i+j)):
  //   p(u; i, j) = i/(i+j) p(u - j; i-1, j) + j/(i+j) p(u; i, j-1)
  const std::size_t m = std::min(n1, n2);
  const std::size_t k = std::max(n1, n2);

  std::vector<std::vector<double>> prev(k + 1, std::vector<double>{1.0});
  std::vector<std::vector<double>> cur(k + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0].assign(1, 1.0);
    for (std::size_t j = 1; j <= k; ++j) {
      const double wa = static_cast<double>(i) / static_cast<double>(i + j);
      const double wb = 1.0 - wa;
      const std::vector<double>& from_a = prev[j];     // (i-1, j), length (i-1)j+1
      const std::vector<double>& from_b = cur[j - 1];  // (i, j-1), length i(j-1)+1
      std::vector<double> dist(i * j + 1, 0.0);
      for (std::size_t u = 0; u < from_a.size(); ++u) dist[u + j] += wa * from_a[u];
      for (std::size_t u = 0; u < from_b.size(); ++u) dist[u] += wb * from_b[u];
      cur[j] = std::move(dist);
    }
    std::swap(prev, cur);
  }
  pmf_ = std::move(prev[k]);

  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
}

double UDistribution::lower(long u) const noexcept {
  if (u < 0) return 0.0;
  if (static_cast<std::size_t>(u) >= cdf_.size()) return 1.0;
  return std::min(1.0, cdf_[static_cast<std::size_t>(u)]);
}

double UDistribution::upper(long u) const noexcept {
  return lower(static_cast<long>(max_u()) - u);
}

double UDistribution::p_two_sided(long u) const noexcept {
  return std::min(1.0, 2.0 * std::min(lower(u), upper(u)));
}

namespace {

class UDistributionCache {
 public:
  std::shared_ptr<const UDistribution> get(std::size_t n1, std::size_t n2) {
    const auto key = std::minmax(n1, n2);
    {
      std::shared_lock lock(mutex_);
      if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    }
    auto fresh = std::make_shared<const UDistribution>(key.first, key.second);
    std::unique_lock lock(mutex_);
    return tables_.try_emplace(key, std::move(fresh)).first->second;
  }

 private:
  std::shared_mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const UDistribution>> tables_;
};

UDistributionCache& cache() {
  static UDistributionCache instance;
  return instance;
}

}  // namespace

std::shared_ptr<const UDistribution> exact_u_distribution(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw ArgumentError("exact_u_distribution: sizes must be positive");
  return cache().get(n1, n2);
}

std::vector<double> exact_u_cdf(std::size_t n1, std::size_t n2) {
  return exact_u_distribution(n1, n2)->cdf();
}

double wmw_p_from_u(double u, std::size_t n1, std::size_t n2, double tie_term,
                    const PValuePolicy& policy) {
  if (policy.use_exact(n1, n2, tie_term > 0.0)) {
    return exact_u_distribution(n1, n2)->p_two_sided(std::lround(u));
  }
  const UMoments m = moments_of_u_from_tie_term(n1, n2, tie_term);
  if (m.sd <= 0.0) return 1.0;
  const double d = u - m.mean;
  const double correction = d > 0.0 ? 0.5 : (d < 0.0 ? -0.5 : 0.0);
  const double z = (d - correction) / m.sd;
  return std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
}

double wmw_p_two_sided(std::span<const double> a, std::span<const double> b,
                       const PValuePolicy& policy) {
  require_sample(a, "a");
  require_sample(b, "b");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranking r = rank_with_ties(pooled);
  const double rank_sum = std::accumulate(r.ranks.begin(), r.ranks.begin() + a.size(), 0.0);
  const auto n1 = static_cast<double>(a.size());
  const double u = rank_sum - n1 * (n1 + 1.0) / 2.0;
  return wmw_p_from_u(u, a.size(), b.size(), r.tie_term, policy);
}

TTestResult t_from_summaries(std::size_t n1, double mean1, double ss1, std::size_t n2,
                             double mean2, double ss2) {
  if (n1 == 0 || n2 == 0 || n1 + n2 < 3) {
    throw ArgumentError("t-test: need nonempty samples with n1 + n2 >= 3");
  }
  const double df = static_cast<double>(n1 + n2 - 2);
  const double pooled_var = (ss1 + ss2) / df;
  if (!(pooled_var > 0.0)) {
    if (mean1 == mean2) return {0.0, 1.0};
    return {mean1 > mean2 ? HUGE_VAL : -HUGE_VAL, 0.0};
  }
  const double se =
      std::sqrt(pooled_var * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  const double t = (mean1 - mean2) / se;
  return {t, student_t_two_sided(t, df)};
}

TTestResult t_two_sample(std::span<const double> a, std::span<const double> b) {
  require_sample(a, "a");
  require_sample(b, "b");
  auto summary = [](std::span<const double> s) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double ss = 0.0;
    for (const double v : s) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss};
  };
  const auto [m1, ss1] = summary(a);
  const auto [m2, ss2] = summary(b);
  return t_from_summaries(a.size(), m1, ss1, b.size(), m2, ss2);
}

}  // namespace cpscan
