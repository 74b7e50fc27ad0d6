#include "cpscan/sim_study.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "cpscan/detect.hpp"
#include "cpscan/errors.hpp"
#include "cpscan/parallel.hpp"

namespace cpscan {

namespace {

// Substream domain tags.
constexpr std::uint64_t kPowerTag = 0x706f776572ULL;     // "power"
constexpr std::uint64_t kAttemptTag = 0x6174746d70ULL;   // "attmp"
constexpr std::uint64_t kBootTag = 0x626f6f74ULL;        // "boot"

std::uint64_t param_key(double v) { return std::bit_cast<std::uint64_t>(v); }

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view family_token(H1Family f) noexcept {
  switch (f) {
    case H1Family::NormalShift:
      return "normal_shift";
    case H1Family::UniformShift:
      return "uniform_shift";
    case H1Family::ExponentialScale:
      return "exponential_scale";
  }
  return {};
}

std::optional<H1Family> family_from_token(std::string_view token) noexcept {
  for (const H1Family f :
       {H1Family::NormalShift, H1Family::UniformShift, H1Family::ExponentialScale}) {
    if (family_token(f) == token) return f;
  }
  return std::nullopt;
}

std::vector<double> arithmetic_grid(double from, double to, double by) {
  if (!(by > 0.0) || !(to >= from) || !std::isfinite(from) || !std::isfinite(to)) {
    throw ArgumentError("grid needs finite from <= to and by > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((to - from) / by + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    // snap 0.30000000000000004 and friends back to the decimal the user meant
    grid[i] = std::round((from + static_cast<double>(i) * by) * 1e12) / 1e12;
  }
  return grid;
}

std::vector<double> default_grid(H1Family f) {
  if (f == H1Family::ExponentialScale) return arithmetic_grid(1.0, 3.0, 0.25);
  return arithmetic_grid(0.0, 2.0, 0.1);
}

void validate(const H1Scenario& scn) {
  check_window(scn.n, scn.b);
  if (scn.tau < scn.b || scn.tau > scn.n - scn.b) {
    throw ArgumentError("tau=" + std::to_string(scn.tau) + " outside [b, n-b] = [" +
                        std::to_string(scn.b) + ", " + std::to_string(scn.n - scn.b) + "]");
  }
  if (scn.nsim2 < 1) throw ArgumentError("nsim2 must be >= 1");
  if (scn.param_grid.empty()) throw ArgumentError("parameter grid is empty");
  if (!(scn.alpha > 0.0 && scn.alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
  for (const double v : scn.param_grid) {
    if (!std::isfinite(v)) throw ArgumentError("parameter grid contains a non-finite value");
    if (scn.family == H1Family::ExponentialScale && !(v > 0.0)) {
      throw ArgumentError("exponential mean ratio must be positive");
    }
  }
}

std::vector<double> simulate_h1_series(const H1Scenario& scn, double param, Stream& stream) {
  std::vector<double> x(scn.n);
  for (std::size_t t = 0; t < scn.n; ++t) {
    const bool after = t >= scn.tau;
    switch (scn.family) {
      case H1Family::NormalShift:
        x[t] = stream.normal() + (after ? param : 0.0);
        break;
      case H1Family::UniformShift:
        x[t] = 4.0 * stream.uniform() + (after ? param : 0.0);
        break;
      case H1Family::ExponentialScale:
        x[t] = stream.exponential(after ? param : 1.0);
        break;
    }
  }
  return x;
}

PowerResult estimate_power(const H1Scenario& scn, const std::vector<Statistic>& statistics,
                           const NullBank& nulls, std::uint64_t seed, unsigned threads) {
  validate(scn);
  if (statistics.empty()) throw ArgumentError("no statistics requested");

  std::vector<ScanConfig> configs;
  std::vector<const EmpiricalNull*> bank;
  for (const Statistic s : statistics) {
    const auto it = nulls.find(s);
    if (it == nulls.end()) {
      throw MismatchError("missing null for statistic=" + std::string(file_token(s)) +
                          " n=" + std::to_string(scn.n) + " b=" + std::to_string(scn.b));
    }
    const ScanConfig cfg{scn.b, s, it->second.spec.policy};
    check_null_matches(it->second, scn.n, cfg);
    configs.push_back(cfg);
    bank.push_back(&it->second);
  }

  const std::size_t k_stats = statistics.size();
  PowerResult out;
  out.statistics = statistics;
  out.params = scn.param_grid;
  for (const double param : scn.param_grid) {
    std::vector<unsigned char> rejected(scn.nsim2 * k_stats, 0);
    parallel_for(scn.nsim2, threads, [&](std::size_t j) {
      Stream stream(seed, {kPowerTag, param_key(param), static_cast<std::uint64_t>(j)});
      const std::vector<double> x = simulate_h1_series(scn, param, stream);
      for (std::size_t k = 0; k < k_stats; ++k) {
        const ScanExtremum e = scan_extremum(x, configs[k]);
        const double p = bank[k]->objective == Objective::Minimize
                             ? p_value_below(*bank[k], e.value)
                             : p_value_above(*bank[k], e.value);
        rejected[j * k_stats + k] = p < scn.alpha ? 1 : 0;
      }
    });
    std::vector<double> row(k_stats, 0.0);
    for (std::size_t j = 0; j < scn.nsim2; ++j) {
      for (std::size_t k = 0; k < k_stats; ++k) row[k] += rejected[j * k_stats + k];
    }
    for (double& v : row) v /= static_cast<double>(scn.nsim2);
    out.power.push_back(std::move(row));
    out.rejected.push_back(std::move(rejected));
  }
  return out;
}

double paired_difference_se(const PowerResult& r, std::size_t i, std::size_t k1, std::size_t k2) {
  const std::size_t k_stats = r.statistics.size();
  if (i >= r.rejected.size() || k1 >= k_stats || k2 >= k_stats) {
    throw ArgumentError("paired_difference_se: index out of range");
  }
  const std::vector<unsigned char>& flags = r.rejected[i];
  const std::size_t m = flags.size() / k_stats;
  double only1 = 0.0;
  double only2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const bool a = flags[j * k_stats + k1] != 0;
    const bool b = flags[j * k_stats + k2] != 0;
    if (a && !b) only1 += 1.0;
    if (b && !a) only2 += 1.0;
  }
  const auto n = static_cast<double>(m);
  const double d = (only1 - only2) / n;
  return std::sqrt(std::max(0.0, (only1 + only2) / n - d * d) / n);
}

CoverageResult estimate_coverage(const H1Scenario& scn, const std::vector<BootMethod>& methods,
                                 const EmpiricalNull& null, std::uint64_t seed,
                                 const CoverageOptions& options, unsigned threads) {
  validate(scn);
  if (methods.empty()) throw ArgumentError("no CI methods requested");
  if (options.attempt_budget < 1) throw ArgumentError("attempt budget must be >= 1");
  const ScanConfig cfg{scn.b, Statistic::MinPWMW, null.spec.policy};
  check_null_matches(null, scn.n, cfg);

  CoverageResult out;
  out.methods = methods;
  const double true_tau = static_cast<double>(scn.tau);

  for (const double param : scn.param_grid) {
    const std::uint64_t key = param_key(param);

    // Rejection sampling. Attempts are evaluated in parallel batches but
    // accepted strictly in attempt order, so the accepted set is fixed by the
    // seed alone.
    std::vector<std::size_t> accepted_attempts;
    std::vector<std::vector<double>> accepted_series;
    std::vector<double> accepted_p;
    std::size_t next_attempt = 0;
    while (accepted_series.size() < scn.nsim2) {
      if (next_attempt >= options.attempt_budget) {
        throw BudgetExceededError(
            "coverage: only " + std::to_string(accepted_series.size()) + " of " +
            std::to_string(scn.nsim2) + " series detected after " +
            std::to_string(options.attempt_budget) + " attempts at parameter " +
            format_number(param, 10));
      }
      const std::size_t want = scn.nsim2 - accepted_series.size();
      const std::size_t batch = std::min(options.attempt_budget - next_attempt,
                                         std::max<std::size_t>(2 * want, 64));
      std::vector<std::vector<double>> xs(batch);
      std::vector<double> ps(batch);
      parallel_for(batch, threads, [&](std::size_t i) {
        const std::uint64_t attempt = next_attempt + i;
        Stream stream(seed, {kAttemptTag, key, attempt});
        xs[i] = simulate_h1_series(scn, param, stream);
        ps[i] = p_value_below(null, scan_extremum(xs[i], cfg).value);
      });
      for (std::size_t i = 0; i < batch && accepted_series.size() < scn.nsim2; ++i) {
        if (ps[i] <= scn.alpha) {
          accepted_attempts.push_back(next_attempt + i);
          accepted_series.push_back(std::move(xs[i]));
          accepted_p.push_back(ps[i]);
        }
      }
      next_attempt += batch;
    }

    CoverageCell cell;
    cell.param = param;
    cell.attempts = accepted_attempts.back() + 1;

    const std::size_t m = methods.size();
    const std::size_t count = accepted_series.size();
    std::vector<BootstrapCI> cis(count * m);
    parallel_for(count * m, threads, [&](std::size_t idx) {
      const std::size_t i = idx / m;
      const std::size_t k = idx % m;
      BootstrapSpec spec;
      spec.nboot = options.nboot;
      spec.method = methods[k];
      spec.alpha = options.ci_alpha;
      spec.b = scn.b;
      spec.policy = null.spec.policy;
      spec.seed = derive_seed(seed, {kBootTag, key, accepted_attempts[i],
                                     static_cast<std::uint64_t>(methods[k])});
      cis[idx] = bootstrap_ci(accepted_series[i], spec, 1);
    });

    for (std::size_t k = 0; k < m; ++k) {
      double covered = 0.0;
      double len_sum = 0.0;
      double len_sq = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        const BootstrapCI& ci = cis[i * m + k];
        if (ci.contains(true_tau)) covered += 1.0;
        len_sum += ci.length();
        len_sq += ci.length() * ci.length();
      }
      const auto nd = static_cast<double>(count);
      MethodCoverage mc;
      mc.method = methods[k];
      mc.coverage = covered / nd;
      mc.coverage_se = std::sqrt(mc.coverage * (1.0 - mc.coverage) / nd);
      mc.avg_length = len_sum / nd;
      mc.length_sd =
          count > 1 ? std::sqrt(std::max(0.0, (len_sq - nd * mc.avg_length * mc.avg_length) /
                                                  (nd - 1.0)))
                    : 0.0;
      cell.methods.push_back(mc);
    }
    if (options.keep_series) {
      cell.series = std::move(accepted_series);
      cell.detection_p = std::move(accepted_p);
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

StudyConfig parse_study_config(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");

  static const std::vector<std::string> known{
      "family", "tau",        "grid",     "n",              "b",     "nsim2",
      "alpha",  "statistics", "ci_methods", "seed", "attempt_budget", "nboot", "ci_alpha"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ArgumentError("config: unknown key '" + key + "'");
    }
  }

  StudyConfig cfg;
  try {
    const auto family = family_from_token(j.value("family", std::string("normal_shift")));
    if (!family) throw ArgumentError("config: unknown family '" + j["family"].get<std::string>() + "'");
    H1Scenario& scn = cfg.scenario;
    scn.family = *family;
    scn.tau = j.value("tau", std::size_t{20});
    scn.n = j.value("n", std::size_t{57});
    scn.b = j.value("b", std::size_t{6});
    scn.nsim2 = j.value("nsim2", std::size_t{1000});
    scn.alpha = j.value("alpha", 0.05);
    if (!j.contains("grid")) {
      scn.param_grid = default_grid(scn.family);
    } else if (j["grid"].is_array()) {
      scn.param_grid = j["grid"].get<std::vector<double>>();
    } else if (j["grid"].is_object()) {
      const auto& g = j["grid"];
      scn.param_grid = arithmetic_grid(g.at("from").get<double>(), g.at("to").get<double>(),
                                       g.at("by").get<double>());
    } else {
      throw ArgumentError("config: grid must be an array or {from, to, by}");
    }

    if (j.contains("statistics")) {
      cfg.statistics.clear();
      for (const auto& s : j["statistics"]) {
        const auto stat = statistic_from_cli_token(s.get<std::string>());
        if (!stat) throw ArgumentError("config: unknown statistic '" + s.get<std::string>() + "'");
        cfg.statistics.push_back(*stat);
      }
    }
    if (j.contains("ci_methods")) {
      cfg.ci_methods.clear();
      for (const auto& s : j["ci_methods"]) {
        const auto m = method_from_token(s.get<std::string>());
        if (!m) throw ArgumentError("config: unknown CI method '" + s.get<std::string>() + "'");
        cfg.ci_methods.push_back(*m);
      }
    }
    if (!j.contains("seed")) throw ArgumentError("config: 'seed' is required");
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.coverage.attempt_budget = j.value("attempt_budget", std::size_t{1000000});
    cfg.coverage.nboot = j.value("nboot", std::size_t{1000});
    cfg.coverage.ci_alpha = j.value("ci_alpha", 0.05);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  validate(cfg.scenario);
  if (cfg.coverage.nboot < 1) throw ArgumentError("config: nboot must be >= 1");
  if (!(cfg.coverage.ci_alpha > 0.0 && cfg.coverage.ci_alpha <= 1.0)) {
    throw ArgumentError("config: ci_alpha must lie in (0, 1]");
  }
  cfg.config_hash = fnv1a64(j.dump());
  return cfg;
}

void write_power_csv(const PowerResult& r, std::ostream& out, const std::string& manifest) {
  out << "# " << manifest << '\n';
  out << "param";
  for (const Statistic s : r.statistics) out << ",power_" << cli_token(s);
  out << '\n';
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    out << format_number(r.params[i], 12);
    for (const double p : r.power[i]) out << ',' << format_number(p, 17);
    out << '\n';
  }
}

void write_coverage_csv(const CoverageResult& r, std::ostream& out, const std::string& manifest) {
  out << "# " << manifest << '\n';
  out << "param,attempts";
  for (const BootMethod m : r.methods) {
    const auto t = method_token(m);
    out << ",coverage_" << t << ",coverage_se_" << t << ",avg_length_" << t << ",length_sd_"
        << t;
  }
  out << '\n';
  for (const CoverageCell& c : r.cells) {
    out << format_number(c.param, 12) << ',' << c.attempts;
    for (const MethodCoverage& mc : c.methods) {
      out << ',' << format_number(mc.coverage, 17) << ',' << format_number(mc.coverage_se, 17)
          << ',' << format_number(mc.avg_length, 17) << ',' << format_number(mc.length_sd, 17);
    }
    out << '\n';
  }
}

}  // namespace cpscan
