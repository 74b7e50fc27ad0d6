#include "cpscan/null_mc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cpscan/errors.hpp"
#include "cpscan/parallel.hpp"
#include "cpscan/random.hpp"

namespace cpscan {

namespace {

constexpr std::string_view kMagic = "#cpscan-null v1";

[[noreturn]] void format_error(std::string_view source, std::size_t line, const std::string& what) {
  throw FormatError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Splits "#k1=v1 k2=v2" into a map; rejects duplicates and malformed pairs.
std::map<std::string, std::string> parse_fields(std::string_view text, std::string_view source,
                                                std::size_t line) {
  if (text.empty() || text.front() != '#') format_error(source, line, "expected '#' header line");
  text.remove_prefix(1);
  std::map<std::string, std::string> fields;
  std::istringstream ss{std::string(text)};
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
      format_error(source, line, "malformed field '" + token + "'");
    }
    if (!fields.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
      format_error(source, line, "duplicate field '" + token.substr(0, eq) + "'");
    }
  }
  return fields;
}

const std::string& field(const std::map<std::string, std::string>& fields, const std::string& key,
                         std::string_view source, std::size_t line) {
  const auto it = fields.find(key);
  if (it == fields.end()) format_error(source, line, "missing field '" + key + "'");
  return it->second;
}

template <typename Int>
Int parse_int(const std::string& text, std::string_view source, std::size_t line,
              std::string_view key) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    format_error(source, line, "field '" + std::string(key) + "' is not a valid integer");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

EmpiricalNull read_null_impl(std::istream& in, std::string_view source, bool header_only) {
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    strip_cr(line);
    return true;
  };

  if (!next_line() || line != kMagic) format_error(source, 1, "missing '#cpscan-null v1' header");

  EmpiricalNull out;
  if (!next_line()) format_error(source, 2, "missing statistic header");
  {
    const auto f = parse_fields(line, source, lineno);
    const auto stat = statistic_from_file_token(field(f, "statistic", source, lineno));
    if (!stat) format_error(source, lineno, "unknown statistic '" + f.at("statistic") + "'");
    const std::string& obj = field(f, "objective", source, lineno);
    if (obj != "min" && obj != "max") {
      format_error(source, lineno, "objective must be 'min' or 'max'");
    }
    out.spec.statistic = *stat;
    out.objective = obj == "min" ? Objective::Minimize : Objective::Maximize;
    if (out.objective != objective_of(*stat)) {
      format_error(source, lineno,
                   "objective '" + obj + "' inconsistent with statistic " +
                       std::string(file_token(*stat)));
    }
  }

  if (!next_line()) format_error(source, 3, "missing parameter header");
  {
    const auto f = parse_fields(line, source, lineno);
    out.spec.n = parse_int<std::size_t>(field(f, "n", source, lineno), source, lineno, "n");
    out.spec.b = parse_int<std::size_t>(field(f, "b", source, lineno), source, lineno, "b");
    out.spec.nsim =
        parse_int<std::size_t>(field(f, "nsim", source, lineno), source, lineno, "nsim");
    out.spec.master_seed =
        parse_int<std::uint64_t>(field(f, "seed", source, lineno), source, lineno, "seed");
    const std::string& dist = field(f, "dist", source, lineno);
    if (dist == "normal") {
      out.spec.generator_dist = GeneratorDist::StandardNormal;
    } else if (dist == "uniform01") {
      out.spec.generator_dist = GeneratorDist::Uniform01;
    } else {
      format_error(source, lineno, "unknown dist '" + dist + "'");
    }
    const std::string& policy = field(f, "policy", source, lineno);
    if (policy == "exact") {
      out.spec.policy = PValuePolicy::exact_when_no_ties();
    } else if (policy == "refcompat") {
      out.spec.policy = PValuePolicy::reference_compatible();
    } else {
      format_error(source, lineno, "unknown policy '" + policy + "'");
    }
    if (out.spec.nsim < 1) format_error(source, lineno, "nsim must be >= 1");
    if (out.spec.b < 1 || out.spec.n < 2 * out.spec.b) {
      format_error(source, lineno, "series length must be ≥ 2b");
    }
  }
  if (header_only) return out;

  out.values.reserve(out.spec.nsim);
  while (next_line()) {
    if (line.empty()) format_error(source, lineno, "blank line in value section");
    if (out.values.size() == out.spec.nsim) {
      format_error(source, lineno,
                   "more values than declared nsim=" + std::to_string(out.spec.nsim));
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size() || std::isnan(v)) {
      format_error(source, lineno, "unparseable value '" + line + "'");
    }
    if (!out.values.empty() && v < out.values.back()) {
      format_error(source, lineno, "values are not sorted ascending");
    }
    out.values.push_back(v);
  }
  if (out.values.size() != out.spec.nsim) {
    format_error(source, lineno + 1,
                 "found " + std::to_string(out.values.size()) + " values, header declares nsim=" +
                     std::to_string(out.spec.nsim));
  }
  return out;
}

}  // namespace

std::string_view dist_token(GeneratorDist d) noexcept {
  return d == GeneratorDist::StandardNormal ? "normal" : "uniform01";
}

std::string_view policy_token(const PValuePolicy& p) noexcept {
  return p.mode == PValueMode::ExactWhenNoTies ? "exact" : "refcompat";
}

std::string describe(const NullGenSpec& spec) {
  std::ostringstream ss;
  ss << "statistic=" << file_token(spec.statistic) << " n=" << spec.n << " b=" << spec.b
     << " nsim=" << spec.nsim << " dist=" << dist_token(spec.generator_dist)
     << " policy=" << policy_token(spec.policy) << " seed=" << spec.master_seed;
  return ss.str();
}

void validate(const NullGenSpec& spec) {
  check_window(spec.n, spec.b);
  if (spec.nsim < 1) throw ArgumentError("nsim must be >= 1");
  if ((spec.statistic == Statistic::TMaxAbs || spec.statistic == Statistic::TMinP) &&
      spec.b < 2) {
    throw ArgumentError("t scans need b >= 2");
  }
}

EmpiricalNull generate_null(const NullGenSpec& spec, unsigned threads) {
  validate(spec);
  EmpiricalNull out;
  out.spec = spec;
  out.objective = objective_of(spec.statistic);
  out.values.resize(spec.nsim);

  const ScanConfig cfg{spec.b, spec.statistic, spec.policy};
  parallel_for(spec.nsim, threads, [&](std::size_t i) {
    Stream stream(spec.master_seed, {static_cast<std::uint64_t>(i)});
    std::vector<double> x(spec.n);
    if (spec.generator_dist == GeneratorDist::StandardNormal) {
      for (double& v : x) v = stream.normal();
    } else {
      for (double& v : x) v = stream.uniform();
    }
    out.values[i] = scan_extremum(x, cfg).value;
  });
  std::sort(out.values.begin(), out.values.end());
  return out;
}

void write_null(const EmpiricalNull& null, std::ostream& out) {
  if (null.values.size() != null.spec.nsim) {
    throw ArgumentError("null has " + std::to_string(null.values.size()) +
                        " values but spec.nsim=" + std::to_string(null.spec.nsim));
  }
  if (null.spec.policy.exact_size_cutoff != 49) {
    throw ArgumentError("null files only record the default exact-size cutoff (49)");
  }
  out << kMagic << '\n';
  out << "#statistic=" << file_token(null.spec.statistic)
      << " objective=" << (null.objective == Objective::Minimize ? "min" : "max") << '\n';
  out << "#n=" << null.spec.n << " b=" << null.spec.b << " nsim=" << null.spec.nsim
      << " dist=" << dist_token(null.spec.generator_dist)
      << " policy=" << policy_token(null.spec.policy) << " seed=" << null.spec.master_seed
      << '\n';
  char buf[64];
  for (const double v : null.values) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out.write(buf, len);
  }
}

EmpiricalNull read_null(std::istream& in, std::string_view source) {
  return read_null_impl(in, source, false);
}

void save_null(const EmpiricalNull& null, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_null(null, out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

EmpiricalNull load_null(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_null_impl(in, path.string(), false);
}

EmpiricalNull load_null_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_null_impl(in, path.string(), true);
}

}  // namespace cpscan
