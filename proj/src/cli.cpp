#include "cpscan/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpscan/bootstrap_ci.hpp"
#include "cpscan/detect.hpp"
#include "cpscan/errors.hpp"
#include "cpscan/null_mc.hpp"
#include "cpscan/series_io.hpp"
#include "cpscan/sim_study.hpp"

namespace cpscan {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Statistic parse_stat(const std::string& token) {
  const auto s = statistic_from_cli_token(token);
  if (!s) {
    throw ArgumentError("unknown statistic '" + token +
                        "' (expected v, pettitt, pettitt-std, tmax, tminp, lr)");
  }
  return *s;
}

PValuePolicy parse_policy(const std::string& token) {
  if (token == "exact") return PValuePolicy::exact_when_no_ties();
  if (token == "refcompat") return PValuePolicy::reference_compatible();
  throw ArgumentError("unknown policy '" + token + "' (expected exact or refcompat)");
}

GeneratorDist parse_dist(const std::string& token) {
  if (token == "normal") return GeneratorDist::StandardNormal;
  if (token == "uniform01") return GeneratorDist::Uniform01;
  throw ArgumentError("unknown dist '" + token + "' (expected normal or uniform01)");
}

std::vector<double> read_input_series(const std::string& path, std::ostream& err) {
  SeriesFile file = load_series_csv(path);
  for (const auto& w : file.warnings) err << "warning: " << path << ": " << w << '\n';
  return std::move(file.values);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Looks up a null for every (statistic, n, b) in `dir`; files that do not
// parse as nulls are skipped. The first file in name order
// wins when several match.
NullBank load_null_bank(const std::string& dir, const std::vector<Statistic>& wanted,
                        std::size_t n, std::size_t b) {
  if (!fs::is_directory(dir)) throw IoError("null directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  NullBank bank;
  std::vector<std::string> missing;
  for (const Statistic s : wanted) {
    bool found = false;
    for (const auto& f : files) {
      EmpiricalNull header;
      try {
        header = load_null_header(f);
      } catch (const FormatError&) {
        continue;
      }
      if (header.spec.statistic == s && header.spec.n == n && header.spec.b == b) {
        bank.emplace(s, load_null(f));
        found = true;
        break;
      }
    }
    if (!found) {
      missing.push_back("(statistic=" + std::string(file_token(s)) + ", n=" + std::to_string(n) +
                        ", b=" + std::to_string(b) + ")");
    }
  }
  if (!missing.empty()) {
    std::string msg = "no null file in '" + dir + "' for";
    for (const auto& m : missing) msg += " " + m;
    throw MismatchError(msg);
  }
  return bank;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

struct NullArgs {
  std::string stat = "v";
  std::size_t n = 0;
  std::size_t b = 6;
  std::size_t nsim = 100000;
  std::string dist = "normal";
  std::string policy = "refcompat";
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
};

struct ScanArgs {
  std::string input;
  std::string stat = "v";
  std::size_t b = 6;
  std::string policy = "refcompat";
  std::string out;
};

struct DetectArgs {
  std::string input;
  std::string null_path;
  std::string ci = "none";
  std::size_t nboot = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool add_one = false;
  unsigned threads = 0;
};

struct StudyArgs {
  std::string config;
  std::string null_dir;
  std::string out;
  unsigned threads = 0;
};

int cmd_null(const NullArgs& a, std::ostream& out) {
  NullGenSpec spec;
  spec.statistic = parse_stat(a.stat);
  spec.n = a.n;
  spec.b = a.b;
  spec.nsim = a.nsim;
  spec.generator_dist = parse_dist(a.dist);
  spec.policy = parse_policy(a.policy);
  spec.master_seed = a.seed;
  validate(spec);

  const auto start = std::chrono::steady_clock::now();
  const EmpiricalNull null = generate_null(spec, a.threads);
  save_null(null, a.out);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", elapsed);
  out << "null statistic=" << file_token(spec.statistic) << " n=" << spec.n << " b=" << spec.b
      << " nsim=" << spec.nsim << " elapsed=" << buf << "s -> " << a.out << '\n';
  return kExitOk;
}

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  const ScanConfig cfg{a.b, parse_stat(a.stat), parse_policy(a.policy)};
  const std::vector<double> x = read_input_series(a.input, err);
  const ScanProfile profile = scan(x, cfg);
  if (profile.has_infinite) {
    err << "warning: profile contains infinite values (degenerate within-segment spread)\n";
  }
  std::ostringstream text;
  write_profile_csv(profile, text);
  write_output(a.out, text.str(), out);
  return kExitOk;
}

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<BootMethod> method;
  if (a.ci != "none") {
    method = method_from_token(a.ci);
    if (!method) throw ArgumentError("unknown --ci '" + a.ci + "' (expected none, boot1, boot2)");
    if (!a.seed_given) throw ArgumentError("--seed is required when --ci is set");
  }
  const std::vector<double> x = read_input_series(a.input, err);
  const EmpiricalNull null = load_null(a.null_path);
  const ScanConfig cfg{null.spec.b, null.spec.statistic, null.spec.policy};
  const DetectionOutcome outcome = detect(x, null, cfg, DetectOptions{a.add_one});

  std::ostringstream json;
  json << "{\"p_value\": " << fmt17(outcome.p_value) << ", \"tau_hat\": " << outcome.tau_hat
       << ", \"n\": " << x.size() << ", \"b\": " << cfg.b << ", \"statistic\": \""
       << file_token(cfg.statistic) << "\", \"ci\": ";
  if (method) {
    BootstrapSpec spec;
    spec.nboot = a.nboot;
    spec.method = *method;
    spec.alpha = a.alpha;
    spec.seed = a.seed;
    spec.b = cfg.b;
    spec.policy = cfg.policy;
    const BootstrapCI ci = bootstrap_ci(x, spec, a.threads);
    json << "{\"method\": \"" << method_token(*method) << "\", \"lower\": " << fmt17(ci.lower)
         << ", \"upper\": " << fmt17(ci.upper) << "}";
  } else {
    json << "null";
  }
  json << "}\n";
  out << json.str();
  return kExitOk;
}

int cmd_power(const StudyArgs& a, std::ostream& out) {
  const StudyConfig cfg = parse_study_config(read_text_file(a.config));
  const NullBank bank =
      load_null_bank(a.null_dir, cfg.statistics, cfg.scenario.n, cfg.scenario.b);
  const PowerResult r = estimate_power(cfg.scenario, cfg.statistics, bank, cfg.seed, a.threads);
  std::ostringstream text;
  write_power_csv(r, text,
                  "cpscan-power v1 seed=" + std::to_string(cfg.seed) +
                      " config_hash=" + hex64(cfg.config_hash) + " family=" +
                      std::string(family_token(cfg.scenario.family)) +
                      " tau=" + std::to_string(cfg.scenario.tau) +
                      " nsim2=" + std::to_string(cfg.scenario.nsim2));
  write_output(a.out, text.str(), out);
  return kExitOk;
}

int cmd_coverage(const StudyArgs& a, std::ostream& out) {
  const StudyConfig cfg = parse_study_config(read_text_file(a.config));
  const NullBank bank =
      load_null_bank(a.null_dir, {Statistic::MinPWMW}, cfg.scenario.n, cfg.scenario.b);
  const CoverageResult r = estimate_coverage(cfg.scenario, cfg.ci_methods,
                                             bank.at(Statistic::MinPWMW), cfg.seed,
                                             cfg.coverage, a.threads);
  std::ostringstream text;
  write_coverage_csv(r, text,
                     "cpscan-coverage v1 seed=" + std::to_string(cfg.seed) +
                         " config_hash=" + hex64(cfg.config_hash) + " family=" +
                         std::string(family_token(cfg.scenario.family)) +
                         " tau=" + std::to_string(cfg.scenario.tau) +
                         " nsim2=" + std::to_string(cfg.scenario.nsim2) +
                         " nboot=" + std::to_string(cfg.coverage.nboot));
  write_output(a.out, text.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point detection by minimum WMW p-value scans", "cpscan"};
  app.require_subcommand(1);

  NullArgs null_args;
  auto* null_cmd = app.add_subcommand("null", "Generate a Monte Carlo null distribution file");
  null_cmd->add_option("--stat", null_args.stat, "v|pettitt|pettitt-std|tmax|tminp|lr")
      ->capture_default_str();
  null_cmd->add_option("--n", null_args.n, "Series length")->required();
  null_cmd->add_option("--b", null_args.b, "Boundary margin")->capture_default_str();
  null_cmd->add_option("--nsim", null_args.nsim, "Monte Carlo replicates")->capture_default_str();
  null_cmd->add_option("--dist", null_args.dist, "normal|uniform01")->capture_default_str();
  null_cmd->add_option("--policy", null_args.policy, "exact|refcompat")->capture_default_str();
  null_cmd->add_option("--seed", null_args.seed, "Master seed")->required();
  null_cmd->add_option("--out", null_args.out, "Output null file")->required();
  null_cmd->add_option("--threads", null_args.threads, "Workers (0 = all cores)");

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Write the per-tau scan profile as CSV");
  scan_cmd->add_option("--input", scan_args.input, "Series CSV")->required();
  scan_cmd->add_option("--stat", scan_args.stat)->capture_default_str();
  scan_cmd->add_option("--b", scan_args.b)->capture_default_str();
  scan_cmd->add_option("--policy", scan_args.policy)->capture_default_str();
  scan_cmd->add_option("--out", scan_args.out, "Output CSV (default stdout)");

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "Test for a change-point against a null file");
  detect_cmd->add_option("--input", detect_args.input, "Series CSV")->required();
  detect_cmd->add_option("--null", detect_args.null_path, "Null file")->required();
  detect_cmd->add_option("--ci", detect_args.ci, "none|boot1|boot2")->capture_default_str();
  detect_cmd->add_option("--nboot", detect_args.nboot)->capture_default_str();
  detect_cmd->add_option("--alpha", detect_args.alpha, "CI level is 1 - alpha")
      ->capture_default_str();
  auto* seed_opt = detect_cmd->add_option("--seed", detect_args.seed, "Bootstrap seed");
  detect_cmd->add_flag("--add-one", detect_args.add_one, "Use (count+1)/(nsim+1)");
  detect_cmd->add_option("--threads", detect_args.threads);

  StudyArgs power_args;
  auto* power_cmd = app.add_subcommand("power", "Power study over a parameter grid");
  power_cmd->add_option("--config", power_args.config, "Study JSON")->required();
  power_cmd->add_option("--null-dir", power_args.null_dir, "Directory of null files")->required();
  power_cmd->add_option("--out", power_args.out, "Output CSV (default stdout)");
  power_cmd->add_option("--threads", power_args.threads);

  StudyArgs coverage_args;
  auto* coverage_cmd = app.add_subcommand("coverage", "Bootstrap CI coverage study");
  coverage_cmd->add_option("--config", coverage_args.config, "Study JSON")->required();
  coverage_cmd->add_option("--null-dir", coverage_args.null_dir, "Directory of null files")
      ->required();
  coverage_cmd->add_option("--out", coverage_args.out, "Output CSV (default stdout)");
  coverage_cmd->add_option("--threads", coverage_args.threads);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (null_cmd->parsed()) return cmd_null(null_args, out);
    if (scan_cmd->parsed()) return cmd_scan(scan_args, out, err);
    if (detect_cmd->parsed()) {
      detect_args.seed_given = seed_opt->count() > 0;
      return cmd_detect(detect_args, out, err);
    }
    if (power_cmd->parsed()) return cmd_power(power_args, out);
    if (coverage_cmd->parsed()) return cmd_coverage(coverage_args, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceededError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace cpscan
