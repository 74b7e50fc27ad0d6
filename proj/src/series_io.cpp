#include "cpscan/series_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "cpscan/errors.hpp"

namespace cpscan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

[[noreturn]] void line_error(std::string_view source, std::size_t line, const std::string& what) {
  throw FormatError(std::string(source) + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

SeriesFile read_series_csv(std::istream& in, std::string_view source) {
  SeriesFile out;
  std::string raw;
  std::size_t lineno = 0;
  bool first_content = true;
  bool warned_columns = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_cells(line);
    double v = 0.0;
    const bool numeric = parse_double(cells.front(), v);
    if (first_content) {
      first_content = false;
      if (!numeric) {
        out.had_header = true;
        if (cells.size() > 1 && !warned_columns) {
          out.warnings.push_back("input has " + std::to_string(cells.size()) +
                                 " columns; using the first");
          warned_columns = true;
        }
        continue;
      }
    }
    if (!numeric) line_error(source, lineno, "cannot parse '" + std::string(cells.front()) + "' as a number");
    if (!std::isfinite(v)) line_error(source, lineno, "value is not finite");
    if (cells.size() > 1 && !warned_columns) {
      out.warnings.push_back("input has " + std::to_string(cells.size()) +
                             " columns; using the first");
      warned_columns = true;
    }
    out.values.push_back(v);
  }
  if (out.values.empty()) throw FormatError(std::string(source) + ": no observations");
  return out;
}

SeriesFile load_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_series_csv(in, path.string());
}

void write_profile_csv(const ScanProfile& profile, std::ostream& out) {
  char buf[96];
  out << "tau,value\n";
  for (std::size_t i = 0; i < profile.taus.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", profile.taus[i], profile.values[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# extremum=%.17g tau_hat=%zu\n", profile.extremum_value,
                profile.tau_hat);
  out << buf;
}

ScanProfile read_profile_csv(std::istream& in, Objective objective, std::string_view source) {
  ScanProfile p;
  p.objective = objective;
  std::string raw;
  std::size_t lineno = 0;
  bool have_footer = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "tau,value") line_error(source, lineno, "expected header 'tau,value'");
      continue;
    }
    if (line.front() == '#') {
      double ext = 0.0;
      std::size_t tau_hat = 0;
      const std::string text(line);
      char ext_buf[64];
      if (std::sscanf(text.c_str(), "# extremum=%63s tau_hat=%zu", ext_buf, &tau_hat) != 2 ||
          !parse_double(ext_buf, ext)) {
        line_error(source, lineno, "malformed footer");
      }
      p.extremum_value = ext;
      p.tau_hat = tau_hat;
      have_footer = true;
      continue;
    }
    const auto cells = split_cells(line);
    double tau = 0.0;
    double v = 0.0;
    if (cells.size() != 2 || !parse_double(cells[0], tau) || !parse_double(cells[1], v)) {
      line_error(source, lineno, "expected 'tau,value'");
    }
    p.taus.push_back(static_cast<std::size_t>(tau));
    p.values.push_back(v);
  }
  if (!have_footer) throw FormatError(std::string(source) + ": missing '# extremum=' footer");
  for (const double v : p.values) p.has_infinite = p.has_infinite || std::isinf(v);
  return p;
}

}  // namespace cpscan
