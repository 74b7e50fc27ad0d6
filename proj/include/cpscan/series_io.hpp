#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cpscan/scan_stats.hpp"

namespace cpscan {

// Single-column CSV of observations. A first line whose first cell is not
// numeric is a header; blank lines and lines starting with '#' are skipped;
// with several columns the first is used and a warning is recorded.
struct SeriesFile {
  std::vector<double> values;
  bool had_header = false;
  std::vector<std::string> warnings;
};

SeriesFile read_series_csv(std::istream& in, std::string_view source = "<stream>");
SeriesFile load_series_csv(const std::filesystem::path& path);

// `tau,value` rows followed by `# extremum=<v> tau_hat=<t>`; %.17g numbers.
void write_profile_csv(const ScanProfile& profile, std::ostream& out);
ScanProfile read_profile_csv(std::istream& in, Objective objective,
                             std::string_view source = "<stream>");

}  // namespace cpscan
