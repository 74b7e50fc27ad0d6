#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cpscan/scan_stats.hpp"

namespace cpscan {

enum class GeneratorDist { StandardNormal, Uniform01 };

std::string_view dist_token(GeneratorDist d) noexcept;      // normal | uniform01
std::string_view policy_token(const PValuePolicy& p) noexcept;  // exact | refcompat

struct NullGenSpec {
  std::size_t n = 57;
  std::size_t b = 6;
  Statistic statistic = Statistic::MinPWMW;
  PValuePolicy policy = PValuePolicy::reference_compatible();
  std::size_t nsim = 100000;
  GeneratorDist generator_dist = GeneratorDist::StandardNormal;
  std::uint64_t master_seed = 0;

  friend bool operator==(const NullGenSpec&, const NullGenSpec&) = default;
};

// Sorted Monte Carlo sample of a scan statistic's extremum under H0.
struct EmpiricalNull {
  std::vector<double> values;
  NullGenSpec spec;
  Objective objective = Objective::Minimize;

  friend bool operator==(const EmpiricalNull&, const EmpiricalNull&) = default;
};

void validate(const NullGenSpec& spec);

// Replicate i draws its n observations from Stream(master_seed, {i}), so the
// output depends only on the spec, never on the worker count.
EmpiricalNull generate_null(const NullGenSpec& spec, unsigned threads = 0);

// Text format, UTF-8, LF line endings:
//   #cpscan-null v1
//   #statistic=<V|PETTITT|PETTITT_STD|TMAX|TMINP|LR> objective=<min|max>
//   #n=<int> b=<int> nsim=<int> dist=<normal|uniform01> policy=<exact|refcompat> seed=<uint64>
//   <nsim lines, one value each, %.17g, ascending>
void write_null(const EmpiricalNull& null, std::ostream& out);
EmpiricalNull read_null(std::istream& in, std::string_view source = "<stream>");

void save_null(const EmpiricalNull& null, const std::filesystem::path& path);
EmpiricalNull load_null(const std::filesystem::path& path);

// Header-only read: the spec and objective without the values.
EmpiricalNull load_null_header(const std::filesystem::path& path);

std::string describe(const NullGenSpec& spec);

}  // namespace cpscan
