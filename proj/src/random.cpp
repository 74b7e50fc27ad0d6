#include "cpscan/random.hpp"

#include <cmath>

#include "cpscan/errors.hpp"
#include "cpscan/special_functions.hpp"

namespace cpscan {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
  for (const std::uint64_t k : path) {
    h = mix64(h ^ mix64(k + 0xD1B54A32D192ED03ULL));
  }
  return h;
}

double Stream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() { return normal_quantile(uniform()); }

double Stream::exponential(double mean) { return -mean * std::log(uniform()); }

std::size_t Stream::index(std::size_t bound) {
  if (bound == 0) throw ArgumentError("Stream::index: bound must be positive");
  const std::uint64_t b = bound;
  const std::uint64_t threshold = (0 - b) % b;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return static_cast<std::size_t>(r % b);
  }
}

}  // namespace cpscan
