#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cpscan {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of the substream addressed by `path` under `master`.
//
//   h = mix64(master + 0x9E3779B97F4A7C15)
//   for k in path:  h = mix64(h ^ mix64(k + 0xD1B54A32D192ED03))
//
// The result seeds a std::mt19937_64, whose output sequence is fixed by the
// C++ standard, so streams are identical across platforms and compilers.
// Every variate below is derived from raw 64-bit engine output; the
// implementation-defined std:: distributions are never used.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept;

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t master, std::initializer_list<std::uint64_t> path)
      : engine_(derive_seed(master, path)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  // Standard normal by inversion of a single uniform draw.
  double normal();

  // Exponential with the given mean, by inversion.
  double exponential(double mean);

  // Uniform integer in [0, bound), unbiased (rejection on the low residue).
  std::size_t index(std::size_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cpscan
