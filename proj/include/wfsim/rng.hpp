#pragma once

#include <cstdint>
#include <random>

namespace wfsim {

// splitmix64 finalizer; used for seed mixing only, never as a stream.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Logical stream ids for child-seed derivation. Adding a stream must not
// renumber existing ones or every recorded experiment changes.
enum : std::uint64_t {
  kStreamCatalog = 1,
  kStreamWorkflow = 2,
  kStreamExecution = 3,
};

// Derives the seed of a child stream from (master seed, stream, index).
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t stream,
                                           std::uint64_t index = 0) {
  std::uint64_t h = mix64(master ^ 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ mix64(stream ^ 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ mix64(index ^ 0x8cb92ba72f3d8dd7ULL));
  return h;
}

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// is pinned by the standard) with explicit value mappings, so results are
/// reproducible across standard libraries; the std::*_distribution classes
/// give no such guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [0, n); multiply-shift range reduction (bias < n / 2^64).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wfsim
