#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace msmc {

/// Random stream used throughout. Streams are always constructed from a
/// derived seed, never shared between work units.
using Stream = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based seed derivation: hashes a master seed together with an
/// ordered list of counters (cell index, replication index, purpose tag...).
/// The result depends only on the arguments, so work units can run in any
/// order on any number of threads.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = detail::splitmix64(master ^ 0x6A09E667F3BCC908ULL);
  for (std::uint64_t c : path) {
    h = detail::splitmix64(h ^ detail::splitmix64(c + 0x3C6EF372FE94F82BULL));
  }
  return h;
}

inline Stream make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Stream(derive_seed(master, path));
}

/// Purpose tags keep the substreams of one master seed disjoint.
namespace stream_tag {
inline constexpr std::uint64_t replicate = 1;
inline constexpr std::uint64_t tie_breaker = 2;
inline constexpr std::uint64_t data = 3;
inline constexpr std::uint64_t mc_test = 4;
inline constexpr std::uint64_t bootstrap = 5;
inline constexpr std::uint64_t nuisance_draws = 6;
inline constexpr std::uint64_t chp = 7;
inline constexpr std::uint64_t cell = 8;
}  // namespace stream_tag

inline std::vector<double> standard_normal_vector(std::size_t n, Stream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

/// Uniform on [0, 1).
inline double uniform01(Stream& rng) {
  return std::generate_canonical<double, 53>(rng);
}

}  // namespace msmc
