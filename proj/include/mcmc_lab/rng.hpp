#pragma once

// Deterministic, splittable random streams.
//
// A stream is identified by a base seed plus a lineage of labels, e.g.
// (42, {"rwm", 3, 1}) for grid point 3, seed 1. The lineage is folded into a
// 64-bit key with a SplitMix64-style hash and the key seeds a xoshiro256**
// generator. No stream is ever derived from another stream's output, so the
// results of a sweep do not depend on the order in which runs execute.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcmc_lab {

using Label = std::variant<std::int64_t, std::string>;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

// Integer and string labels are tagged differently so that 7 and "7" differ.
inline std::uint64_t label_key(const Label& label) {
  if (const auto* i = std::get_if<std::int64_t>(&label)) {
    return splitmix64(static_cast<std::uint64_t>(*i) ^ 0x6a09e667f3bcc909ULL);
  }
  return splitmix64(fnv1a(std::get<std::string>(label)) ^ 0xbb67ae8584caa73bULL);
}

}  // namespace detail

/// Single-owner random stream. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t key, std::vector<Label> lineage)
      : lineage_(std::move(lineage)) {
    std::uint64_t x = key;
    for (auto& word : state_) {
      x = detail::splitmix64(x);
      word = x;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe to take the log of.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method (second variate cached).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Standard exponential.
  double exponential() noexcept { return -std::log(uniform_open()); }

  /// Uniform integer in [0, n) by rejection (no modulo bias). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r;
    do {
      r = (*this)();
    } while (r >= limit);
    return r % n;
  }

  const std::vector<Label>& lineage() const noexcept { return lineage_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::vector<Label> lineage_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives the stream for (base_seed, labels). Pure function of its inputs.
inline RngStream derive_stream(std::uint64_t base_seed, std::span<const Label> labels) {
  std::uint64_t key = detail::splitmix64(base_seed ^ 0x3c6ef372fe94f82bULL);
  for (const auto& label : labels) {
    key = detail::splitmix64(detail::rotl(key, 23) ^ detail::label_key(label));
  }
  return RngStream(key, std::vector<Label>(labels.begin(), labels.end()));
}

inline RngStream derive_stream(std::uint64_t base_seed, std::initializer_list<Label> labels) {
  return derive_stream(base_seed, std::span<const Label>(labels.begin(), labels.size()));
}

}  // namespace mcmc_lab
