#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lrmm {

/// Counter-based splittable random stream.
///
/// A stream is identified by a 64-bit key; the i-th output is
/// `mix64(key + (i+1)*GAMMA)` where `mix64` is the SplitMix64 finalizer
/// (Steele, Lea & Flood / Vigna) and GAMMA is the golden-ratio increment.
/// Because outputs are a pure function of (key, counter), a stream can be
/// split into independent child streams by deriving fresh keys from
/// (key, tag) without consuming any outputs. Parallel trials each own a
/// derived stream, so draw order never depends on scheduling.
///
/// Uniform doubles take the top 53 bits of one output; Gaussians use the
/// trigonometric Box-Muller transform on two uniforms (z0 returned first,
/// z1 cached). Both transforms are fixed here so that generated data is
/// reproducible from the seed alone.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  /// Child stream for a named purpose ("labels", "noise", ...).
  RngStream child(std::string_view tag) const {
    return RngStream(mix64(key_ ^ mix64(fnv1a(tag) + kTagSalt)));
  }

  /// Child stream for an indexed purpose (trial index, slice index, ...).
  RngStream child(std::uint64_t index) const {
    return RngStream(mix64(key_ ^ mix64(index * kGamma + kIndexSalt)));
  }

  /// Stream identity; usable as the seed of an equivalent fresh stream.
  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGamma); }

  /// Uniform on [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; never zero, safe as a log() argument.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller: z0 = sqrt(-2 ln u1) cos(2 pi u2).
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift; bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kTagSalt = 0xa0761d6478bd642fULL;
  static constexpr std::uint64_t kIndexSalt = 0xe7037ed1a0b428dbULL;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace lrmm
