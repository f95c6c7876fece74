#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "carathset/core.hpp"

namespace carathset {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the stream for (seed, index) does not depend on
/// how many other streams were consumed before it, so per-sample streams can
/// be handed to any worker.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t index)
      : key_(mix64(mix64(seed) ^ (index * 0xd1b54a32d192ed03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Complex unimodular() {
    const double t = uniform(0.0, 2.0 * kPi);
    return {std::cos(t), std::sin(t)};
  }

  // Uniform in the disc of the given radius (area measure).
  Complex in_disc(double radius = 1.0) {
    return radius * std::sqrt(uniform()) * unimodular();
  }

  // Uniform in the box [-r, r] x [-r, r].
  Complex in_box(double r) { return {uniform(-r, r), uniform(-r, r)}; }

  // Standard normal via Box-Muller.
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * uniform());
  }

  // Uniform on the unit sphere of C^n.
  std::vector<Complex> on_sphere(int n) {
    std::vector<Complex> v(static_cast<std::size_t>(n));
    double norm2 = 0;
    do {
      norm2 = 0;
      for (auto& c : v) {
        c = {normal(), normal()};
        norm2 += std::norm(c);
      }
    } while (norm2 == 0.0);
    const double s = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= s;
    return v;
  }

  // Uniform in the open unit ball of C^n scaled to the given radius.
  std::vector<Complex> in_ball(int n, double radius = 1.0) {
    auto v = on_sphere(n);
    const double r = radius * std::pow(uniform(), 1.0 / (2.0 * n));
    for (auto& c : v) c *= r;
    return v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace carathset
