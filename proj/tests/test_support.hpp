// Shared helpers for the test suites: seeded instance generators and
// brute-force oracles that do not go through the library's code paths.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pimac/core_model.hpp"

namespace pimac::testing {

/// Uniform instance generator with a fixed seed. mt19937_64 output is
/// specified by the standard; the uniform mapping below is done by hand so
/// draws are identical across standard libraries.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  /// (0, hi]
  double positive(double hi) {
    const double u = static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
    return hi * u;
  }

  PimacParams params(double gain_max, double power_max) {
    PimacParams p;
    p.h12 = uniform(0.0, gain_max);
    p.h22 = uniform(0.0, gain_max);
    p.h31 = uniform(0.0, gain_max);
    p.p1_max = positive(power_max);
    p.p2_max = positive(power_max);
    p.p3_max = positive(power_max);
    return p;
  }

  GenieParams genie() {
    GenieParams g;
    g.rho1 = uniform(-1.0, 1.0);
    g.rho2 = uniform(-1.0, 1.0);
    g.eta1 = uniform(-1.0, 1.0) * std::sqrt(1.0 - g.rho2 * g.rho2);
    g.eta2 = uniform(-1.0, 1.0) * std::sqrt(1.0 - g.rho1 * g.rho1);
    return g;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ── Oracles (long double, textbook forms) ───────────────────────────────────

inline long double oracle_half_log(long double x) { return 0.5L * std::log2(1.0L + x); }

/// A(alpha) + B(alpha) by direct substitution; endpoints by their limits.
inline long double oracle_tdma_tin(const PimacParams& p, long double a) {
  const long double n1 = 1.0L + (long double)p.h31 * p.h31 * p.p3_max;
  long double sum = 0.0L;
  if (a > 0.0L) {
    sum += a / 2 * std::log2(1.0L + (p.p1_max / a) / n1);
    sum += a / 2 * std::log2(1.0L + p.p3_max / (1.0L + (long double)p.h12 * p.h12 * p.p1_max / a));
  }
  const long double b = 1.0L - a;
  if (b > 0.0L) {
    sum += b / 2 * std::log2(1.0L + (p.p2_max / b) / n1);
    sum += b / 2 * std::log2(1.0L + p.p3_max / (1.0L + (long double)p.h22 * p.h22 * p.p2_max / b));
  }
  return sum;
}

inline long double oracle_b(const PimacParams& p, long double a) {
  long double sum = 0.0L;
  if (a > 0.0L)
    sum += a / 2 * std::log2(1.0L + p.p3_max / (1.0L + (long double)p.h12 * p.h12 * p.p1_max / a));
  const long double b = 1.0L - a;
  if (b > 0.0L)
    sum += b / 2 * std::log2(1.0L + p.p3_max / (1.0L + (long double)p.h22 * p.h22 * p.p2_max / b));
  return sum;
}

inline long double oracle_pc_tin(const PimacParams& p, long double p1, long double p2, long double p3) {
  const long double n1 = 1.0L + (long double)p.h31 * p.h31 * p3;
  const long double n2 = 1.0L + (long double)p.h12 * p.h12 * p1 + (long double)p.h22 * p.h22 * p2;
  return oracle_half_log((p1 + p2) / n1) + oracle_half_log(p3 / n2);
}

struct GridMax3 {
  long double value = -1.0L;
  long double p1 = 0, p2 = 0, p3 = 0;
};

/// Exhaustive search of the PC-TIN objective over an n^3 grid of the budget box.
inline GridMax3 oracle_pc_tin_grid(const PimacParams& p, int n) {
  GridMax3 best;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const long double p1 = p.p1_max * i / (long double)(n - 1);
        const long double p2 = p.p2_max * j / (long double)(n - 1);
        const long double p3 = p.p3_max * k / (long double)(n - 1);
        const long double v = oracle_pc_tin(p, p1, p2, p3);
        if (v > best.value) best = {v, p1, p2, p3};
      }
  return best;
}

}  // namespace pimac::testing
