// achievable_schemes.hpp
//
// Achievable sum-rates with treating interference as noise:
//
//   SD-TIN     full power, successive decoding at the MAC receiver
//   TDMA-TIN   MAC users time-share (alpha, 1 - alpha) with boosted power
//   PC-TIN     SD-TIN with transmit powers optimized inside the budget box
//   plain TDMA MAC and P2P link time-share; no interference at all
//
// plus the two time shares of the dominance argument: alpha_star maximizes
// the MAC part A(alpha), alpha_prime minimizes the P2P part B(alpha).

#pragma once

#include <cmath>
#include <vector>

#include "pimac/core_model.hpp"
#include "pimac/optimize.hpp"

namespace pimac {

struct TdmaTinDecomposition {
  double a_of_alpha = 0.0;  // MAC users
  double b_of_alpha = 0.0;  // P2P user
};

namespace detail {

// (w/2) log2(1 + c/w), continuous at w = 0 where it is 0.
inline double weighted_log_boost(double w, double c) {
  if (w == 0.0) return 0.0;
  const double ratio = c / w;
  if (std::isfinite(ratio)) return 0.5 * w * std::log2(1.0 + ratio);
  return 0.5 * w * (std::log2(w + c) - std::log2(w));
}

// (w/2) log2(1 + s / (1 + g/w)), continuous at w = 0 where it is 0.
inline double weighted_log_interfered(double w, double s, double g) {
  if (w == 0.0) return 0.0;
  return 0.5 * w * std::log2(1.0 + s * w / (w + g));
}

}  // namespace detail

// ── SD-TIN ──────────────────────────────────────────────────────────────────

inline MacRegionBounds sd_tin_region(const PimacParams& params) {
  params.validate();
  const double n1 = effective_noise_at_rx1(params, params.p3_max);
  const double n2 = effective_noise_at_rx2(params, params.p1_max, params.p2_max);
  return {
      .r1 = half_log(params.p1_max / n1),
      .r2 = half_log(params.p2_max / n1),
      .r12 = half_log((params.p1_max + params.p2_max) / n1),
      .r3 = half_log(params.p3_max / n2),
  };
}

inline SchemeResult sd_tin_sum_rate(const PimacParams& params) {
  const MacRegionBounds region = sd_tin_region(params);
  SchemeResult out;
  out.sum_rate = region.r12 + region.r3;
  out.diagnostics.evaluations = 1;
  return out;
}

// ── TDMA-TIN ────────────────────────────────────────────────────────────────

/// A(alpha) and B(alpha). Endpoints take their continuity limits.
inline TdmaTinDecomposition tdma_tin_components(const PimacParams& params, TimeShare share) {
  const double a = share.alpha();
  const double b = 1.0 - a;
  const double n1 = effective_noise_at_rx1(params, params.p3_max);
  return {
      .a_of_alpha = detail::weighted_log_boost(a, params.p1_max / n1) +
                    detail::weighted_log_boost(b, params.p2_max / n1),
      .b_of_alpha =
          detail::weighted_log_interfered(a, params.p3_max, params.g12() * params.p1_max) +
          detail::weighted_log_interfered(b, params.p3_max, params.g22() * params.p2_max),
  };
}

/// alpha* = P1 / (P1 + P2), the maximizer of A.
inline TimeShare alpha_star(const PimacParams& params) {
  const double total = params.p1_max + params.p2_max;
  if (!(total > 0.0))
    throw DegenerateInputError("alpha_star: both MAC power budgets are zero");
  return TimeShare(params.p1_max / total);
}

/// alpha' = h12^2 P1 / (h12^2 P1 + h22^2 P2), the minimizer of B.
inline TimeShare alpha_prime(const PimacParams& params) {
  const double i1 = params.g12() * params.p1_max;
  const double i2 = params.g22() * params.p2_max;
  if (!(i1 + i2 > 0.0))
    throw DegenerateInputError("alpha_prime: no MAC interference at rx 2, B is constant");
  return TimeShare(i1 / (i1 + i2));
}

inline OptConfig<1> default_tdma_tin_config() {
  OptConfig<1> cfg;
  cfg.grid_points_per_axis = 1025;
  cfg.refine_tolerance = 1e-6;
  cfg.max_refine_iters = 200;
  return cfg;
}

/// max over alpha in [0, 1] of A(alpha) + B(alpha). The seeds {0, alpha*,
/// alpha', 1} are always evaluated, so the result is >= A(alpha*) + B(alpha*)
/// and hence >= SD-TIN.
inline SchemeResult tdma_tin_sum_rate(const PimacParams& params,
                                      OptConfig<1> cfg = default_tdma_tin_config()) {
  params.validate();
  cfg.seeds.push_back({0.0});
  cfg.seeds.push_back({1.0});
  if (params.p1_max + params.p2_max > 0.0) cfg.seeds.push_back({alpha_star(params).alpha()});
  if (params.g12() * params.p1_max + params.g22() * params.p2_max > 0.0)
    cfg.seeds.push_back({alpha_prime(params).alpha()});

  auto objective = [&](double alpha) {
    const auto parts = tdma_tin_components(params, TimeShare(alpha));
    return parts.a_of_alpha + parts.b_of_alpha;
  };
  const OptResult<1> best = maximize_scalar(objective, 0.0, 1.0, cfg);

  SchemeResult out;
  out.sum_rate = best.value;
  out.arg = TimeShare(best.arg[0]);
  out.diagnostics = {best.evaluations, best.refined};
  return out;
}

// ── PC-TIN ──────────────────────────────────────────────────────────────────

/// C(p1, p2, p3): SD-TIN sum-rate at the given transmit powers.
inline double pc_tin_objective(const PimacParams& params, const PowerAllocation& alloc) {
  const double n1 = effective_noise_at_rx1(params, alloc.p3);
  const double n2 = effective_noise_at_rx2(params, alloc.p1, alloc.p2);
  return half_log((alloc.p1 + alloc.p2) / n1) + half_log(alloc.p3 / n2);
}

inline OptConfig<3> default_pc_tin_config() {
  OptConfig<3> cfg;
  cfg.grid_points_per_axis = 101;
  cfg.refine_tolerance = 1e-6;
  cfg.max_refine_iters = 50;
  return cfg;
}

/// Box-constrained maximum of C over 0 <= p_i <= P_i. All eight corners of
/// the box are candidates, so full power and the single-user-silent
/// allocations are always represented exactly.
inline SchemeResult pc_tin_sum_rate(const PimacParams& params,
                                    const OptConfig<3>& cfg = default_pc_tin_config()) {
  params.validate();
  auto objective = [&](const Point<3>& p) {
    return pc_tin_objective(params, {p[0], p[1], p[2]});
  };
  const OptResult<3> best =
      maximize_box<3>(objective, {params.p1_max, params.p2_max, params.p3_max}, cfg);

  SchemeResult out;
  out.sum_rate = best.value;
  out.arg = PowerAllocation{best.arg[0], best.arg[1], best.arg[2]};
  out.diagnostics = {best.evaluations, best.refined};
  return out;
}

// ── Plain TDMA ──────────────────────────────────────────────────────────────

/// MAC and P2P link time-share with fraction alpha = (P1+P2)/(P1+P2+P3) for
/// the MAC; interference-free in both slots. Equals half_log(P1+P2+P3).
inline SchemeResult plain_tdma_sum_rate(const PimacParams& params) {
  params.validate();
  const double mac = params.p1_max + params.p2_max;
  const double total = mac + params.p3_max;
  if (!(total > 0.0)) throw DegenerateInputError("plain_tdma_sum_rate: all powers are zero");
  const double alpha = mac / total;

  SchemeResult out;
  out.sum_rate = detail::weighted_log_boost(alpha, mac) +
                 detail::weighted_log_boost(1.0 - alpha, params.p3_max);
  out.arg = TimeShare(alpha);
  out.diagnostics.evaluations = 1;
  return out;
}

}  // namespace pimac
