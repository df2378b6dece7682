// upper_bounds.hpp
//
// Sum-capacity upper bounds.
//
// c_sigma_2: closed-form Z-channel bound, valid for h31^2 <= 1,
//   half_log((P1+P2) / (1 + h31^2 P3)) + half_log(P3).
//
// c_sigma_1: genie-aided bound. The receivers get side information
//   S1 = h12 X1 + h22 X2 + eta1 W1,   S2 = h31 X3 + eta2 W2,
// with unit-variance W_j and E[W_j Z_j] = rho_j. Every admissible genie gives
//   I(X1,X2; Y1,S1) + I(X3; Y2,S2)   (Gaussian inputs at full power)
// as an upper bound; c_sigma_1 minimizes it over the admissible set.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pimac/core_model.hpp"
#include "pimac/optimize.hpp"

namespace pimac {

// ── Joint covariance ────────────────────────────────────────────────────────

enum class JointVar : int { X1 = 0, X2, X3, Y1, S1, Y2, S2 };

inline constexpr std::size_t kJointDim = 7;
inline constexpr std::array<const char*, kJointDim> kJointLabels = {"X1", "X2", "X3", "Y1",
                                                                   "S1", "Y2", "S2"};

using JointCov = Eigen::Matrix<double, 7, 7>;

struct GaussianJointModel {
  JointCov cov = JointCov::Zero();

  [[nodiscard]] double at(JointVar a, JointVar b) const {
    return cov(static_cast<int>(a), static_cast<int>(b));
  }
};

/// Linear map from the independent sources (X1, X2, X3, Z1, Z2, W1, W2) to
/// the ordered joint variables (X1, X2, X3, Y1, S1, Y2, S2).
inline JointCov genie_mixing_matrix(const PimacParams& params, const GenieParams& genie) {
  JointCov m = JointCov::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  // Y1 = X1 + X2 + h31 X3 + Z1
  m(3, 0) = 1.0;
  m(3, 1) = 1.0;
  m(3, 2) = params.h31;
  m(3, 3) = 1.0;
  // S1 = h12 X1 + h22 X2 + eta1 W1
  m(4, 0) = params.h12;
  m(4, 1) = params.h22;
  m(4, 5) = genie.eta1;
  // Y2 = h12 X1 + h22 X2 + X3 + Z2
  m(5, 0) = params.h12;
  m(5, 1) = params.h22;
  m(5, 2) = 1.0;
  m(5, 4) = 1.0;
  // S2 = h31 X3 + eta2 W2
  m(6, 2) = params.h31;
  m(6, 6) = genie.eta2;
  return m;
}

/// Covariance of the sources: independent except E[Z1 W1] = rho1, E[Z2 W2] = rho2.
inline JointCov genie_source_cov(const PimacParams& params, const GenieParams& genie) {
  JointCov s = JointCov::Zero();
  s.diagonal() << params.p1_max, params.p2_max, params.p3_max, 1.0, 1.0, 1.0, 1.0;
  s(3, 5) = s(5, 3) = genie.rho1;
  s(4, 6) = s(6, 4) = genie.rho2;
  return s;
}

inline GaussianJointModel build_genie_joint_cov(const PimacParams& params,
                                                const GenieParams& genie) {
  params.validate();
  if (!genie.feasible())
    throw ConstraintError("genie parameters violate |rho_j| <= 1, eta1^2 <= 1 - rho2^2, "
                          "eta2^2 <= 1 - rho1^2");
  const JointCov m = genie_mixing_matrix(params, genie);
  GaussianJointModel model;
  model.cov = m * genie_source_cov(params, genie) * m.transpose();
  // exact symmetry; the product is symmetric only up to round-off
  model.cov = (0.5 * (model.cov + model.cov.transpose())).eval();
  return model;
}

// ── Log-det mutual information ──────────────────────────────────────────────

inline constexpr double kDetFloor = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

namespace detail {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 7, 7>;

// Natural log-determinant of a PSD matrix via pivoted LDL^T. Returns -inf
// for a singular matrix; throws if a pivot is negative beyond tolerance.
inline double log_det_psd(const SmallMatrix& a) {
  if (a.rows() == 0) return 0.0;
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  const Eigen::LDLT<SmallMatrix> ldlt(a);
  double acc = 0.0;
  for (double d : ldlt.vectorD()) {
    if (d < -kPsdTolerance * scale)
      throw NumericError("covariance submatrix is not positive semidefinite (pivot " +
                         std::to_string(d) + ")");
    if (d <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return acc;
}

inline SmallMatrix principal(const JointCov& cov, const std::vector<int>& idx) {
  SmallMatrix out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = cov(idx[i], idx[j]);
  return out;
}

}  // namespace detail

/// I(A; B) = 0.5 log2(det S_A det S_B / det S_{A u B}) in bits.
///
/// Variables with zero variance are constants and are dropped before the
/// determinants are taken. When det S_{A u B} <= kDetFloor * det S_A det S_B
/// the groups are (numerically) deterministically related and +inf is
/// returned.
inline double gaussian_mutual_info(const GaussianJointModel& model, std::span<const JointVar> group_a,
                                   std::span<const JointVar> group_b) {
  std::array<int, kJointDim> seen{};
  auto collect = [&](std::span<const JointVar> group) {
    std::vector<int> idx;
    for (JointVar v : group) {
      const int i = static_cast<int>(v);
      if (i < 0 || i >= static_cast<int>(kJointDim))
        throw DomainError("gaussian_mutual_info: variable index out of range");
      if (seen[i]++) throw DomainError("gaussian_mutual_info: groups must be disjoint and unique");
      if (model.cov(i, i) < -kPsdTolerance)
        throw NumericError("gaussian_mutual_info: negative variance");
      if (model.cov(i, i) > 0.0) idx.push_back(i);
    }
    return idx;
  };
  const std::vector<int> a = collect(group_a);
  const std::vector<int> b = collect(group_b);
  if (a.empty() || b.empty()) return 0.0;
  std::vector<int> u = a;
  u.insert(u.end(), b.begin(), b.end());

  const double ld_a = detail::log_det_psd(detail::principal(model.cov, a));
  const double ld_b = detail::log_det_psd(detail::principal(model.cov, b));
  const double ld_u = detail::log_det_psd(detail::principal(model.cov, u));
  const double log_ratio = ld_u - ld_a - ld_b;  // ln(det_U / (det_A det_B)) <= 0
  if (!std::isfinite(log_ratio) || log_ratio <= std::log(kDetFloor))
    return std::numeric_limits<double>::infinity();
  return std::max(0.0, -0.5 * log_ratio / std::numbers::ln2);
}

inline double gaussian_mutual_info(const GaussianJointModel& model,
                                   std::initializer_list<JointVar> group_a,
                                   std::initializer_list<JointVar> group_b) {
  return gaussian_mutual_info(model, std::span<const JointVar>(group_a.begin(), group_a.size()),
                              std::span<const JointVar>(group_b.begin(), group_b.size()));
}

struct GenieTerms {
  double mac = 0.0;  // I(X1, X2; Y1, S1)
  double p2p = 0.0;  // I(X3; Y2, S2)
};

inline GenieTerms genie_bound_terms(const GaussianJointModel& model) {
  using enum JointVar;
  return {gaussian_mutual_info(model, {X1, X2}, {Y1, S1}),
          gaussian_mutual_info(model, {X3}, {Y2, S2})};
}

/// Genie-aided upper bound at one admissible genie; +inf for degenerate genies.
inline double genie_bound_objective(const PimacParams& params, const GenieParams& genie) {
  const GenieTerms t = genie_bound_terms(build_genie_joint_cov(params, genie));
  return t.mac + t.p2p;
}

// ── c_sigma_2 ───────────────────────────────────────────────────────────────

inline double c_sigma_2(const PimacParams& params) {
  params.validate();
  if (params.g31() > 1.0)
    throw InvalidRegimeError("c_sigma_2 requires h31^2 <= 1, got h31 = " + std::to_string(params.h31));
  return half_log((params.p1_max + params.p2_max) / effective_noise_at_rx1(params, params.p3_max)) +
         half_log(params.p3_max);
}

// ── c_sigma_1 ───────────────────────────────────────────────────────────────

// The search runs in box coordinates (rho1, rho2, t1, t2) in [-1, 1]^2 x [0, 1]^2
// with eta1 = t1 * sqrt(1 - rho2^2) and eta2 = t2 * sqrt(1 - rho1^2). The optimum
// usually sits on the curved constraint surface, which becomes the flat face t = 1.
// Negative eta is not needed: flipping the signs of (rho_j, eta_j) together leaves
// the joint law unchanged.

/// t_j seed values.
inline constexpr std::array<double, 5> kEtaSeedFractions = {0.1, 0.3, 0.5, 0.8, 1.0};

inline OptConfig<4> default_genie_config() {
  OptConfig<4> cfg;
  cfg.grid_points_per_axis = 21;  // per rho axis
  cfg.refine_tolerance = 1e-4;
  cfg.max_refine_iters = 200;
  cfg.initial_step = 0.1;
  cfg.shrink = 0.5;
  return cfg;
}

inline GenieParams genie_from_box(const Point<4>& x) {
  const double r1 = std::sqrt(std::max(0.0, 1.0 - x[1] * x[1]));
  const double r2 = std::sqrt(std::max(0.0, 1.0 - x[0] * x[0]));
  return {x[0], x[1], x[2] * r1, x[3] * r2};
}

inline FeasibleSet<4> genie_feasible_set() {
  FeasibleSet<4> set;
  set.contains = [](const Point<4>& x) {
    return std::abs(x[0]) <= 1.0 && std::abs(x[1]) <= 1.0 && x[2] >= 0.0 && x[2] <= 1.0 && x[3] >= 0.0 &&
           x[3] <= 1.0;
  };
  set.project = [](const Point<4>& x) {
    return Point<4>{std::clamp(x[0], -1.0, 1.0), std::clamp(x[1], -1.0, 1.0), std::clamp(x[2], 0.0, 1.0),
                    std::clamp(x[3], 0.0, 1.0)};
  };
  return set;
}

/// Seed grid in box coordinates: rho1, rho2 uniform over [-1, 1] crossed with
/// t_j from kEtaSeedFractions.
inline std::vector<Point<4>> genie_seed_grid(std::size_t rho_points) {
  std::vector<Point<4>> seeds;
  seeds.reserve(rho_points * rho_points * kEtaSeedFractions.size() * kEtaSeedFractions.size());
  for (std::size_t i = 0; i < rho_points; ++i) {
    const double rho1 = detail::grid_value(-1.0, 1.0, i, rho_points);
    for (std::size_t j = 0; j < rho_points; ++j) {
      const double rho2 = detail::grid_value(-1.0, 1.0, j, rho_points);
      for (double f1 : kEtaSeedFractions)
        for (double f2 : kEtaSeedFractions) seeds.push_back({rho1, rho2, f1, f2});
    }
  }
  return seeds;
}

/// Minimized genie-aided bound. Any point the search evaluates is itself a
/// valid upper bound, so early termination only costs tightness. cfg.seeds
/// are in box coordinates.
inline SchemeResult c_sigma_1(PimacParams params, OptConfig<4> cfg = default_genie_config()) {
  params.validate();
  // The objective at (-h31, rho2) equals the one at (h31, -rho2): X3 is only noise
  // in the MAC term, and in the P2P term negating X3, Y2 and Z2 flips rho2. The
  // search runs at |h31| and the reported genie is mapped back.
  const bool flip = std::signbit(params.h31);
  params.h31 = std::abs(params.h31);
  const auto grid = genie_seed_grid(cfg.grid_points_per_axis);
  cfg.seeds.insert(cfg.seeds.end(), grid.begin(), grid.end());

  auto objective = [&](const Point<4>& x) { return genie_bound_objective(params, genie_from_box(x)); };
  const OptResult<4> best = minimize_constrained<4>(objective, genie_feasible_set(), cfg);

  SchemeResult out;
  out.sum_rate = best.value;
  GenieParams g = genie_from_box(best.arg);
  if (flip) g.rho2 = -g.rho2;
  out.arg = g;
  out.diagnostics = {best.evaluations, best.refined};
  return out;
}

}  // namespace pimac
