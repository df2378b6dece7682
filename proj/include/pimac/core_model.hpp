// core_model.hpp
//
// Parameterization of the PIMAC: a point-to-point link (tx 3 -> rx 2)
// interfering with a two-user Gaussian MAC (tx 1, tx 2 -> rx 1).
//
//   Y1 =     X1 +     X2 + h31 X3 + Z1
//   Y2 = h12 X1 + h22 X2 +     X3 + Z2
//
// Noise variances and direct gains are normalized to one. Rates are in
// bits per channel use throughout.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace pimac {

// ── Errors ──────────────────────────────────────────────────────────────────

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Input for which the requested quantity is not uniquely defined
/// (e.g. alpha_star with both MAC powers zero).
struct DegenerateInputError : DomainError {
  using DomainError::DomainError;
};

/// Parameters outside the regime in which a bound has been established.
struct InvalidRegimeError : DomainError {
  using DomainError::DomainError;
};

/// Genie parameters outside the admissible constraint set.
struct ConstraintError : DomainError {
  using DomainError::DomainError;
};

/// Numerical failure: non-finite objective, covariance not PSD, and so on.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ── Domain types ────────────────────────────────────────────────────────────

struct PimacParams {
  double h12 = 0.0;  // tx1 -> rx2
  double h22 = 0.0;  // tx2 -> rx2
  double h31 = 0.0;  // tx3 -> rx1
  double p1_max = 0.0;
  double p2_max = 0.0;
  double p3_max = 0.0;

  [[nodiscard]] double g12() const { return h12 * h12; }
  [[nodiscard]] double g22() const { return h22 * h22; }
  [[nodiscard]] double g31() const { return h31 * h31; }

  /// Throws DomainError unless gains are finite and budgets finite and >= 0.
  void validate() const {
    if (!std::isfinite(h12) || !std::isfinite(h22) || !std::isfinite(h31))
      throw DomainError("channel gains must be finite");
    for (double p : {p1_max, p2_max, p3_max})
      if (!std::isfinite(p) || p < 0.0)
        throw DomainError("power budgets must be finite and non-negative");
  }

  friend bool operator==(const PimacParams&, const PimacParams&) = default;
};

struct PowerAllocation {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;

  [[nodiscard]] bool within(const PimacParams& params) const {
    return p1 >= 0.0 && p2 >= 0.0 && p3 >= 0.0 && p1 <= params.p1_max &&
           p2 <= params.p2_max && p3 <= params.p3_max;
  }

  [[nodiscard]] static PowerAllocation full(const PimacParams& params) {
    return {params.p1_max, params.p2_max, params.p3_max};
  }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;
};

/// Fraction of channel uses given to MAC user 1; user 2 gets 1 - alpha.
class TimeShare {
 public:
  TimeShare() = default;
  explicit TimeShare(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw DomainError("time share must lie in [0, 1], got " + std::to_string(alpha));
  }

  [[nodiscard]] double alpha() const { return alpha_; }

  friend bool operator==(const TimeShare&, const TimeShare&) = default;

 private:
  double alpha_ = 0.0;
};

/// Genie side-information parameters. rho_j = E[W_j Z_j], eta_j scales W_j.
/// Admissible set: |rho1|,|rho2| <= 1, eta1^2 <= 1 - rho2^2, eta2^2 <= 1 - rho1^2.
struct GenieParams {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double eta1 = 1.0;
  double eta2 = 1.0;

  [[nodiscard]] bool feasible(double slack = 1e-12) const {
    if (!std::isfinite(rho1) || !std::isfinite(rho2) || !std::isfinite(eta1) ||
        !std::isfinite(eta2))
      return false;
    return std::abs(rho1) <= 1.0 && std::abs(rho2) <= 1.0 &&
           eta1 * eta1 <= 1.0 - rho2 * rho2 + slack &&
           eta2 * eta2 <= 1.0 - rho1 * rho1 + slack;
  }

  friend bool operator==(const GenieParams&, const GenieParams&) = default;
};

struct Diagnostics {
  std::size_t evaluations = 0;
  bool refined = false;  // refinement improved on the best grid/seed point
};

struct SchemeResult {
  double sum_rate = 0.0;
  std::variant<std::monostate, TimeShare, PowerAllocation, GenieParams> arg;
  Diagnostics diagnostics;

  template <typename T>
  [[nodiscard]] const T& arg_as() const {
    return std::get<T>(arg);
  }
};

/// Rate constraints of successive decoding with TIN at both receivers.
struct MacRegionBounds {
  double r1 = 0.0;
  double r2 = 0.0;
  double r12 = 0.0;
  double r3 = 0.0;
};

// ── Elementary rate kernel ──────────────────────────────────────────────────

/// 0.5 * log2(1 + sinr).
inline double half_log(double sinr) {
  if (!std::isfinite(sinr) || sinr < 0.0)
    throw DomainError("half_log: SINR must be finite and non-negative");
  return 0.5 * std::log2(1.0 + sinr);
}

/// Noise plus interference power at the MAC receiver: 1 + h31^2 p3.
inline double effective_noise_at_rx1(const PimacParams& params, double p3) {
  return 1.0 + params.g31() * p3;
}

/// Noise plus interference power at the P2P receiver: 1 + h12^2 p1 + h22^2 p2.
inline double effective_noise_at_rx2(const PimacParams& params, double p1, double p2) {
  return 1.0 + params.g12() * p1 + params.g22() * p2;
}

}  // namespace pimac
