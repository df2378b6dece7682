// optimize.hpp
//
// Deterministic derivative-free kernels used by the scheme maximizations and
// the genie-bound minimization. All three follow the same pattern: evaluate a
// grid plus mandatory seeds, keep the best point under a total order (value,
// then lexicographically smallest argument), then refine locally from it.
// Because the order is total, the result does not depend on evaluation order.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pimac/core_model.hpp"

namespace pimac {

/// No feasible point with a finite objective was found.
struct InfeasibleError : DomainError {
  using DomainError::DomainError;
};

template <std::size_t N>
using Point = std::array<double, N>;

/// Search configuration.
///
/// refine_tolerance terminates refinement: for maximize_scalar it is the
/// golden-section bracket width relative to the interval, for maximize_box
/// the objective gain of one coordinate sweep, and for minimize_constrained
/// the pattern-search step floor.
template <std::size_t N>
struct OptConfig {
  std::size_t grid_points_per_axis = 101;
  double refine_tolerance = 1e-6;
  std::size_t max_refine_iters = 200;
  std::vector<Point<N>> seeds;
  // pattern search only
  double initial_step = 0.1;
  double shrink = 0.5;

  void validate() const {
    if (grid_points_per_axis < 2) throw DomainError("grid_points_per_axis must be >= 2");
    if (!(refine_tolerance > 0.0)) throw DomainError("refine_tolerance must be > 0");
    if (max_refine_iters < 1) throw DomainError("max_refine_iters must be >= 1");
    if (!(initial_step > 0.0)) throw DomainError("initial_step must be > 0");
    if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("shrink must lie in (0, 1)");
  }
};

template <std::size_t N>
struct OptResult {
  Point<N> arg{};
  double value = 0.0;
  std::size_t evaluations = 0;
  bool refined = false;
  // best value after the grid/seed phase and after each refinement iteration
  std::vector<double> trace;
};

namespace detail {

template <std::size_t N>
std::string format_point(const Point<N>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < N; ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

// Total order for maximization: larger value, then smaller argument.
template <std::size_t N>
bool better_max(double v, const Point<N>& x, double best_v, const Point<N>& best_x) {
  if (v != best_v) return v > best_v;
  return x < best_x;
}

template <std::size_t N>
bool better_min(double v, const Point<N>& x, double best_v, const Point<N>& best_x) {
  if (v != best_v) return v < best_v;
  return x < best_x;
}

inline double grid_value(double lo, double hi, std::size_t i, std::size_t n) {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Golden-section maximization of a unimodal-in-bracket function. Returns the
// best point it evaluated, so the caller only ever sees real evaluations.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double width_tol,
                                     std::size_t max_iters, std::size_t& evals) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  evals += 2;
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (std::size_t it = 0; it < max_iters && (b - a) > width_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      ++evals;
      if (fc > best_f) best_f = fc, best_x = c;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      ++evals;
      if (fd > best_f) best_f = fd, best_x = d;
    }
  }
  return {best_x, best_f};
}

template <typename F, std::size_t N>
double checked_eval(F& f, const Point<N>& x) {
  const double v = f(x);
  if (!std::isfinite(v))
    throw NumericError("objective is not finite at " + format_point(x));
  return v;
}

}  // namespace detail

// ── maximize_scalar ─────────────────────────────────────────────────────────

/// Maximizes f over [lo, hi]: uniform grid, mandatory seeds, then
/// golden-section refinement inside the cells around the three best grid
/// points. The returned value is >= f at every grid point and seed.
template <typename F>
  requires std::invocable<F&, double>
OptResult<1> maximize_scalar(F&& f, double lo, double hi, const OptConfig<1>& cfg) {
  cfg.validate();
  if (!(lo < hi)) throw DomainError("maximize_scalar: need lo < hi");

  auto fx = [&](const Point<1>& x) { return static_cast<double>(f(x[0])); };

  const std::size_t n = cfg.grid_points_per_axis;
  std::vector<double> xs(n), vs(n);
  OptResult<1> out;
  out.value = -std::numeric_limits<double>::infinity();
  out.arg = {lo};
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = detail::grid_value(lo, hi, i, n);
    vs[i] = detail::checked_eval(fx, Point<1>{xs[i]});
    if (detail::better_max<1>(vs[i], {xs[i]}, out.value, out.arg)) {
      out.value = vs[i];
      out.arg = {xs[i]};
    }
  }
  out.evaluations = n;
  for (const auto& s : cfg.seeds) {
    if (!(s[0] >= lo && s[0] <= hi))
      throw DomainError("maximize_scalar: seed outside [lo, hi]: " + detail::format_point(s));
    const double v = detail::checked_eval(fx, s);
    ++out.evaluations;
    if (detail::better_max<1>(v, s, out.value, out.arg)) {
      out.value = v;
      out.arg = s;
    }
  }
  out.trace.push_back(out.value);

  // three best grid cells, ordered by the same total order
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const std::size_t k = std::min<std::size_t>(3, n);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return detail::better_max<1>(vs[a], {xs[a]}, vs[b], {xs[b]});
                    });

  const double width_tol = cfg.refine_tolerance * (hi - lo);
  auto g = [&](double x) {
    const double v = static_cast<double>(f(x));
    if (!std::isfinite(v)) throw NumericError("objective is not finite at (" + std::to_string(x) + ")");
    return v;
  };
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = idx[j];
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[i + 1 == n ? n - 1 : i + 1];
    auto [x, v] = detail::golden_max(g, a, b, width_tol, cfg.max_refine_iters, out.evaluations);
    if (detail::better_max<1>(v, {x}, out.value, out.arg)) {
      out.value = v;
      out.arg = {x};
      out.refined = true;
    }
    out.trace.push_back(out.value);
  }
  return out;
}

// ── maximize_box ────────────────────────────────────────────────────────────

/// Maximizes f over the box prod_i [0, upper_i]: full grid in lexicographic
/// order, mandatory seeds plus all 2^N corners, then coordinate-wise
/// golden-section refinement within one grid cell of the incumbent.
template <std::size_t N, typename F>
  requires std::invocable<F&, const Point<N>&>
OptResult<N> maximize_box(F&& f, const Point<N>& upper, const OptConfig<N>& cfg) {
  cfg.validate();
  for (double b : upper)
    if (!std::isfinite(b) || b < 0.0) throw DomainError("maximize_box: bounds must be finite and >= 0");

  const std::size_t n = cfg.grid_points_per_axis;
  OptResult<N> out;
  out.value = -std::numeric_limits<double>::infinity();
  out.arg = upper;

  auto consider = [&](const Point<N>& x) {
    const double v = detail::checked_eval(f, x);
    ++out.evaluations;
    if (detail::better_max<N>(v, x, out.value, out.arg)) {
      out.value = v;
      out.arg = x;
    }
  };

  // odometer over the grid; last axis varies fastest
  std::array<std::size_t, N> counter{};
  Point<N> x{};
  for (bool more = true; more;) {
    for (std::size_t d = 0; d < N; ++d) x[d] = detail::grid_value(0.0, upper[d], counter[d], n);
    consider(x);
    more = false;
    for (std::size_t d = N; d-- > 0;) {
      if (++counter[d] < n) {
        more = true;
        break;
      }
      counter[d] = 0;
    }
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << N); ++mask) {
    Point<N> corner{};
    for (std::size_t d = 0; d < N; ++d) corner[d] = (mask >> (N - 1 - d)) & 1 ? upper[d] : 0.0;
    consider(corner);
  }
  for (const auto& s : cfg.seeds) {
    for (std::size_t d = 0; d < N; ++d)
      if (!(s[d] >= 0.0 && s[d] <= upper[d]))
        throw DomainError("maximize_box: seed outside box: " + detail::format_point(s));
    consider(s);
  }
  out.trace.push_back(out.value);

  for (std::size_t it = 0; it < cfg.max_refine_iters; ++it) {
    const double before = out.value;
    for (std::size_t d = 0; d < N; ++d) {
      if (upper[d] == 0.0) continue;
      const double cell = upper[d] / static_cast<double>(n - 1);
      const double a = std::max(0.0, out.arg[d] - cell);
      const double b = std::min(upper[d], out.arg[d] + cell);
      Point<N> base = out.arg;
      auto along = [&](double t) {
        Point<N> y = base;
        y[d] = t;
        return detail::checked_eval(f, y);
      };
      auto [t, v] = detail::golden_max(along, a, b, 1e-12 * upper[d], 100, out.evaluations);
      Point<N> y = base;
      y[d] = t;
      if (detail::better_max<N>(v, y, out.value, out.arg)) {
        out.value = v;
        out.arg = y;
        out.refined = true;
      }
    }
    out.trace.push_back(out.value);
    if (out.value - before <= cfg.refine_tolerance) break;
  }
  return out;
}

// ── minimize_constrained ────────────────────────────────────────────────────

template <std::size_t N>
struct FeasibleSet {
  std::function<bool(const Point<N>&)> contains;
  std::function<Point<N>(const Point<N>&)> project;
};

/// Minimizes f over a feasible set, starting from cfg.seeds. Infeasible seeds
/// are skipped; +inf objective values are discarded. From the best finite
/// seed a compass pattern search polls +/- step along each axis (projected
/// onto the set), moves to the best improving poll, and shrinks the step
/// when no poll improves. f is never evaluated at an infeasible point.
template <std::size_t N, typename F>
  requires std::invocable<F&, const Point<N>&>
OptResult<N> minimize_constrained(F&& f, const FeasibleSet<N>& set, const OptConfig<N>& cfg) {
  cfg.validate();
  OptResult<N> out;
  out.value = std::numeric_limits<double>::infinity();
  bool found = false;

  auto eval = [&](const Point<N>& x) -> double {
    const double v = f(x);
    ++out.evaluations;
    if (std::isnan(v)) throw NumericError("objective is NaN at " + detail::format_point(x));
    return v;
  };

  for (const auto& s : cfg.seeds) {
    if (!set.contains(s)) continue;
    const double v = eval(s);
    if (std::isinf(v)) continue;
    if (!found || detail::better_min<N>(v, s, out.value, out.arg)) {
      out.value = v;
      out.arg = s;
      found = true;
    }
  }
  if (!found) throw InfeasibleError("minimize_constrained: no feasible seed with a finite objective");
  out.trace.push_back(out.value);

  double step = cfg.initial_step;
  for (std::size_t it = 0; it < cfg.max_refine_iters && step >= cfg.refine_tolerance; ++it) {
    double poll_v = out.value;
    Point<N> poll_x = out.arg;
    bool improved = false;
    for (std::size_t d = 0; d < N; ++d) {
      for (double dir : {-1.0, 1.0}) {
        Point<N> y = out.arg;
        y[d] += dir * step;
        y = set.project(y);
        if (!set.contains(y) || y == out.arg) continue;
        const double v = eval(y);
        if (std::isinf(v)) continue;
        if (detail::better_min<N>(v, y, poll_v, poll_x) && v < out.value) {
          poll_v = v;
          poll_x = y;
          improved = true;
        }
      }
    }
    if (improved) {
      out.value = poll_v;
      out.arg = poll_x;
      out.refined = true;
    } else {
      step *= cfg.shrink;
    }
    out.trace.push_back(out.value);
  }
  return out;
}

}  // namespace pimac
