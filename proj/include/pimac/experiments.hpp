// experiments.hpp
//
// Sweep harness for the h12 = h31 = h channel-gain sweep, PC-TIN regime
// detection, Monte-Carlo validation of the genie covariance, and CSV output.

#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pimac/achievable_schemes.hpp"
#include "pimac/core_model.hpp"
#include "pimac/upper_bounds.hpp"

namespace pimac {

/// A required input (e.g. the PC-TIN maximizer of a row) is missing.
struct ContractError : DomainError {
  using DomainError::DomainError;
};

// ── Curves ──────────────────────────────────────────────────────────────────

enum class Curve { SdTin, TdmaTin, PcTin, Tdma, Ub1, Ub2 };

inline constexpr std::array<Curve, 6> kAllCurves = {Curve::SdTin, Curve::TdmaTin, Curve::PcTin,
                                                    Curve::Tdma,  Curve::Ub1,     Curve::Ub2};

inline std::string_view curve_name(Curve c) {
  switch (c) {
    case Curve::SdTin: return "sd_tin";
    case Curve::TdmaTin: return "tdma_tin";
    case Curve::PcTin: return "pc_tin";
    case Curve::Tdma: return "tdma";
    case Curve::Ub1: return "ub1";
    case Curve::Ub2: return "ub2";
  }
  return "?";
}

inline Curve parse_curve(std::string_view name) {
  for (Curve c : kAllCurves)
    if (curve_name(c) == name) return c;
  throw DomainError("unknown curve '" + std::string(name) +
                    "' (expected sd_tin, tdma_tin, pc_tin, tdma, ub1, ub2)");
}

struct CurveSet {
  std::array<bool, 6> on{true, true, true, true, true, true};

  [[nodiscard]] bool has(Curve c) const { return on[static_cast<std::size_t>(c)]; }

  /// Comma-separated list such as "sd_tin,pc_tin".
  static CurveSet parse(std::string_view list) {
    CurveSet s;
    s.on.fill(false);
    std::size_t start = 0;
    while (start <= list.size()) {
      const std::size_t end = std::min(list.find(',', start), list.size());
      std::string_view tok = list.substr(start, end - start);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      if (!tok.empty()) s.on[static_cast<std::size_t>(parse_curve(tok))] = true;
      start = end + 1;
    }
    return s;
  }
};

// ── Regimes ─────────────────────────────────────────────────────────────────

enum class Regime { FullPower, User1Silent, User3Silent, Other };

inline std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::FullPower: return "FULL_POWER";
    case Regime::User1Silent: return "USER1_SILENT";
    case Regime::User3Silent: return "USER3_SILENT";
    case Regime::Other: return "OTHER";
  }
  return "?";
}

inline constexpr double kRegimeRelativeTolerance = 1e-3;

/// Labels an allocation as one of the corner regimes; a coordinate counts as
/// "off" or "full" when within rel_tol * budget of 0 or of the budget.
inline Regime classify_allocation(const PowerAllocation& p, const PimacParams& params,
                                  double rel_tol = kRegimeRelativeTolerance) {
  auto off = [&](double x, double b) { return std::abs(x) <= rel_tol * b; };
  auto full = [&](double x, double b) { return std::abs(x - b) <= rel_tol * b; };
  const bool f1 = full(p.p1, params.p1_max), f2 = full(p.p2, params.p2_max),
             f3 = full(p.p3, params.p3_max);
  if (f1 && f2 && f3) return Regime::FullPower;
  if (off(p.p1, params.p1_max) && f2 && f3) return Regime::User1Silent;
  if (f1 && f2 && off(p.p3, params.p3_max)) return Regime::User3Silent;
  return Regime::Other;
}

// ── Sweep ───────────────────────────────────────────────────────────────────

struct SweepConfig {
  double h_min = 0.0;
  double h_max = 1.0;
  std::size_t steps = 101;
  double h22 = 0.2;
  double p1 = 10.0;
  double p2 = 10.0;
  double p3 = 10.0;
  CurveSet curves;
  std::uint64_t seed = 42;
  std::string out;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (!std::isfinite(h_min) || !std::isfinite(h_max) || !(h_min <= h_max))
      throw DomainError("sweep: need finite h_min <= h_max");
    if (steps < 1) throw DomainError("sweep: steps must be >= 1");
    PimacParams{h_min, h22, h_min, p1, p2, p3}.validate();
  }

  [[nodiscard]] double h_at(std::size_t i) const {
    if (steps == 1) return h_min;
    return detail::grid_value(h_min, h_max, i, steps);
  }
};

struct SweepRow {
  double h = 0.0;
  PimacParams params;
  std::optional<double> sd_tin, tdma_tin, pc_tin, tdma, ub1, ub2;
  std::optional<TimeShare> alpha_opt;
  std::optional<PowerAllocation> p_opt;
  std::optional<GenieParams> genie_opt;
  std::optional<Regime> regime;
};

/// Evaluates the requested curves at one PIMAC instance.
inline SweepRow evaluate_point(const PimacParams& params, const CurveSet& curves = {}) {
  params.validate();
  SweepRow row;
  row.params = params;
  if (curves.has(Curve::SdTin)) row.sd_tin = sd_tin_sum_rate(params).sum_rate;
  if (curves.has(Curve::TdmaTin)) {
    const SchemeResult r = tdma_tin_sum_rate(params);
    row.tdma_tin = r.sum_rate;
    row.alpha_opt = r.arg_as<TimeShare>();
  }
  if (curves.has(Curve::PcTin)) {
    const SchemeResult r = pc_tin_sum_rate(params);
    row.pc_tin = r.sum_rate;
    row.p_opt = r.arg_as<PowerAllocation>();
    row.regime = classify_allocation(*row.p_opt, params);
  }
  if (curves.has(Curve::Tdma)) row.tdma = plain_tdma_sum_rate(params).sum_rate;
  if (curves.has(Curve::Ub1)) {
    const SchemeResult r = c_sigma_1(params);
    row.ub1 = r.sum_rate;
    row.genie_opt = r.arg_as<GenieParams>();
  }
  if (curves.has(Curve::Ub2) && params.g31() <= 1.0) row.ub2 = c_sigma_2(params);
  return row;
}

/// Sets h12 = h31 = h for `steps` equally spaced h in [h_min, h_max] and
/// evaluates each row. Rows are computed in parallel; each row is a pure
/// function of its h, so the output does not depend on scheduling.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows(cfg.steps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.steps && !failed; i = next++) {
      try {
        const double h = cfg.h_at(i);
        rows[i] = evaluate_point({h, cfg.h22, h, cfg.p1, cfg.p2, cfg.p3}, cfg.curves);
        rows[i].h = h;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, cfg.steps));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

struct RegimeInterval {
  double h_from = 0.0;  // midpoint to the previous row, or the first row's h
  double h_to = 0.0;    // midpoint to the next row, or the last row's h
  Regime regime = Regime::Other;
};

/// Merges consecutive rows with the same PC-TIN regime into intervals.
/// Interval boundaries are the midpoints between adjacent differing rows.
inline std::vector<RegimeInterval> detect_pc_tin_regimes(
    const std::vector<SweepRow>& rows, double rel_tol = kRegimeRelativeTolerance) {
  std::vector<RegimeInterval> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    if (!r.p_opt) throw ContractError("detect_pc_tin_regimes: row without PC-TIN maximizer");
    if (i > 0 && !(rows[i - 1].h <= r.h))
      throw ContractError("detect_pc_tin_regimes: rows must be sorted by h");
    const Regime g = classify_allocation(*r.p_opt, r.params, rel_tol);
    if (!out.empty() && out.back().regime == g) {
      out.back().h_to = r.h;
      continue;
    }
    if (!out.empty()) {
      const double mid = 0.5 * (rows[i - 1].h + r.h);
      out.back().h_to = mid;
      out.push_back({mid, r.h, g});
    } else {
      out.push_back({r.h, r.h, g});
    }
  }
  return out;
}

// ── CSV ─────────────────────────────────────────────────────────────────────

inline constexpr std::string_view kCsvHeader =
    "h,sd_tin,tdma_tin,pc_tin,tdma,ub1,ub2,alpha_opt,p1_opt,p2_opt,p3_opt,rho1,rho2,eta1,eta2,"
    "regime";
inline constexpr std::size_t kCsvColumns = 16;

/// %.9g in the C locale; "NA" for a missing value.
inline std::string format_number(std::optional<double> v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    auto opt = [](bool present, double v) { return present ? std::optional<double>(v) : std::nullopt; };
    const std::optional<double> cells[] = {
        r.h,
        r.sd_tin,
        r.tdma_tin,
        r.pc_tin,
        r.tdma,
        r.ub1,
        r.ub2,
        opt(r.alpha_opt.has_value(), r.alpha_opt ? r.alpha_opt->alpha() : 0.0),
        opt(r.p_opt.has_value(), r.p_opt ? r.p_opt->p1 : 0.0),
        opt(r.p_opt.has_value(), r.p_opt ? r.p_opt->p2 : 0.0),
        opt(r.p_opt.has_value(), r.p_opt ? r.p_opt->p3 : 0.0),
        opt(r.genie_opt.has_value(), r.genie_opt ? r.genie_opt->rho1 : 0.0),
        opt(r.genie_opt.has_value(), r.genie_opt ? r.genie_opt->rho2 : 0.0),
        opt(r.genie_opt.has_value(), r.genie_opt ? r.genie_opt->eta1 : 0.0),
        opt(r.genie_opt.has_value(), r.genie_opt ? r.genie_opt->eta2 : 0.0),
    };
    for (const auto& c : cells) os << format_number(c) << ',';
    os << (r.regime ? regime_name(*r.regime) : std::string_view("NA")) << '\n';
  }
}

inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  write_csv(f, rows);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

/// Parsed CSV: numeric cells (nullopt for "NA") plus the regime label.
struct CsvRecord {
  std::array<std::optional<double>, kCsvColumns - 1> values;
  std::string regime;
};

inline std::vector<CsvRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw DomainError("read_csv: missing or unexpected header");
  std::vector<CsvRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    CsvRecord rec;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col + 1 < kCsvColumns) {
        if (cell != "NA") {
          char* end = nullptr;
          rec.values[col] = std::strtod(cell.c_str(), &end);
          if (end == cell.c_str() || *end != '\0')
            throw DomainError("read_csv: bad number '" + cell + "'");
        }
      } else if (col + 1 == kCsvColumns) {
        rec.regime = cell;
      }
      ++col;
    }
    if (col != kCsvColumns)
      throw DomainError("read_csv: expected 16 fields, got " + std::to_string(col));
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<CsvRecord> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
  return read_csv(f);
}

// ── Monte-Carlo validation ──────────────────────────────────────────────────

inline constexpr std::string_view kValidationGenerator =
    "boost::random::mt19937_64 + boost::random::normal_distribution<double>";

struct MonteCarloReport {
  std::string generator{kValidationGenerator};
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  GenieTerms analytic;
  GenieTerms sampled;
  double gap_mac = 0.0;  // |analytic - sampled| for I(X1,X2; Y1,S1)
  double gap_p2p = 0.0;  // same for I(X3; Y2,S2)

  friend bool operator==(const MonteCarloReport& a, const MonteCarloReport& b) {
    return a.generator == b.generator && a.seed == b.seed && a.samples == b.samples &&
           a.analytic.mac == b.analytic.mac && a.analytic.p2p == b.analytic.p2p &&
           a.sampled.mac == b.sampled.mac && a.sampled.p2p == b.sampled.p2p &&
           a.gap_mac == b.gap_mac && a.gap_p2p == b.gap_p2p;
  }
};

/// Sample covariance of (X1, X2, X3, Y1, S1, Y2, S2) from n draws of the
/// signal model, with (Z_j, W_j) generated from the Cholesky factor of
/// [[1, rho_j], [rho_j, 1]].
inline GaussianJointModel sample_genie_joint_cov(const PimacParams& params, const GenieParams& genie,
                                                 std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw DomainError("montecarlo: need at least 2 samples");
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);

  const double s1 = std::sqrt(params.p1_max), s2 = std::sqrt(params.p2_max),
               s3 = std::sqrt(params.p3_max);
  const double c1 = std::sqrt(std::max(0.0, 1.0 - genie.rho1 * genie.rho1));
  const double c2 = std::sqrt(std::max(0.0, 1.0 - genie.rho2 * genie.rho2));

  Eigen::Matrix<double, 7, 1> sum = Eigen::Matrix<double, 7, 1>::Zero();
  JointCov outer = JointCov::Zero();
  Eigen::Matrix<double, 7, 1> v;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double x1 = s1 * normal(rng);
    const double x2 = s2 * normal(rng);
    const double x3 = s3 * normal(rng);
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    const double w1 = genie.rho1 * z1 + c1 * normal(rng);
    const double w2 = genie.rho2 * z2 + c2 * normal(rng);
    v << x1, x2, x3, x1 + x2 + params.h31 * x3 + z1, params.h12 * x1 + params.h22 * x2 + genie.eta1 * w1,
        params.h12 * x1 + params.h22 * x2 + x3 + z2, params.h31 * x3 + genie.eta2 * w2;
    sum += v;
    outer.noalias() += v * v.transpose();
  }
  const double n = static_cast<double>(n_samples);
  const Eigen::Matrix<double, 7, 1> mean = sum / n;
  GaussianJointModel model;
  model.cov = (outer - n * mean * mean.transpose()) / (n - 1.0);
  model.cov = (0.5 * (model.cov + model.cov.transpose())).eval();

  const double min_eig = Eigen::SelfAdjointEigenSolver<JointCov>(model.cov, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -kPsdTolerance * std::max(1.0, model.cov.diagonal().maxCoeff()))
    throw NumericError("montecarlo: sample covariance is not positive semidefinite");
  return model;
}

/// Compares the analytic genie mutual informations with the same log-det
/// kernel applied to a sample covariance.
inline MonteCarloReport montecarlo_covariance_check(const PimacParams& params,
                                                    const GenieParams& genie,
                                                    std::size_t n_samples, std::uint64_t seed) {
  params.validate();
  if (!genie.feasible()) throw ConstraintError("montecarlo: infeasible genie");
  if (!(genie.eta1 > 0.05 && genie.eta2 > 0.05))
    throw DomainError("montecarlo: eta1 and eta2 must exceed 0.05");
  MonteCarloReport rep;
  rep.seed = seed;
  rep.samples = n_samples;
  rep.analytic = genie_bound_terms(build_genie_joint_cov(params, genie));
  rep.sampled = genie_bound_terms(sample_genie_joint_cov(params, genie, n_samples, seed));
  rep.gap_mac = std::abs(rep.analytic.mac - rep.sampled.mac);
  rep.gap_p2p = std::abs(rep.analytic.p2p - rep.sampled.p2p);
  return rep;
}

// ── key=value reports ───────────────────────────────────────────────────────

inline void write_point_report(std::ostream& os, const SweepRow& r) {
  const PimacParams& p = r.params;
  os << "h12=" << format_number(p.h12) << "\nh22=" << format_number(p.h22)
     << "\nh31=" << format_number(p.h31) << "\np1=" << format_number(p.p1_max)
     << "\np2=" << format_number(p.p2_max) << "\np3=" << format_number(p.p3_max) << '\n';
  os << "sd_tin=" << format_number(r.sd_tin) << '\n';
  os << "tdma_tin=" << format_number(r.tdma_tin) << '\n';
  os << "tdma_tin.alpha=" << format_number(r.alpha_opt ? std::optional(r.alpha_opt->alpha()) : std::nullopt) << '\n';
  os << "pc_tin=" << format_number(r.pc_tin) << '\n';
  if (r.p_opt) {
    os << "pc_tin.p1=" << format_number(r.p_opt->p1) << "\npc_tin.p2=" << format_number(r.p_opt->p2)
       << "\npc_tin.p3=" << format_number(r.p_opt->p3) << '\n';
  }
  os << "pc_tin.regime=" << (r.regime ? regime_name(*r.regime) : "NA") << '\n';
  os << "tdma=" << format_number(r.tdma) << '\n';
  os << "ub1=" << format_number(r.ub1) << '\n';
  if (r.genie_opt) {
    os << "ub1.rho1=" << format_number(r.genie_opt->rho1) << "\nub1.rho2=" << format_number(r.genie_opt->rho2)
       << "\nub1.eta1=" << format_number(r.genie_opt->eta1) << "\nub1.eta2=" << format_number(r.genie_opt->eta2)
       << '\n';
  }
  os << "ub2=" << format_number(r.ub2) << '\n';
}

inline void write_montecarlo_report(std::ostream& os, const std::string& label,
                                    const MonteCarloReport& r) {
  os << label << ".generator=" << r.generator << '\n'
     << label << ".seed=" << r.seed << '\n'
     << label << ".samples=" << r.samples << '\n'
     << label << ".analytic_mac=" << format_number(r.analytic.mac) << '\n'
     << label << ".sampled_mac=" << format_number(r.sampled.mac) << '\n'
     << label << ".gap_mac=" << format_number(r.gap_mac) << '\n'
     << label << ".analytic_p2p=" << format_number(r.analytic.p2p) << '\n'
     << label << ".sampled_p2p=" << format_number(r.sampled.p2p) << '\n'
     << label << ".gap_p2p=" << format_number(r.gap_p2p) << '\n';
}

}  // namespace pimac
