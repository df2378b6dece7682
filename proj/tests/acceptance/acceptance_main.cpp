// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pimac/pimac.hpp"
#include "test_support.hpp"

using namespace pimac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs body(i) for i in [0, n) on all cores; results must be stored by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(hw, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

SweepConfig reference_sweep_config() {
  SweepConfig cfg;
  cfg.h_min = 0.0;
  cfg.h_max = 1.0;
  cfg.steps = 101;
  cfg.h22 = 0.2;
  cfg.p1 = cfg.p2 = cfg.p3 = 10.0;
  return cfg;
}

double max_achievable(const SweepRow& r) { return std::max({*r.sd_tin, *r.tdma_tin, *r.pc_tin, *r.tdma}); }

const SweepRow* row_at(const std::vector<SweepRow>& rows, double h) {
  for (const auto& r : rows)
    if (std::abs(r.h - h) < 1e-12) return &r;
  return nullptr;
}

Outcome criterion1() {
  testing::InstanceGenerator gen(1001);
  double worst = std::numeric_limits<double>::infinity();
  double worst_strict = std::numeric_limits<double>::infinity();
  std::size_t strict_count = 0, fails = 0, strict_fails = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = gen.params(2.0, 50.0);
    const double gap = tdma_tin_sum_rate(p).sum_rate - sd_tin_sum_rate(p).sum_rate;
    worst = std::min(worst, gap);
    if (gap < -1e-12) ++fails;
    if (std::abs(p.g12() - p.g22()) >= 0.1 && p.p1_max >= 1 && p.p2_max >= 1 && p.p3_max >= 1) {
      ++strict_count;
      worst_strict = std::min(worst_strict, gap);
      if (!(gap > 1e-9)) ++strict_fails;
    }
  }
  return {fails == 0 && strict_fails == 0,
          fmt("10000 instances, min gap %.3g, %zu below -1e-12; strict subset %zu, min gap %.3g, %zu not > 1e-9",
              worst, fails, strict_count, worst_strict, strict_fails)};
}

Outcome criterion2() {
  testing::InstanceGenerator gen(1002);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto p = gen.params(2.0, 50.0);
    p.h22 = (i % 2 ? -1.0 : 1.0) * p.h12;
    const auto parts = tdma_tin_components(p, alpha_star(p));
    worst = std::max(worst, std::abs(parts.a_of_alpha + parts.b_of_alpha - sd_tin_sum_rate(p).sum_rate));
  }
  return {worst <= 1e-12, fmt("1000 instances with h12^2 = h22^2, max |A+B - sd_tin| = %.3g", worst)};
}

Outcome criterion3() {
  testing::InstanceGenerator gen(1003);
  constexpr int kGrid = 1000;
  double worst_curv = std::numeric_limits<double>::infinity(), worst_slope = 0, worst_argmin = 0;
  std::size_t interior = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen.params(2.0, 50.0);
    auto b = [&](double a) { return tdma_tin_components(p, TimeShare(a)).b_of_alpha; };
    std::vector<double> v(kGrid + 1);
    for (int k = 0; k <= kGrid; ++k) v[k] = b(static_cast<double>(k) / kGrid);
    for (int k = 1; k < kGrid; ++k) worst_curv = std::min(worst_curv, v[k - 1] - 2 * v[k] + v[k + 1]);
    const double ap = alpha_prime(p).alpha();
    const auto kmin = std::min_element(v.begin(), v.end()) - v.begin();
    worst_argmin = std::max(worst_argmin, std::abs(static_cast<double>(kmin) / kGrid - ap));
    if (ap > 0.0 && ap < 1.0) {
      ++interior;
      // five-point central difference, step scaled to the distance from the ends
      const double st = 1e-3 * std::min(ap, 1.0 - ap);
      const double d = (b(ap - 2 * st) - 8 * b(ap - st) + 8 * b(ap + st) - b(ap + 2 * st)) / (12 * st);
      worst_slope = std::max(worst_slope, std::abs(d));
    }
  }
  const bool ok = worst_curv >= -1e-9 && worst_slope <= 1e-6 && worst_argmin <= 1.0 / kGrid + 1e-12;
  return {ok, fmt("1000 instances: min second difference %.3g, max |dB/da| at alpha' %.3g (%zu interior), "
                  "max |grid argmin - alpha'| %.3g",
                  worst_curv, worst_slope, interior, worst_argmin)};
}

Outcome criterion4() {
  testing::InstanceGenerator gen(1004);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen.params(2.0, 50.0);
    worst = std::max(worst, std::abs(plain_tdma_sum_rate(p).sum_rate -
                                     half_log(p.p1_max + p.p2_max + p.p3_max)));
  }
  return {worst <= 1e-12, fmt("1000 instances, max deviation %.3g", worst)};
}

Outcome criterion5(const std::vector<SweepRow>& rows, double seconds) {
  std::vector<std::string> bad;
  const SweepRow* r02 = row_at(rows, 0.2);
  const SweepRow* r10 = row_at(rows, 1.0);
  const double a = *r02->ub1 - *r02->sd_tin;
  if (!(a <= 0.02)) bad.push_back("a");
  const double b = std::abs(*r10->ub2 - *r10->tdma);
  if (!(b <= 1e-9)) bad.push_back("b");
  const auto iv = detect_pc_tin_regimes(rows);
  double transition = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k + 1 < iv.size(); ++k)
    if (iv[k].regime == Regime::FullPower && iv[k + 1].regime == Regime::User1Silent) transition = iv[k].h_to;
  if (!(transition >= 0.37 && transition <= 0.41)) bad.push_back("c");
  double d = 0;
  for (const auto& r : rows)
    if (r.h <= 0.37) d = std::max(d, std::abs(*r.pc_tin - *r.sd_tin));
  if (!(d <= 1e-9)) bad.push_back("d");
  if (iv.back().regime != Regime::User3Silent) bad.push_back("e");
  if (!(seconds < 300)) bad.push_back("runtime");
  std::string failed;
  for (const auto& s : bad) failed += (failed.empty() ? "" : ",") + s;
  return {bad.empty(),
          fmt("(a) ub1-sd_tin at h=0.2 = %.3g; (b) |ub2-tdma| at h=1 = %.3g; (c) transition at h=%.4g; "
              "(d) max |pc_tin-sd_tin| for h<=0.37 = %.3g; (e) last interval %s; sweep %.1fs%s%s",
              a, b, transition, d, std::string(regime_name(iv.back().regime)).c_str(), seconds,
              failed.empty() ? "" : "; failed: ", failed.c_str())};
}

Outcome criterion6(const std::vector<SweepRow>& rows) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double lo = max_achievable(r);
    worst = std::min({worst, *r.ub1 - lo, *r.ub2 - lo});
  }
  const double worst_fig = worst;
  testing::InstanceGenerator gen(1006);
  std::vector<PimacParams> inst;
  while (inst.size() < 1000) {
    auto p = gen.params(2.0, 50.0);
    p.h31 = gen.uniform(-1.0, 1.0);
    inst.push_back(p);
  }
  std::vector<double> margin(inst.size());
  parallel_for(inst.size(), [&](std::size_t i) {
    const auto r = evaluate_point(inst[i]);
    const double lo = max_achievable(r);
    margin[i] = std::min(*r.ub1 - lo, *r.ub2 - lo);
  });
  const double worst_rand = *std::min_element(margin.begin(), margin.end());
  worst = std::min(worst, worst_rand);
  return {worst >= -1e-9, fmt("min(ub - best achievable): reference sweep rows %.3g, 1000 random instances %.3g",
                              worst_fig, worst_rand)};
}

Outcome criterion7() {
  testing::InstanceGenerator gen(1007);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto p = gen.params(2.0, 50.0);
    GenieParams g = gen.genie();
    while (!(g.eta1 > 0.05 && g.eta2 > 0.05)) g = gen.genie();
    const auto rep = montecarlo_covariance_check(p, g, 1000000, 42 + i);
    worst = std::max({worst, rep.gap_mac, rep.gap_p2p});
  }
  return {worst <= 0.01, fmt("20 pairs at 1e6 samples, max |analytic - sampled| = %.3g bits", worst)};
}

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

Outcome criterion8() {
  testing::InstanceGenerator gen(1008);
  std::vector<PimacParams> base(100);
  for (auto& p : base) p = gen.params(2.0, 50.0);
  // [instance][0: base, 1..3: h12, h22, h31 negated]
  std::vector<std::array<SweepRow, 4>> out(base.size());
  parallel_for(base.size() * 4, [&](std::size_t k) {
    PimacParams p = base[k / 4];
    if (k % 4 == 1) p.h12 = -p.h12;
    if (k % 4 == 2) p.h22 = -p.h22;
    if (k % 4 == 3) p.h31 = -p.h31;
    out[k / 4][k % 4] = evaluate_point(p);
  });
  static const char* kNames[] = {"sd_tin", "tdma_tin", "pc_tin", "tdma", "ub1", "ub2"};
  static const char* kGains[] = {"h12", "h22", "h31"};
  std::size_t diff[3][6] = {};
  double max_dev[3][6] = {};
  for (const auto& o : out) {
    for (int s = 1; s <= 3; ++s) {
      const SweepRow &a = o[0], &b = o[s];
      const std::optional<double> va[] = {a.sd_tin, a.tdma_tin, a.pc_tin, a.tdma, a.ub1, a.ub2};
      const std::optional<double> vb[] = {b.sd_tin, b.tdma_tin, b.pc_tin, b.tdma, b.ub1, b.ub2};
      for (int q = 0; q < 6; ++q) {
        if (same(va[q], vb[q])) continue;
        ++diff[s - 1][q];
        if (va[q] && vb[q]) max_dev[s - 1][q] = std::max(max_dev[s - 1][q], std::abs(*va[q] - *vb[q]));
      }
    }
  }
  std::string detail = "100 instances x 3 negations";
  bool ok = true;
  for (int s = 0; s < 3; ++s)
    for (int q = 0; q < 6; ++q)
      if (diff[s][q]) {
        ok = false;
        detail += fmt("; -%s changes %s in %zu/100 (max %.3g)", kGains[s], kNames[q], diff[s][q], max_dev[s][q]);
      }
  if (ok) detail += ", all six quantities bit-identical";
  return {ok, detail};
}

Outcome criterion9(const std::filesystem::path& first, const std::filesystem::path& second) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(first), b = slurp(second);
  return {!a.empty() && a == b, fmt("%s vs %s: %zu and %zu bytes, %s", first.filename().c_str(),
                                    second.filename().c_str(), a.size(), b.size(),
                                    a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path csv_dir = std::filesystem::temp_directory_path();
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--csv-dir") csv_dir = argv[i + 1];

  int failures = 0;
  auto report = [&](int n, const std::function<Outcome()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail
              << fmt(" [%.1fs]", s) << std::endl;
  };

  report(1, [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto o = criterion1();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!(s < 30)) o = {false, o.detail + "; runtime limit 30s exceeded"};
    return o;
  });
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);

  std::vector<SweepRow> ref_rows;
  const auto run1 = csv_dir / "acceptance_reference_run1.csv";
  const auto run2 = csv_dir / "acceptance_reference_run2.csv";
  report(5, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    ref_rows = run_sweep(reference_sweep_config());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit_csv(ref_rows, run1.string());
    return criterion5(ref_rows, s);
  });
  report(6, [&] {
    if (ref_rows.empty()) return Outcome{false, "reference sweep unavailable"};
    return criterion6(ref_rows);
  });
  report(7, [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto o = criterion7();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!(s < 60)) o = {false, o.detail + "; runtime limit 60s exceeded"};
    return o;
  });
  report(8, criterion8);
  report(9, [&] {
    emit_csv(run_sweep(reference_sweep_config()), run2.string());
    return criterion9(run1, run2);
  });

  std::cout << (failures ? "FAILED " : "PASSED ") << 9 - failures << "/9 criteria" << std::endl;
  return failures ? 1 : 0;
}
