// pimac: command-line front end.
//
//   pimac sweep    --h-min F --h-max F --steps N --h22 F --p1 F --p2 F --p3 F
//                  [--curves LIST] [--seed N] --out PATH
//   pimac point    --h12 F --h22 F --h31 F --p1 F --p2 F --p3 F
//   pimac validate --seed N --samples N
//
// Every subcommand accepts --config FILE with `key = value` lines named after
// the long flags (e.g. `h-min = 0`); flags given on the command line win.
//
// Exit codes: 0 success, 1 domain/config error (and a failed validation),
// 2 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pimac/pimac.hpp"

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;
constexpr double kValidationGapTolerance = 0.01;

// CLI11 only reads a config file attached to the root app, so subcommand
// config files are applied here: file values fill options the command line
// left unset, then the required flags are checked.
void apply_config(CLI::App& sub, const std::string& path, const std::vector<CLI::Option*>& required) {
  if (!path.empty()) {
    if (!std::ifstream(path)) throw pimac::IoError("cannot open config file '" + path + "'");
    for (const auto& item : CLI::ConfigINI().from_file(path)) {
      if (item.name == "++" || item.name == "--") continue;
      CLI::Option* opt = item.parents.empty() ? sub.get_option_no_throw("--" + item.name) : nullptr;
      if (opt == nullptr || opt->get_name() == "--config")
        throw pimac::DomainError("unknown config key '" + item.fullname() + "' in " + path);
      if (opt->count() == 0) {
        opt->add_result(item.inputs);
        opt->run_callback();
      }
    }
  }
  for (CLI::Option* opt : required)
    if (opt->count() == 0) throw CLI::RequiredError(opt->get_name());
}

int run_sweep_command(const pimac::SweepConfig& cfg, const std::string& curves) {
  pimac::SweepConfig c = cfg;
  if (!curves.empty()) c.curves = pimac::CurveSet::parse(curves);
  const auto rows = pimac::run_sweep(c);
  pimac::emit_csv(rows, c.out);
  if (c.curves.has(pimac::Curve::PcTin))
    for (const auto& iv : pimac::detect_pc_tin_regimes(rows))
      std::cout << "regime " << pimac::regime_name(iv.regime) << " h=[" << pimac::format_number(iv.h_from)
                << ", " << pimac::format_number(iv.h_to) << "]\n";
  std::cout << "wrote " << rows.size() << " rows to " << c.out << '\n';
  return 0;
}

int run_validate_command(std::uint64_t seed, std::size_t samples) {
  struct Case {
    const char* label;
    pimac::PimacParams params;
    pimac::GenieParams genie;
  };
  const Case cases[] = {
      {"reference_h0.5", {0.5, 0.2, 0.5, 10.0, 10.0, 10.0}, {0.0, 0.0, 1.0, 1.0}},
      {"reference_h0.5_correlated", {0.5, 0.2, 0.5, 10.0, 10.0, 10.0}, {0.4, -0.3, 0.8, 0.7}},
      {"zero_gains", {0.0, 0.0, 0.0, 10.0, 10.0, 10.0}, {0.0, 0.0, 1.0, 1.0}},
  };
  bool ok = true;
  for (const auto& c : cases) {
    const auto rep = pimac::montecarlo_covariance_check(c.params, c.genie, samples, seed);
    pimac::write_montecarlo_report(std::cout, c.label, rep);
    ok = ok && rep.gap_mac <= kValidationGapTolerance && rep.gap_p2p <= kValidationGapTolerance;
  }
  std::cout << "status=" << (ok ? "pass" : "fail") << '\n';
  return ok ? 0 : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PIMAC sum-rate and sum-capacity bound calculator"};
  app.require_subcommand(1);

  std::vector<CLI::Option*> sweep_required, point_required;
  pimac::SweepConfig sweep_cfg;
  std::string curves;
  auto* sweep = app.add_subcommand("sweep", "h12 = h31 = h sweep to CSV");
  std::string sweep_conf;
  sweep->add_option("--config", sweep_conf, "key = value config file");
  sweep_required.push_back(sweep->add_option("--h-min", sweep_cfg.h_min));
  sweep_required.push_back(sweep->add_option("--h-max", sweep_cfg.h_max));
  sweep_required.push_back(sweep->add_option("--steps", sweep_cfg.steps));
  sweep_required.push_back(sweep->add_option("--h22", sweep_cfg.h22));
  sweep_required.push_back(sweep->add_option("--p1", sweep_cfg.p1));
  sweep_required.push_back(sweep->add_option("--p2", sweep_cfg.p2));
  sweep_required.push_back(sweep->add_option("--p3", sweep_cfg.p3));
  sweep->add_option("--curves", curves, "comma-separated subset of sd_tin,tdma_tin,pc_tin,tdma,ub1,ub2");
  sweep->add_option("--seed", sweep_cfg.seed);
  sweep_required.push_back(sweep->add_option("--out", sweep_cfg.out));
  sweep->add_option("--threads", sweep_cfg.threads, "worker threads (0 = all cores)");

  pimac::PimacParams point_params;
  auto* point = app.add_subcommand("point", "all quantities at one channel instance");
  std::string point_conf;
  point->add_option("--config", point_conf, "key = value config file");
  point_required.push_back(point->add_option("--h12", point_params.h12));
  point_required.push_back(point->add_option("--h22", point_params.h22));
  point_required.push_back(point->add_option("--h31", point_params.h31));
  point_required.push_back(point->add_option("--p1", point_params.p1_max));
  point_required.push_back(point->add_option("--p2", point_params.p2_max));
  point_required.push_back(point->add_option("--p3", point_params.p3_max));

  std::uint64_t validate_seed = 42;
  std::size_t validate_samples = 1000000;
  auto* validate = app.add_subcommand("validate", "Monte-Carlo check of the genie covariance");
  std::string validate_conf;
  validate->add_option("--config", validate_conf, "key = value config file");
  validate->add_option("--seed", validate_seed);
  validate->add_option("--samples", validate_samples);

  try {
    app.parse(argc, argv);
    if (*sweep) apply_config(*sweep, sweep_conf, sweep_required);
    if (*point) apply_config(*point, point_conf, point_required);
    if (*validate) apply_config(*validate, validate_conf, {});
  } catch (const pimac::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const pimac::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const CLI::FileError& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitDomain;
  }

  try {
    if (*sweep) return run_sweep_command(sweep_cfg, curves);
    if (*point) {
      pimac::write_point_report(std::cout, pimac::evaluate_point(point_params));
      return 0;
    }
    if (*validate) return run_validate_command(validate_seed, validate_samples);
  } catch (const pimac::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitDomain;
}
