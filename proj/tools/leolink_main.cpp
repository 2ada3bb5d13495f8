/**
 * @file leolink_main.cpp
 * @brief Command-line front end: single-trial dumps and the three sweep
 *        experiments (SNR, EM iterations, BEM order).
 */
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "leolink/config.hpp"
#include "leolink/errors.hpp"
#include "leolink/harness.hpp"

namespace {

using leolink::SystemConfig;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool print_config = false;
  int trials = -1;
  long long seed = -1;
  int threads = -1;
  std::string methods;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "Configuration file (key = value lines)");
  cmd->add_option("--out", opt.out_dir, "Output directory for result files");
  cmd->add_option("--trials", opt.trials, "Monte Carlo trials per sweep point");
  cmd->add_option("--seed", opt.seed, "Base seed; trial i uses seed base+i");
  cmd->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--methods", opt.methods, "Comma-separated subset of pb,pls,em");
  cmd->add_option("--set", opt.overrides, "Extra key=value config override (repeatable)")
      ->take_all();
  cmd->add_flag("--print-config", opt.print_config, "Dump the resolved configuration");
}

SystemConfig resolve_config(const CommonOptions& opt) {
  SystemConfig cfg;
  if (!opt.config_path.empty()) cfg = leolink::load_config(opt.config_path);
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw leolink::ConfigError("--set expects key=value, got: " + kv);
    leolink::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opt.trials >= 0) cfg.trials = opt.trials;
  if (opt.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.threads >= 0) cfg.n_threads = opt.threads;
  if (!opt.methods.empty()) {
    cfg.methods.clear();
    std::string item;
    std::stringstream ss(opt.methods);
    while (std::getline(ss, item, ',')) cfg.methods.push_back(item);
  }
  cfg.validate();
  if (opt.print_config) std::cout << leolink::format_config(cfg);
  return cfg;
}

std::filesystem::path out_stem(const CommonOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / name;
}

void report(const leolink::SweepResult& result, const std::filesystem::path& stem) {
  leolink::emit_results(result, stem);
  std::cout << "wrote " << stem.string() << ".csv and " << stem.string()
            << "_plot.dat\n";
  for (const auto& point : result.points) {
    std::printf("  %s=%g:", to_string(result.axis).c_str(), point.axis_value);
    for (const auto& agg : point.per_method)
      std::printf("  %s nmse=%.4e ser=%.4e", agg.method.c_str(), agg.mean_nmse,
                  agg.mean_ser);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leolink: uplink channel-estimation Monte Carlo harness"};
  app.require_subcommand(1);

  CommonOptions trial_opt, snr_opt, iter_opt, d_opt;
  std::vector<double> snr_grid, snr_list;
  std::vector<int> iter_grid, d_grid;
  double trial_snr = std::numeric_limits<double>::quiet_NaN();

  auto* trial_cmd = app.add_subcommand("trial", "Run one trial and dump metrics");
  add_common(trial_cmd, trial_opt);
  trial_cmd->add_option("--snr", trial_snr, "Override SNR in dB");

  auto* snr_cmd = app.add_subcommand("sweep-snr", "NMSE/SER vs SNR");
  add_common(snr_cmd, snr_opt);
  snr_cmd->add_option("--snr-grid", snr_grid, "SNR grid in dB")->delimiter(',');

  auto* iter_cmd = app.add_subcommand("sweep-iters", "NMSE vs EM iteration count");
  add_common(iter_cmd, iter_opt);
  iter_cmd->add_option("--iter-grid", iter_grid, "EM iteration grid")->delimiter(',');
  iter_cmd->add_option("--snr-list", snr_list, "SNR values in dB")->delimiter(',');

  auto* d_cmd = app.add_subcommand("sweep-d", "NMSE vs BEM order D");
  add_common(d_cmd, d_opt);
  d_cmd->add_option("--d-grid", d_grid, "Basis order grid")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (trial_cmd->parsed()) {
      SystemConfig cfg = resolve_config(trial_opt);
      if (!std::isnan(trial_snr)) cfg.snr_db = trial_snr;
      const auto result = leolink::run_trial(cfg, cfg.base_seed);
      std::printf("trial seed=%llu snr=%g dB\n",
                  static_cast<unsigned long long>(cfg.base_seed), cfg.snr_db);
      for (const auto& m : result.metrics)
        std::printf("  %-3s nmse=%.6e ser=%.6e n_em=%d d=%d\n",
                    to_string(m.method).c_str(), m.nmse, m.ser, m.n_em,
                    m.d_order);
    } else if (snr_cmd->parsed()) {
      SystemConfig cfg = resolve_config(snr_opt);
      if (!snr_grid.empty()) cfg.snr_grid = snr_grid;
      report(leolink::sweep_snr(cfg, cfg.snr_grid, cfg.trials),
             out_stem(snr_opt, "sweep_snr"));
    } else if (iter_cmd->parsed()) {
      SystemConfig cfg = resolve_config(iter_opt);
      if (!iter_grid.empty()) cfg.iter_grid = iter_grid;
      if (!snr_list.empty()) cfg.snr_list = snr_list;
      report(leolink::sweep_em_iterations(cfg, cfg.iter_grid, cfg.snr_list,
                                          cfg.trials),
             out_stem(iter_opt, "sweep_iters"));
    } else if (d_cmd->parsed()) {
      SystemConfig cfg = resolve_config(d_opt);
      if (!d_grid.empty()) cfg.d_grid = d_grid;
      const auto result = leolink::sweep_bem_order(cfg, cfg.d_grid, cfg.trials);
      report(result, out_stem(d_opt, "sweep_d"));
      const int best = leolink::argmin_mean_nmse(result, "em");
      std::printf("  argmin D = %g\n", result.points[best].axis_value);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
