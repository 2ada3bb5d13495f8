/**
 * @file harness.hpp
 * @brief Seeded Monte Carlo orchestration: single trials, sweep experiments
 *        over SNR / EM iterations / BEM order, and CSV result emission.
 *
 * Trials are the unit of parallel work. Trial i uses seed base_seed + i and
 * is fully self-contained, so results are bit-identical for any worker count
 * and across runs; sweep aggregation reduces per-trial values in trial-index
 * order. Within a trial every method scores the same channel, symbols, and
 * noise realization (paired comparison).
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leolink/config.hpp"
#include "leolink/metrics.hpp"

namespace leolink {

struct TrialResult {
  std::vector<TrialMetrics> metrics;  // one entry per requested method
  const TrialMetrics& of(Method m) const;
};

/**
 * One full pipeline pass: user states -> effective channel -> frame
 * synthesis -> P-LS / PB / EM estimates -> NMSE and SER per method.
 * Degenerate geometry (rank-deficient array response) is retried with a
 * perturbed seed at most 3 times, then rethrown. Deterministic given
 * (config, trial_seed).
 */
TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed);
TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed,
                      const std::vector<Method>& methods);

enum class SweepAxis { kSnr, kEmIter, kBemOrder };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Aggregate statistics of one method at one sweep point.
struct MethodAggregate {
  std::string method;   // "pb", "pls", "em", or a labelled variant
  double mean_nmse = 0.0;
  double mean_ser = 0.0;
  double ci_nmse = 0.0;  // normal-approximation 95% half-width
  double ci_ser = 0.0;
  double median_nmse = 0.0;
  double median_ser = 0.0;
};

struct SweepPoint {
  double axis_value = 0.0;
  int trials = 0;
  std::vector<MethodAggregate> per_method;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kSnr;
  std::uint64_t base_seed = 0;
  std::vector<SweepPoint> points;
};

/// NMSE and SER vs SNR for the configured methods (paired trials per point).
SweepResult sweep_snr(const SystemConfig& config,
                      const std::vector<double>& snr_grid, int trials);

/**
 * NMSE vs EM iteration count, one labelled aggregate per SNR in snr_list
 * (method labels "em_snr<value>"). EM only; each grid value is an
 * independent full EM run sharing the trial realization.
 */
SweepResult sweep_em_iterations(const SystemConfig& config,
                                const std::vector<int>& iter_grid,
                                const std::vector<double>& snr_list,
                                int trials);

/// NMSE vs BEM order D at the configured SNR. EM only.
SweepResult sweep_bem_order(const SystemConfig& config,
                            const std::vector<int>& d_grid, int trials);

/// Index of the sweep point with the lowest mean NMSE for the given method.
int argmin_mean_nmse(const SweepResult& result, const std::string& method);

/**
 * Writes <stem>.csv (one row per axis value and method; 17-significant-digit
 * floats so parsing is lossless) and <stem>_plot.dat (wide per-axis rows for
 * plotting). Byte-stable for identical inputs.
 */
void emit_results(const SweepResult& result,
                  const std::filesystem::path& stem);

/// Parses a file produced by emit_results back into a SweepResult.
SweepResult parse_results_csv(const std::filesystem::path& csv_path);

}  // namespace leolink
