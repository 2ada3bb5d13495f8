/**
 * @file config.hpp
 * @brief System configuration: link parameters plus simulation knobs.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leolink/modulation.hpp"

namespace leolink {

/**
 * All scalar parameters of the simulated uplink plus Monte Carlo knobs.
 * Defaults correspond to the 3GPP NTN reference scenario used throughout
 * (2 GHz carrier, 15.36 MHz bandwidth, 16x16 UPA, 10 users, 600 km orbit).
 */
struct SystemConfig {
  // Link parameters
  double carrier_hz = 2.0e9;
  double bandwidth_hz = 15.36e6;
  double subcarrier_spacing_hz = 60.0e3;
  int n_subcarriers = 256;
  int n_users = 10;
  int array_x = 16;
  int array_y = 16;
  double altitude_m = 600.0e3;
  double max_sat_doppler_hz = 48.0e3;
  double min_elevation_deg = 10.0;
  double delay_spread_s = 250.0e-9;
  double max_user_doppler_hz = 200.0;
  int max_paths = 5;
  int n_pilots = 5;
  int n_data = 50;
  Constellation constellation = Constellation::kQam16;
  int n_cp = 16;
  double rician_kappa = 10.0;  // linear

  // Estimator knobs
  int n_em = 10;
  int bem_order = 3;

  // Simulation knobs
  int subcarrier_index = 0;  // centered index c; 0 = mid-band
  double snr_db = 10.0;
  int trials = 500;
  std::uint64_t base_seed = 1;
  int n_threads = 0;  // 0 = hardware concurrency
  std::vector<double> snr_grid = {-5.0, 0.0, 5.0, 10.0};
  std::vector<int> iter_grid = {1, 2, 3, 5, 7, 10};
  std::vector<double> snr_list = {0.0, 10.0};
  std::vector<int> d_grid = {3, 4, 5, 7, 10, 15, 20, 30, 40, 50};
  std::vector<std::string> methods = {"pb", "pls", "em"};

  // Derived timing quantities. The sampling period follows the half-bandwidth
  // convention T_s = 1/(2B); the OFDM symbol duration counts the cyclic
  // prefix once.
  double sample_period_s() const { return 1.0 / (2.0 * bandwidth_hz); }
  double cyclic_prefix_s() const { return n_cp * sample_period_s(); }
  double symbol_duration_s() const {
    return n_subcarriers * sample_period_s() + cyclic_prefix_s();
  }
  int n_symbols() const { return n_pilots + n_data; }

  /// Throws ConfigError if any field is out of range or inconsistent.
  void validate() const;
};

/// Parses a flat `key = value` file (# starts a comment). Unknown keys error.
SystemConfig load_config(const std::filesystem::path& path);

/// Applies a single `key=value` override; throws ConfigError on unknown key.
void apply_override(SystemConfig& cfg, const std::string& key,
                    const std::string& value);

/// Serializes the resolved configuration in the config-file format.
std::string format_config(const SystemConfig& cfg);

/**
 * Free-space path loss in dB, 20*log10(4*pi*d*f_c/c). Documentation utility;
 * the simulator itself runs with unit large-scale gain and parameterizes the
 * operating point purely through SNR.
 */
double path_loss_db(double distance_m, double carrier_hz);

}  // namespace leolink
