/**
 * @file channel.hpp
 * @brief User geometry, UPA responses, and time-varying Rician channel
 *        realizations with Doppler/delay compensation.
 *
 * The scalar channel of user k at time t and frequency offset f is
 *
 *   h_k(t,f) = sqrt(beta_k/(kappa_k+1)) * exp(j*2*pi*t*nu_sat)
 *              * (sqrt(kappa_k) * exp(j*2*pi*(t*nu_ut_los - f*tau_los))
 *                 + sqrt(1/P_k) * sum_p g_p * exp(j*2*pi*(t*nu_ut_nlos_p
 *                                                  - f*(tau_los+tau_mp_p))))
 *
 * without the directional factor, which is applied separately through the
 * array response matrix. The compensation matrix removes the satellite
 * Doppler and LoS delay phases (the terms known from ephemeris/ranging);
 * user-mobility Doppler and multipath remain and age the channel over the
 * frame. The effective channel -- scalar channel times compensation phase --
 * is the estimation target.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "leolink/config.hpp"
#include "leolink/types.hpp"

namespace leolink {

struct ArrayGeometry {
  int m_x = 1;
  int m_y = 1;
  int m() const { return m_x * m_y; }
};

struct UserGeometry {
  double theta_x_rad = 0.0;   // x-axis propagation angle
  double theta_y_rad = 0.0;   // y-axis propagation angle
  double distance_m = 0.0;    // satellite-user slant range
  double elevation_deg = 0.0;
};

/// Per-user channel parameters drawn once per frame.
struct UserChannelState {
  UserGeometry geometry;
  double rician_kappa = 1.0;  // linear
  int num_paths = 1;
  CVector path_gains;         // g_p ~ CN(0,1), length num_paths
  double tau_los_s = 0.0;
  RVector tau_mp_s;           // multipath excess delays, length num_paths
  double nu_sat_hz = 0.0;     // satellite Doppler (compensated)
  double nu_ut_los_hz = 0.0;  // user LoS Doppler (uncompensated)
  RVector nu_ut_nlos_hz;      // per-path user Doppler, length num_paths
  double beta = 1.0;          // linear large-scale gain
};

struct ArrayResponseMatrix {
  CMatrix a;  // K x M, rows are unit-norm steering vectors
};

struct CompensationMatrix {
  CMatrix omega;  // K x S, unit-modulus entries
};

/// Post-compensation effective channel, the estimation target.
struct EffectiveChannelMatrix {
  CMatrix g;  // K x S
  int subcarrier_index = 0;
};

/// Slant range for a spherical Earth, exact at elevation 90 deg (= altitude).
double slant_range_m(double altitude_m, double elevation_deg);

/**
 * Draws K independent user states: directional cosines uniform over the
 * visible hemisphere, elevation uniform in [min_elevation, 90] deg, Dopplers
 * uniform within the configured bounds, path count uniform in [1, max_paths],
 * Rayleigh path gains CN(0,1). Deterministic given the seed.
 */
std::vector<UserChannelState> sample_user_states(const SystemConfig& config,
                                                 std::uint64_t rng_seed);

/**
 * K x M UPA response matrix. Row k is the Kronecker product of the x and y
 * steering vectors at directional cosines sin(theta_y)cos(theta_x) and
 * cos(theta_y); every entry has modulus 1/sqrt(M).
 */
ArrayResponseMatrix upa_response(const ArrayGeometry& geometry,
                                 const std::vector<UserGeometry>& users);

/// Scalar channel sample at time t (s) and frequency offset f (Hz).
Complex channel_sample(const UserChannelState& state, double t, double f);

/**
 * Compensation phases Omega[k][s] = exp(-j*2*pi*(s*T_sl*nu_sat_k
 * - (c/T_sl)*tau_los_k)) for s = 1..S. Applied at the transmitter; cancels
 * the satellite Doppler exactly because the channel is sampled at t = s*T_sl.
 */
CompensationMatrix compensation_matrix(
    const std::vector<UserChannelState>& states, const SystemConfig& config,
    int subcarrier);

/**
 * Effective channel g[k][s] = channel_sample(k, s*T_sl, c*f_s) * Omega[k][s].
 */
EffectiveChannelMatrix effective_channel(
    const std::vector<UserChannelState>& states, const SystemConfig& config,
    int subcarrier);

}  // namespace leolink
