#include "leolink/channel.hpp"

#include <cmath>

#include "leolink/errors.hpp"
#include "leolink/rng.hpp"

namespace leolink {

double slant_range_m(double altitude_m, double elevation_deg) {
  const double e = elevation_deg * kPi / 180.0;
  const double re_sin = kEarthRadius * std::sin(e);
  return std::sqrt(re_sin * re_sin + altitude_m * altitude_m +
                   2.0 * kEarthRadius * altitude_m) -
         re_sin;
}

std::vector<UserChannelState> sample_user_states(const SystemConfig& config,
                                                 std::uint64_t rng_seed) {
  config.validate();
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> elev(config.min_elevation_deg, 90.0);
  std::uniform_real_distribution<double> sat_doppler(
      -config.max_sat_doppler_hz, config.max_sat_doppler_hz);
  std::uniform_real_distribution<double> ut_doppler(
      -config.max_user_doppler_hz, config.max_user_doppler_hz);
  std::uniform_int_distribution<int> paths(1, config.max_paths);
  std::uniform_real_distribution<double> excess_delay(0.0,
                                                      config.delay_spread_s);

  std::vector<UserChannelState> states(config.n_users);
  for (auto& st : states) {
    // Directional cosines uniform over [-1,1] x [-sin(theta_y), sin(theta_y)]
    // rather than uniform physical angles: spreads the beams and matches the
    // angular separation of scheduled users in a multi-beam system.
    const double cos_ty = unit(rng);
    const double theta_y = std::acos(cos_ty);
    const double sin_ty = std::sin(theta_y);
    const double dx = sin_ty * unit(rng);
    const double theta_x =
        sin_ty > 1e-12 ? std::acos(std::clamp(dx / sin_ty, -1.0, 1.0)) : 0.0;

    st.geometry.theta_x_rad = theta_x;
    st.geometry.theta_y_rad = theta_y;
    st.geometry.elevation_deg = elev(rng);
    st.geometry.distance_m =
        slant_range_m(config.altitude_m, st.geometry.elevation_deg);

    st.rician_kappa = config.rician_kappa;
    st.beta = 1.0;
    st.tau_los_s = st.geometry.distance_m / kSpeedOfLight;
    st.nu_sat_hz = sat_doppler(rng);
    st.nu_ut_los_hz = ut_doppler(rng);

    st.num_paths = paths(rng);
    st.path_gains = CVector(st.num_paths);
    st.tau_mp_s = RVector(st.num_paths);
    st.nu_ut_nlos_hz = RVector(st.num_paths);
    for (int p = 0; p < st.num_paths; ++p) {
      st.path_gains[p] = complex_normal(rng);
      st.tau_mp_s[p] = excess_delay(rng);
      st.nu_ut_nlos_hz[p] = ut_doppler(rng);
    }
  }
  return states;
}

ArrayResponseMatrix upa_response(const ArrayGeometry& geometry,
                                 const std::vector<UserGeometry>& users) {
  if (geometry.m_x < 1 || geometry.m_y < 1)
    throw SizeError("array dimensions must be >= 1");
  const int mx = geometry.m_x;
  const int my = geometry.m_y;
  const int k = static_cast<int>(users.size());

  ArrayResponseMatrix out;
  out.a = CMatrix(k, mx * my);
  const double norm = 1.0 / std::sqrt(static_cast<double>(mx * my));
  for (int u = 0; u < k; ++u) {
    const double dir_x =
        std::sin(users[u].theta_y_rad) * std::cos(users[u].theta_x_rad);
    const double dir_y = std::cos(users[u].theta_y_rad);
    // Kronecker product of the two steering vectors, entry by entry.
    for (int ix = 0; ix < mx; ++ix) {
      const double phase_x = -kPi * ix * dir_x;
      for (int iy = 0; iy < my; ++iy) {
        const double phase = phase_x - kPi * iy * dir_y;
        out.a(u, ix * my + iy) = std::polar(norm, phase);
      }
    }
  }
  return out;
}

Complex channel_sample(const UserChannelState& state, double t, double f) {
  const Complex los =
      std::sqrt(state.rician_kappa) *
      std::polar(1.0, kTwoPi * (t * state.nu_ut_los_hz - f * state.tau_los_s));
  Complex nlos(0.0, 0.0);
  for (int p = 0; p < state.num_paths; ++p) {
    const double tau = state.tau_los_s + state.tau_mp_s[p];
    nlos += state.path_gains[p] *
            std::polar(1.0, kTwoPi * (t * state.nu_ut_nlos_hz[p] - f * tau));
  }
  nlos *= std::sqrt(1.0 / state.num_paths);
  return std::sqrt(state.beta / (state.rician_kappa + 1.0)) *
         std::polar(1.0, kTwoPi * t * state.nu_sat_hz) * (los + nlos);
}

CompensationMatrix compensation_matrix(
    const std::vector<UserChannelState>& states, const SystemConfig& config,
    int subcarrier) {
  const int s_total = config.n_symbols();
  if (s_total < 1) throw SizeError("need at least one symbol");
  const double t_step = config.symbol_duration_s();
  const double delay_freq = subcarrier / t_step;  // c / T_sl

  CompensationMatrix out;
  out.omega = CMatrix(static_cast<int>(states.size()), s_total);
  for (int k = 0; k < static_cast<int>(states.size()); ++k) {
    const double tau_term = delay_freq * states[k].tau_los_s;
    for (int s = 0; s < s_total; ++s) {
      const double phase =
          -kTwoPi * ((s + 1) * t_step * states[k].nu_sat_hz - tau_term);
      out.omega(k, s) = std::polar(1.0, phase);
    }
  }
  return out;
}

EffectiveChannelMatrix effective_channel(
    const std::vector<UserChannelState>& states, const SystemConfig& config,
    int subcarrier) {
  const int s_total = config.n_symbols();
  const double t_step = config.symbol_duration_s();
  const double f_offset = subcarrier * config.subcarrier_spacing_hz;
  const CompensationMatrix omega =
      compensation_matrix(states, config, subcarrier);

  EffectiveChannelMatrix out;
  out.subcarrier_index = subcarrier;
  out.g = CMatrix(static_cast<int>(states.size()), s_total);
  for (int k = 0; k < static_cast<int>(states.size()); ++k)
    for (int s = 0; s < s_total; ++s)
      out.g(k, s) =
          channel_sample(states[k], (s + 1) * t_step, f_offset) *
          omega.omega(k, s);
  return out;
}

}  // namespace leolink
