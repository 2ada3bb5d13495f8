#include <doctest.h>

#include <cmath>
#include <limits>

#include "leolink/channel.hpp"
#include "leolink/errors.hpp"
#include "leolink/frame.hpp"
#include "leolink/rng.hpp"

using namespace leolink;

namespace {

// Small geometry with exactly orthogonal rows: directional cosines spaced by
// multiples of 2/M_d put every other user on a Dirichlet-kernel null.
std::vector<UserGeometry> orthogonal_users() {
  std::vector<UserGeometry> users(4);
  const double dir_x[4] = {-0.75, -0.25, 0.25, 0.75};
  for (int k = 0; k < 4; ++k) {
    users[k].theta_y_rad = kPi / 2.0;             // dir_y = 0
    users[k].theta_x_rad = std::acos(dir_x[k]);   // dir_x
  }
  return users;
}

SystemConfig tiny_config() {
  SystemConfig cfg;
  cfg.n_users = 4;
  cfg.array_x = 4;
  cfg.array_y = 4;
  cfg.n_pilots = 3;
  cfg.n_data = 12;
  return cfg;
}

}  // namespace

TEST_SUITE("frame") {

TEST_CASE("pilot entries are constant modulus") {
  const SystemConfig cfg;
  const auto sym = build_symbol_matrix(cfg, 5);
  for (int k = 0; k < sym.x.rows(); ++k)
    for (int s = 0; s < sym.pilot_count; ++s)
      CHECK(std::abs(std::abs(sym.x(k, s)) - 1.0) < 1e-12);
}

TEST_CASE("data symbols come from the unit-energy alphabet") {
  const CVector alphabet = constellation_alphabet(Constellation::kQam16);
  CHECK(alphabet.cwiseAbs2().mean() == doctest::Approx(1.0).epsilon(1e-12));

  const SystemConfig cfg;
  const auto sym = build_symbol_matrix(cfg, 6);
  for (int k = 0; k < sym.x.rows(); ++k)
    for (int s = sym.pilot_count; s < sym.x.cols(); ++s) {
      double best = 1e9;
      for (int i = 0; i < alphabet.size(); ++i)
        best = std::min(best, std::abs(sym.x(k, s) - alphabet[i]));
      CHECK(best == 0.0);
    }
}

TEST_CASE("distinct cyclic shifts are orthogonal over a full period") {
  const int k_users = 10;
  const CVector zc = zadoff_chu(k_users, largest_prime_below(k_users));
  for (int shift1 = 0; shift1 < k_users; ++shift1)
    for (int shift2 = 0; shift2 < k_users; ++shift2) {
      Complex corr(0.0, 0.0);
      for (int n = 0; n < k_users; ++n)
        corr += zc[(n + shift1) % k_users] *
                std::conj(zc[(n + shift2) % k_users]);
      if (shift1 == shift2)
        CHECK(std::abs(corr - Complex(k_users, 0.0)) < 1e-9);
      else
        CHECK(std::abs(corr) < 1e-9);
    }
}

TEST_CASE("symbol matrix deterministic and validated") {
  const SystemConfig cfg;
  const auto a = build_symbol_matrix(cfg, 77);
  const auto b = build_symbol_matrix(cfg, 77);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);

  SystemConfig bad = cfg;
  bad.n_pilots = 0;
  CHECK_THROWS_AS(build_symbol_matrix(bad, 1), ConfigError);
}

TEST_CASE("scalar passthrough with single user and antenna") {
  SystemConfig cfg = tiny_config();
  cfg.n_users = 1;
  cfg.array_x = 1;
  cfg.array_y = 1;
  EffectiveChannelMatrix eff;
  eff.g = CMatrix::Ones(1, cfg.n_symbols());
  SymbolMatrix sym;
  sym.pilot_count = cfg.n_pilots;
  sym.x = CMatrix::Ones(1, cfg.n_symbols());
  ArrayResponseMatrix arr;
  arr.a = CMatrix::Ones(1, 1);
  const auto obs = synthesize_observation(eff, sym, arr, 1000.0, 1);
  CHECK(obs.noise_variance == 0.0);
  CHECK((obs.y_raw - CMatrix::Ones(cfg.n_symbols(), 1)).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK((obs.y_demixed - obs.y_raw).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noiseless single user has zero leakage") {
  SystemConfig cfg = tiny_config();
  cfg.n_users = 1;
  const auto states = sample_user_states(cfg, 31);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, {states[0].geometry});
  const auto eff = effective_channel(states, cfg, 0);
  const auto sym = build_symbol_matrix(cfg, 32);
  const auto obs = synthesize_observation(eff, sym, arr, 400.0, 33);
  for (int s = 0; s < cfg.n_symbols(); ++s)
    CHECK(std::abs(obs.y_demixed(s, 0) - eff.g(0, s) * sym.x(0, s)) < 1e-10);
}

TEST_CASE("synthesis matches the triple-loop oracle") {
  SystemConfig cfg = tiny_config();
  cfg.n_users = 2;
  const auto states = sample_user_states(cfg, 41);
  std::vector<UserGeometry> users;
  for (const auto& st : states) users.push_back(st.geometry);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, users);
  const auto eff = effective_channel(states, cfg, 0);
  const auto sym = build_symbol_matrix(cfg, 42);
  const auto obs = synthesize_observation(eff, sym, arr, 500.0, 43);

  const int m_ant = cfg.array_x * cfg.array_y;
  for (int s = 0; s < cfg.n_symbols(); ++s)
    for (int m = 0; m < m_ant; ++m) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < cfg.n_users; ++k)
        acc += eff.g(k, s) * sym.x(k, s) * arr.a(k, m);
      CHECK(std::abs(obs.y_raw(s, m) - acc) < 1e-10);
    }

  // De-mixed field is definitionally y_raw * pinv(A).
  const CMatrix expected = obs.y_raw * pseudo_inverse(arr.a);
  CHECK((obs.y_demixed - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise realization has the calibrated variance") {
  const SystemConfig cfg = tiny_config();
  const auto states = sample_user_states(cfg, 51);
  std::vector<UserGeometry> users;
  for (const auto& st : states) users.push_back(st.geometry);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, users);
  const auto eff = effective_channel(states, cfg, 0);
  const auto sym = build_symbol_matrix(cfg, 52);

  const auto clean = synthesize_observation(eff, sym, arr, 1000.0, 53);
  const auto noisy = synthesize_observation(eff, sym, arr, 5.0, 53);
  const CMatrix noise = noisy.y_raw - clean.y_raw;
  const double measured =
      noise.squaredNorm() / static_cast<double>(noise.size());
  CHECK(measured == doctest::Approx(noisy.noise_variance).epsilon(0.15));
}

TEST_CASE("empirical SNR tracks the request within 0.2 dB") {
  const SystemConfig cfg = tiny_config();
  const auto states = sample_user_states(cfg, 61);
  std::vector<UserGeometry> users;
  for (const auto& st : states) users.push_back(st.geometry);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, users);
  const double target = 7.0;

  double snr_acc = 0.0;
  const int n_trials = 1000;
  const auto eff = effective_channel(states, cfg, 0);
  for (int t = 0; t < n_trials; ++t) {
    const auto sym = build_symbol_matrix(cfg, 1000 + t);
    const auto clean = synthesize_observation(eff, sym, arr, 1000.0, t);
    const auto noisy = synthesize_observation(eff, sym, arr, target, t);
    const double sig = clean.y_raw.squaredNorm();
    const double noise = (noisy.y_raw - clean.y_raw).squaredNorm();
    snr_acc += 10.0 * std::log10(sig / noise);
  }
  CHECK(std::abs(snr_acc / n_trials - target) < 0.2);
}

TEST_CASE("demixed noise covariance is close to sigma^2 I") {
  SystemConfig cfg;  // default 16x16 array, 10 users
  const auto states = sample_user_states(cfg, 71);
  std::vector<UserGeometry> users;
  for (const auto& st : states) users.push_back(st.geometry);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, users);
  const CMatrix pinv = pseudo_inverse(arr.a);

  const double sigma2 = 0.25;
  const int k_users = cfg.n_users;
  const int m_ant = cfg.array_x * cfg.array_y;
  CMatrix cov = CMatrix::Zero(k_users, k_users);
  Rng rng(72);
  const int n_draws = 10000;
  const int chunk = 200;
  CMatrix z(chunk, m_ant);
  for (int done = 0; done < n_draws; done += chunk) {
    for (int r = 0; r < chunk; ++r)
      for (int c = 0; c < m_ant; ++c)
        z(r, c) = std::sqrt(sigma2) * complex_normal(rng);
    const CMatrix mixed = z * pinv;
    cov += mixed.adjoint() * mixed;
  }
  cov /= static_cast<double>(n_draws);
  double off_acc = 0.0;
  int off_n = 0;
  for (int i = 0; i < k_users; ++i)
    for (int j = 0; j < k_users; ++j)
      if (i != j) {
        off_acc += std::abs(cov(i, j));
        ++off_n;
      }
  CHECK(off_acc / off_n < 0.05 * sigma2);
  for (int i = 0; i < k_users; ++i)
    CHECK(std::abs(cov(i, i)) ==
          doctest::Approx(sigma2).epsilon(0.10));
}

TEST_CASE("pseudo-inverse properties") {
  const SystemConfig cfg;
  const auto states = sample_user_states(cfg, 81);
  std::vector<UserGeometry> users;
  for (const auto& st : states) users.push_back(st.geometry);
  const auto arr = upa_response({cfg.array_x, cfg.array_y}, users);

  const CMatrix pinv = pseudo_inverse(arr.a);
  CHECK(((arr.a * pinv) - CMatrix::Identity(cfg.n_users, cfg.n_users))
            .cwiseAbs()
            .maxCoeff() < 1e-9);

  // A single unit-norm row: pinv is the conjugate transpose.
  const CMatrix single = arr.a.topRows(1);
  const CMatrix single_pinv = pseudo_inverse(single);
  CHECK((single_pinv - single.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthogonal rows make the pseudo-inverse the adjoint") {
  const auto users = orthogonal_users();
  const auto arr = upa_response({4, 4}, users);
  const CMatrix gram = arr.a * arr.a.adjoint();
  CHECK((gram - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  const CMatrix pinv = pseudo_inverse(arr.a);
  CHECK((pinv - arr.a.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("noiseless recovery through exactly orthogonal rows") {
  SystemConfig cfg = tiny_config();
  auto states = sample_user_states(cfg, 91);
  const auto users = orthogonal_users();
  for (int k = 0; k < 4; ++k) states[k].geometry = users[k];
  const auto arr = upa_response({4, 4}, users);
  const auto eff = effective_channel(states, cfg, 0);
  const auto sym = build_symbol_matrix(cfg, 92);
  const auto obs = synthesize_observation(eff, sym, arr, 400.0, 93);
  const CMatrix expected = eff.g.cwiseProduct(sym.x).transpose();
  CHECK((obs.y_demixed - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("coincident user angles raise a geometry error") {
  std::vector<UserGeometry> users(2);
  users[0].theta_x_rad = users[1].theta_x_rad = 0.4;
  users[0].theta_y_rad = users[1].theta_y_rad = 1.1;
  const auto arr = upa_response({4, 4}, users);
  CHECK_THROWS_AS(pseudo_inverse(arr.a), GeometryError);
}

TEST_CASE("non-finite SNR rejected") {
  EffectiveChannelMatrix eff;
  eff.g = CMatrix::Ones(1, 4);
  SymbolMatrix sym;
  sym.pilot_count = 1;
  sym.x = CMatrix::Ones(1, 4);
  ArrayResponseMatrix arr;
  arr.a = CMatrix::Ones(1, 1);
  CHECK_THROWS_AS(synthesize_observation(
                      eff, sym, arr, std::numeric_limits<double>::infinity(),
                      1),
                  ConfigError);
}

}  // TEST_SUITE
