#include "leolink/frame.hpp"

#include <cmath>

#include "leolink/errors.hpp"
#include "leolink/rng.hpp"

namespace leolink {

namespace {
constexpr double kNoiselessSnrDb = 300.0;
}

CVector zadoff_chu(int length, int root) {
  if (length < 1) throw SizeError("zadoff_chu: length must be >= 1");
  CVector z(length);
  // Odd length uses n(n+1), even length n^2, keeping the sequence periodic.
  const int cf = length % 2;
  for (int n = 0; n < length; ++n) {
    const double num = static_cast<double>(n) * (n + cf);
    z[n] = std::polar(1.0, -kPi * root * num / length);
  }
  return z;
}

int largest_prime_below(int n) {
  auto is_prime = [](int v) {
    if (v < 2) return false;
    for (int d = 2; d * d <= v; ++d)
      if (v % d == 0) return false;
    return true;
  };
  for (int v = n - 1; v >= 2; --v)
    if (is_prime(v)) return v;
  return 1;
}

SymbolMatrix build_symbol_matrix(const SystemConfig& config,
                                 std::uint64_t rng_seed) {
  config.validate();
  const int k_users = config.n_users;
  const int s_total = config.n_symbols();

  SymbolMatrix out;
  out.pilot_count = config.n_pilots;
  out.constellation = config.constellation;
  out.x = CMatrix(k_users, s_total);

  const CVector zc = zadoff_chu(k_users, largest_prime_below(k_users));
  for (int s = 0; s < config.n_pilots; ++s)
    for (int k = 0; k < k_users; ++k)
      out.x(k, s) = zc[(k + s) % k_users];

  const CVector alphabet = constellation_alphabet(config.constellation);
  Rng rng(rng_seed);
  std::uniform_int_distribution<int> draw(0,
                                          static_cast<int>(alphabet.size()) - 1);
  for (int k = 0; k < k_users; ++k)
    for (int s = config.n_pilots; s < s_total; ++s)
      out.x(k, s) = alphabet[draw(rng)];
  return out;
}

CMatrix pseudo_inverse(const CMatrix& a) {
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(a);
  if (cod.rank() < a.rows())
    throw GeometryError("array response is rank-deficient (rank " +
                        std::to_string(cod.rank()) + " < " +
                        std::to_string(a.rows()) + " users)");
  return cod.pseudoInverse();
}

CMatrix demix(const CMatrix& y_raw, const ArrayResponseMatrix& array) {
  if (y_raw.cols() != array.a.cols())
    throw SizeError("demix: antenna count mismatch");
  return y_raw * pseudo_inverse(array.a);
}

FrameObservation synthesize_observation(const EffectiveChannelMatrix& effective,
                                        const SymbolMatrix& symbols,
                                        const ArrayResponseMatrix& array,
                                        double snr_db, std::uint64_t rng_seed) {
  if (!std::isfinite(snr_db))
    throw ConfigError("synthesize_observation: SNR must be finite");
  const auto k_users = effective.g.rows();
  const auto s_total = effective.g.cols();
  if (symbols.x.rows() != k_users || symbols.x.cols() != s_total ||
      array.a.rows() != k_users)
    throw SizeError("synthesize_observation: dimension mismatch");
  const auto m_ant = array.a.cols();

  const CMatrix signal =
      effective.g.cwiseProduct(symbols.x).transpose() * array.a;  // S x M

  double sigma2 = 0.0;
  if (snr_db <= kNoiselessSnrDb) {
    const double signal_energy = signal.squaredNorm();
    sigma2 = signal_energy /
             (static_cast<double>(s_total) * static_cast<double>(m_ant) *
              std::pow(10.0, snr_db / 10.0));
  }

  FrameObservation obs;
  obs.snr_db = snr_db;
  obs.noise_variance = sigma2;
  obs.y_raw = signal;
  if (sigma2 > 0.0) {
    Rng rng(rng_seed);
    const double scale = std::sqrt(sigma2);
    for (Eigen::Index s = 0; s < s_total; ++s)
      for (Eigen::Index m = 0; m < m_ant; ++m)
        obs.y_raw(s, m) += scale * complex_normal(rng);
  }
  obs.y_demixed = obs.y_raw * pseudo_inverse(array.a);
  return obs;
}

}  // namespace leolink
