#include "leolink/metrics.hpp"

#include <cmath>

#include "leolink/errors.hpp"

namespace leolink {

namespace {
constexpr double kEqualizerFloor = 1e-12;
}

double nmse(const CMatrix& reference_data, const CMatrix& estimate) {
  if (reference_data.rows() != estimate.rows() ||
      reference_data.cols() != estimate.cols())
    throw SizeError("nmse: shape mismatch");
  const double ref_energy = reference_data.squaredNorm();
  if (ref_energy == 0.0) throw MetricError("nmse: zero reference norm");
  return (reference_data - estimate).squaredNorm() / ref_energy;
}

DetectionResult equalize_detect(const FrameObservation& obs,
                                const ChannelEstimate& estimate,
                                const SymbolMatrix& symbols) {
  const int n_pilots = symbols.pilot_count;
  const int n_data = symbols.data_count();
  const auto k_users = symbols.x.rows();
  if (estimate.h_hat.rows() != k_users || estimate.h_hat.cols() != n_data)
    throw SizeError("equalize_detect: estimate shape mismatch");
  if (obs.y_demixed.rows() != symbols.x.cols() ||
      obs.y_demixed.cols() != k_users)
    throw SizeError("equalize_detect: observation shape mismatch");

  const CVector alphabet = constellation_alphabet(symbols.constellation);
  DetectionResult result;
  result.detected = IMatrix(k_users, n_data);
  result.detected_symbols = CMatrix(k_users, n_data);
  long errors = 0;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    for (int s = 0; s < n_data; ++s) {
      const Complex h = estimate.h_hat(k, s);
      if (std::abs(h) < kEqualizerFloor)
        throw MetricError("equalize_detect: singular estimate at user " +
                          std::to_string(k) + " symbol " + std::to_string(s));
      const Complex x_hat = obs.y_demixed(n_pilots + s, k) / h;
      const int idx = nearest_symbol(x_hat, alphabet);
      result.detected(k, s) = idx;
      result.detected_symbols(k, s) = alphabet[idx];
      const int truth = nearest_symbol(symbols.x(k, n_pilots + s), alphabet);
      if (idx != truth) ++errors;
    }
  }
  result.ser = static_cast<double>(errors) /
               (static_cast<double>(k_users) * n_data);
  return result;
}

double snr_to_sigma2(const EffectiveChannelMatrix& effective,
                     const SymbolMatrix& symbols,
                     const ArrayResponseMatrix& array, double snr_db) {
  if (!std::isfinite(snr_db))
    throw ConfigError("snr_to_sigma2: SNR must be finite");
  const CMatrix signal =
      effective.g.cwiseProduct(symbols.x).transpose() * array.a;
  const double s_total = static_cast<double>(signal.rows());
  const double m_ant = static_cast<double>(signal.cols());
  return signal.squaredNorm() /
         (s_total * m_ant * std::pow(10.0, snr_db / 10.0));
}

}  // namespace leolink
