#include "leolink/estimators.hpp"

#include <cmath>

#include "leolink/errors.hpp"

namespace leolink {

namespace {
// Floor applied to the observation noise variance inside the EM loop; keeps
// the posterior defined in the sigma^2 = 0 corner, where it reduces to a
// one-hot at the nearest hypothesis.
constexpr double kSigma2Floor = 1e-12;
}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kPb: return "pb";
    case Method::kPls: return "pls";
    case Method::kEm: return "em";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "pb") return Method::kPb;
  if (name == "pls") return Method::kPls;
  if (name == "em") return Method::kEm;
  throw ConfigError("unknown method: " + name);
}

SymbolHypothesisSet make_hypotheses(Constellation c) {
  SymbolHypothesisSet h;
  h.alphabet = constellation_alphabet(c);
  h.n_hypotheses = static_cast<int>(h.alphabet.size());
  return h;
}

ChannelEstimate pls_initial_estimate(const FrameObservation& obs,
                                     const SymbolMatrix& symbols) {
  const int n_pilots = symbols.pilot_count;
  if (n_pilots < 1) throw SizeError("pls: need at least one pilot symbol");
  const auto k_users = symbols.x.rows();
  const int n_data = symbols.data_count();
  if (obs.y_demixed.cols() != k_users ||
      obs.y_demixed.rows() != symbols.x.cols())
    throw SizeError("pls: observation/symbol dimension mismatch");

  ChannelEstimate est;
  est.method = Method::kPls;
  est.h_hat = CMatrix(k_users, n_data);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    Complex acc(0.0, 0.0);
    for (int s = 0; s < n_pilots; ++s) {
      const Complex pilot = symbols.x(k, s);
      if (std::abs(pilot) == 0.0)
        throw NumericError("pls: zero pilot symbol");
      acc += obs.y_demixed(s, k) / pilot;
    }
    est.h_hat.row(k).setConstant(acc / static_cast<double>(n_pilots));
  }
  return est;
}

ChannelEstimate pb_genie_estimate(const EffectiveChannelMatrix& effective,
                                  int pilot_count) {
  if (pilot_count < 1 || pilot_count >= effective.g.cols())
    throw SizeError("pb: pilot count out of range");
  const auto k_users = effective.g.rows();
  const auto n_data = effective.g.cols() - pilot_count;

  ChannelEstimate est;
  est.method = Method::kPb;
  est.h_hat = CMatrix(k_users, n_data);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const Complex mean =
        effective.g.row(k).head(pilot_count).mean();
    est.h_hat.row(k).setConstant(mean);
  }
  return est;
}

RVector em_posterior(Complex y, Complex h_hat, double sigma2,
                     const SymbolHypothesisSet& hypotheses) {
  if (sigma2 <= 0.0) throw ConfigError("em_posterior: sigma2 must be > 0");
  const int n = hypotheses.n_hypotheses;
  RVector log_w(n);
  for (int i = 0; i < n; ++i)
    log_w[i] = -std::norm(y - h_hat * hypotheses.alphabet[i]) / sigma2;
  const double max_log = log_w.maxCoeff();
  RVector w = (log_w.array() - max_log).exp();
  const double total = w.sum();
  if (!std::isfinite(total) || total <= 0.0)
    throw NumericError("em_posterior: non-finite posterior");
  return w / total;
}

ChannelEstimate em_estimate(const FrameObservation& obs,
                            const ChannelEstimate& init,
                            const BasisMatrix& basis,
                            const SymbolHypothesisSet& hypotheses,
                            int n_iterations, double rel_stop_tol) {
  if (n_iterations < 1) throw ConfigError("em: n_iterations must be >= 1");
  const int n_data = basis.length;
  const auto k_users = init.h_hat.rows();
  if (init.h_hat.cols() != n_data)
    throw SizeError("em: init estimate does not cover the data phase");
  const auto s_total = obs.y_demixed.rows();
  const int pilot_offset = static_cast<int>(s_total) - n_data;
  if (pilot_offset < 0 || obs.y_demixed.cols() != k_users)
    throw SizeError("em: observation/basis dimension mismatch");

  const double sigma2 = std::max(obs.noise_variance, kSigma2Floor);
  const int n_hyp = hypotheses.n_hypotheses;
  const RVector hyp_energy = hypotheses.alphabet.cwiseAbs2();

  ChannelEstimate est;
  est.method = Method::kEm;
  est.h_hat = init.h_hat;

  RVector log_w(n_hyp);
  CVector raw(n_data);
  int iterations_done = 0;
  for (int iter = 0; iter < n_iterations; ++iter) {
    double update_sq = 0.0;
    double ref_sq = 0.0;
    for (Eigen::Index k = 0; k < k_users; ++k) {
      for (int s = 0; s < n_data; ++s) {
        const Complex y = obs.y_demixed(pilot_offset + s, k);
        const Complex h = est.h_hat(k, s);
        // E-step: log-domain posterior with max-subtraction.
        for (int i = 0; i < n_hyp; ++i)
          log_w[i] = -std::norm(y - h * hypotheses.alphabet[i]) / sigma2;
        const double max_log = log_w.maxCoeff();
        Complex num(0.0, 0.0);
        double den = 0.0;
        for (int i = 0; i < n_hyp; ++i) {
          const double w = std::exp(log_w[i] - max_log);
          num += w * y * std::conj(hypotheses.alphabet[i]);
          den += w * hyp_energy[i];
        }
        if (den <= 0.0 || !std::isfinite(den))
          throw NumericError("em: degenerate M-step denominator");
        raw[s] = num / den;
      }
      // Subspace regularization along the symbol axis.
      const CVector smoothed = project(basis, raw);
      for (int s = 0; s < n_data; ++s) {
        update_sq += std::norm(smoothed[s] - est.h_hat(k, s));
        ref_sq += std::norm(est.h_hat(k, s));
        est.h_hat(k, s) = smoothed[s];
      }
    }
    iterations_done = iter + 1;
    if (rel_stop_tol > 0.0 && ref_sq > 0.0 &&
        std::sqrt(update_sq / ref_sq) < rel_stop_tol)
      break;
  }
  est.iterations_used = iterations_done;
  if (!est.h_hat.allFinite()) throw NumericError("em: non-finite estimate");
  return est;
}

}  // namespace leolink
