/**
 * @file estimators.hpp
 * @brief Channel estimators: pilot-based least squares (P-LS), the genie
 *        pilot-phase baseline (PB), and the iterative EM estimator with
 *        discrete-Legendre subspace regularization.
 *
 * All estimators produce a K x S_data estimate covering the data phase.
 * P-LS and PB average over the training phase and hold that value constant,
 * so they age as the channel drifts. The EM estimator ignores the outdated
 * pilots entirely: each iteration computes soft symbol posteriors over the
 * data phase (E-step), re-estimates the channel per symbol from them
 * (M-step), and projects each user's estimate series onto the span of the
 * first D discrete Legendre polynomials.
 */
#pragma once

#include "leolink/dlp_basis.hpp"
#include "leolink/frame.hpp"
#include "leolink/modulation.hpp"
#include "leolink/types.hpp"

namespace leolink {

enum class Method { kPb, kPls, kEm };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct ChannelEstimate {
  CMatrix h_hat;  // K x S_data
  Method method = Method::kPls;
  int iterations_used = 0;
};

/// Candidate transmitted symbols for the E-step (the data constellation).
struct SymbolHypothesisSet {
  CVector alphabet;
  int n_hypotheses = 0;
};

SymbolHypothesisSet make_hypotheses(Constellation c);

/**
 * P-LS: per user, the de-mixed pilot observations divided by the known
 * pilots and averaged over the training phase; the single averaged value is
 * replicated across all data columns.
 */
ChannelEstimate pls_initial_estimate(const FrameObservation& obs,
                                     const SymbolMatrix& symbols);

/**
 * PB genie: the true effective channel averaged over the pilot columns,
 * replicated across the data columns. Noise-free but aging.
 */
ChannelEstimate pb_genie_estimate(const EffectiveChannelMatrix& effective,
                                  int pilot_count);

/**
 * Posterior probability of each hypothesis given one de-mixed observation y
 * and the current channel estimate: softmax over -|y - h_hat*xi_n|^2/sigma2,
 * computed in the log domain with max-subtraction. Requires sigma2 > 0.
 */
RVector em_posterior(Complex y, Complex h_hat, double sigma2,
                     const SymbolHypothesisSet& hypotheses);

/**
 * Runs n_iterations EM passes over the data phase of the observation.
 * Per iteration and user: soft posteriors for every data symbol, the
 * per-symbol M-step h_raw[s] = sum_n gamma_n y xi_n^* / sum_n gamma_n
 * |xi_n|^2, then projection of the raw series through the basis projector.
 * The noise variance is taken from the observation (floored at 1e-12 so the
 * noiseless corner degenerates to hard decisions).
 *
 * rel_stop_tol > 0 enables an optional early stop when the relative update
 * norm falls below the tolerance; defaults to 0 (off) for reproducibility.
 *
 * Cost per iteration: O(K * S_data * N_hypotheses) for the posteriors and
 * M-step plus O(K * S_data^2) for the projection; the projector itself is
 * precomputed once per (S_data, D) by the caller.
 */
ChannelEstimate em_estimate(const FrameObservation& obs,
                            const ChannelEstimate& init,
                            const BasisMatrix& basis,
                            const SymbolHypothesisSet& hypotheses,
                            int n_iterations, double rel_stop_tol = 0.0);

}  // namespace leolink
