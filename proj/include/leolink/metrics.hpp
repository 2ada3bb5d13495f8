/**
 * @file metrics.hpp
 * @brief NMSE / SER metrics, one-tap detection, and SNR calibration.
 */
#pragma once

#include "leolink/estimators.hpp"
#include "leolink/frame.hpp"
#include "leolink/types.hpp"

namespace leolink {

struct TrialMetrics {
  double nmse = 0.0;
  double ser = 0.0;
  double snr_db = 0.0;
  Method method = Method::kPls;
  int n_em = 0;
  int d_order = 0;
};

/**
 * ||vec(reference) - vec(estimate)||^2 / ||vec(reference)||^2 where both
 * matrices cover the data columns only. Throws MetricError when the
 * reference norm is zero, SizeError on shape mismatch.
 */
double nmse(const CMatrix& reference_data, const CMatrix& estimate);

struct DetectionResult {
  IMatrix detected;           // K x S_data indices into the alphabet
  CMatrix detected_symbols;   // K x S_data sliced symbol values
  double ser = 0.0;           // fraction of wrong data symbols over all users
};

/**
 * One-tap zero-forcing x_hat = y/h_hat followed by nearest-neighbor slicing
 * over the data phase; SER counts symbol errors against the transmitted
 * data. Throws MetricError if any used estimate entry has magnitude below
 * 1e-12 (equalization singularity; the trial is flagged, never skipped).
 */
DetectionResult equalize_detect(const FrameObservation& obs,
                                const ChannelEstimate& estimate,
                                const SymbolMatrix& symbols);

/**
 * sigma^2 solving the frame SNR definition:
 * snr = 10*log10(||vec((G o X)^T A)||^2 / (S*M*sigma^2)).
 */
double snr_to_sigma2(const EffectiveChannelMatrix& effective,
                     const SymbolMatrix& symbols,
                     const ArrayResponseMatrix& array, double snr_db);

}  // namespace leolink
