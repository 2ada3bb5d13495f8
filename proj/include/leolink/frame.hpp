/**
 * @file frame.hpp
 * @brief Uplink frame construction, M-antenna observation synthesis, and
 *        stream de-mixing via the array pseudo-inverse.
 */
#pragma once

#include <cstdint>

#include "leolink/channel.hpp"
#include "leolink/config.hpp"
#include "leolink/modulation.hpp"
#include "leolink/types.hpp"

namespace leolink {

/// Transmitted symbols: constant-modulus pilots followed by data symbols.
struct SymbolMatrix {
  CMatrix x;  // K x S
  int pilot_count = 0;
  Constellation constellation = Constellation::kQam16;
  int data_count() const { return static_cast<int>(x.cols()) - pilot_count; }
};

/// Received frame before and after de-mixing.
struct FrameObservation {
  CMatrix y_raw;      // S x M
  CMatrix y_demixed;  // S x K, = y_raw * pinv(A)
  double noise_variance = 0.0;  // sigma^2 per complex antenna sample
  double snr_db = 0.0;
};

/// Zadoff-Chu sequence of the given length and root (root coprime to length).
CVector zadoff_chu(int length, int root);

/// Largest prime strictly below n, or 1 if none exists (n <= 2).
int largest_prime_below(int n);

/**
 * Builds the K x S symbol matrix: the first n_pilots columns carry a
 * length-K Zadoff-Chu sequence (root = largest prime below K) with user k
 * reading entry (k + s) mod K at pilot symbol s; the remaining columns are
 * uniform draws from the configured unit-energy constellation.
 */
SymbolMatrix build_symbol_matrix(const SystemConfig& config,
                                 std::uint64_t rng_seed);

/**
 * Moore-Penrose pseudo-inverse of the K x M array response (returns M x K).
 * Throws GeometryError when the rows are not linearly independent
 * (coincident user angles).
 */
CMatrix pseudo_inverse(const CMatrix& a);

/// De-mixes raw observations: returns y_raw * pinv(A), an S x K matrix.
CMatrix demix(const CMatrix& y_raw, const ArrayResponseMatrix& array);

/**
 * Synthesizes Y = (G o X)^T A + Z with Z ~ CN(0, sigma^2) i.i.d.; sigma^2 is
 * solved from snr_db = 10*log10(||vec((G o X)^T A)||^2 / (S*M*sigma^2)).
 * snr_db above +300 is treated as the noiseless case (sigma^2 = 0). Noise is
 * added in the raw antenna domain, then de-mixed.
 */
FrameObservation synthesize_observation(const EffectiveChannelMatrix& effective,
                                        const SymbolMatrix& symbols,
                                        const ArrayResponseMatrix& array,
                                        double snr_db, std::uint64_t rng_seed);

}  // namespace leolink
