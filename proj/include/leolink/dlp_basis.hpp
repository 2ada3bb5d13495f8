/**
 * @file dlp_basis.hpp
 * @brief Discrete Legendre polynomial basis for subspace channel smoothing.
 *
 * The basis columns psi_q are the discrete Legendre (Gram) polynomials on the
 * sample grid s = 1..S, orthonormalized so that Psi^T Psi = I_D. Projecting a
 * length-S series onto the span of the first D columns keeps its dominant
 * low-order temporal variation and suppresses components orthogonal to that
 * subspace; the rank-D projector Psi Psi^T is precomputed once per (S, D).
 */
#pragma once

#include "leolink/types.hpp"

namespace leolink {

struct BasisMatrix {
  RMatrix psi;        // S x D, orthonormal columns
  int order = 0;      // D
  int length = 0;     // S
  RMatrix projector;  // S x S, psi * psi^T
};

/**
 * Builds the order-D basis of length S via the three-term recursion
 *
 *   eta_q(s) = (2q-3)(S-2s+1) / ((q-1)(S-q+1)) * eta_{q-1}(s)
 *            - (q-2)(S+q-2)  / ((q-1)(S-q+1)) * eta_{q-2}(s)
 *
 * seeded with eta_1 = 1 and eta_2(s) = 1 - 2(s-1)/(S-1), and normalizes
 * column q by zeta_q (zeta_1 = sqrt(S), zeta_2 = sqrt(S(S+1)/(3(S-1))),
 * zeta_q = sqrt((2q-3)(S+q-1)/((2q-1)(S-q+1))) * zeta_{q-1}).
 *
 * The recursion loses orthogonality in double precision as D approaches S;
 * if the residual max|Psi^T Psi - I| exceeds 1e-9 a modified Gram-Schmidt
 * pass re-orthonormalizes the columns. Throws SizeError for S < 2 or
 * D outside [1, S], NumericError if the residual stays above 1e-6.
 */
BasisMatrix build_basis(int length, int order);

/// Projects a complex series onto the basis span: returns Psi Psi^T * series.
CVector project(const BasisMatrix& basis, const CVector& series);

/// Expansion coefficients Psi^T * series (length D).
CVector coefficients(const BasisMatrix& basis, const CVector& series);

/// max |Psi^T Psi - I| over all entries.
double orthonormality_residual(const RMatrix& psi);

}  // namespace leolink
