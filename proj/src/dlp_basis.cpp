#include "leolink/dlp_basis.hpp"

#include <cmath>
#include <string>

#include "leolink/errors.hpp"

namespace leolink {

namespace {

constexpr double kRebuildThreshold = 1e-9;
constexpr double kFailThreshold = 1e-6;

// In-place modified Gram-Schmidt, column order preserved.
void reorthonormalize(RMatrix& psi) {
  const int d = static_cast<int>(psi.cols());
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i)
      psi.col(j) -= psi.col(i).dot(psi.col(j)) * psi.col(i);
    psi.col(j) /= psi.col(j).norm();
  }
}

}  // namespace

double orthonormality_residual(const RMatrix& psi) {
  const RMatrix gram = psi.transpose() * psi;
  return (gram - RMatrix::Identity(psi.cols(), psi.cols()))
      .cwiseAbs()
      .maxCoeff();
}

BasisMatrix build_basis(int length, int order) {
  if (length < 2) throw SizeError("basis length must be >= 2");
  if (order < 1 || order > length)
    throw SizeError("basis order must be in [1, length]");

  const int sn = length;
  const int d = order;
  RMatrix eta(sn, d);
  RVector zeta(d);

  eta.col(0).setOnes();
  zeta[0] = std::sqrt(static_cast<double>(sn));
  if (d > 1) {
    for (int i = 0; i < sn; ++i)
      eta(i, 1) = 1.0 - 2.0 * i / (sn - 1.0);
    zeta[1] = std::sqrt(sn * (sn + 1.0) / (3.0 * (sn - 1.0)));
  }
  for (int qi = 2; qi < d; ++qi) {
    const double q = qi + 1;  // 1-based order of the column being filled
    const double c2 = (q - 2.0) * (sn + q - 2.0) / ((q - 1.0) * (sn - q + 1.0));
    for (int i = 0; i < sn; ++i) {
      const double s = i + 1;  // 1-based sample position
      const double c1 =
          (2.0 * q - 3.0) * (sn - 2.0 * s + 1.0) / ((q - 1.0) * (sn - q + 1.0));
      eta(i, qi) = c1 * eta(i, qi - 1) - c2 * eta(i, qi - 2);
    }
    zeta[qi] = std::sqrt((2.0 * q - 3.0) * (sn + q - 1.0) /
                         ((2.0 * q - 1.0) * (sn - q + 1.0))) *
               zeta[qi - 1];
  }

  BasisMatrix basis;
  basis.psi = eta.array().rowwise() / zeta.transpose().array();
  basis.order = d;
  basis.length = sn;

  if (orthonormality_residual(basis.psi) > kRebuildThreshold)
    reorthonormalize(basis.psi);
  const double residual = orthonormality_residual(basis.psi);
  if (residual > kFailThreshold)
    throw NumericError("basis orthonormality residual " +
                       std::to_string(residual) + " for S=" +
                       std::to_string(sn) + " D=" + std::to_string(d));

  basis.projector = basis.psi * basis.psi.transpose();
  return basis;
}

CVector project(const BasisMatrix& basis, const CVector& series) {
  if (series.size() != basis.length)
    throw SizeError("project: series length " + std::to_string(series.size()) +
                    " != basis length " + std::to_string(basis.length));
  const RVector re = basis.projector * series.real().matrix();
  const RVector im = basis.projector * series.imag().matrix();
  return re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
}

CVector coefficients(const BasisMatrix& basis, const CVector& series) {
  if (series.size() != basis.length)
    throw SizeError("coefficients: series length mismatch");
  const RVector re = basis.psi.transpose() * series.real().matrix();
  const RVector im = basis.psi.transpose() * series.imag().matrix();
  return re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
}

}  // namespace leolink
