/**
 * @file types.hpp
 * @brief Common scalar and matrix aliases used across the simulator.
 */
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace leolink {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using IMatrix = Eigen::MatrixXi;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kEarthRadius = 6'371'000.0;     // m, mean spherical
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace leolink
