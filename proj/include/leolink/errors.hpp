/**
 * @file errors.hpp
 * @brief Error types thrown by the simulator components.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace leolink {

/// Invalid or inconsistent configuration values.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension or length mismatch between operands.
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (non-finite values, failed orthonormalization, ...).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate user geometry, e.g. coincident angles making A rank-deficient.
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Undefined metric or equalization singularity.
struct MetricError : std::runtime_error {
  explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File I/O failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace leolink
