/**
 * @file modulation.hpp
 * @brief Data constellations (unit average energy) and nearest-symbol slicing.
 */
#pragma once

#include <string>

#include "leolink/types.hpp"

namespace leolink {

enum class Constellation { kQam16, kQpsk };

/// Alphabet with unit average symbol energy (16-QAM scale 1/sqrt(10)).
CVector constellation_alphabet(Constellation c);

/// Index of the nearest alphabet entry (ties break to the lowest index).
int nearest_symbol(Complex x, const CVector& alphabet);

Constellation constellation_from_string(const std::string& name);
std::string to_string(Constellation c);

}  // namespace leolink
