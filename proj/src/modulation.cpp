#include "leolink/modulation.hpp"

#include <cmath>
#include <limits>

#include "leolink/errors.hpp"

namespace leolink {

CVector constellation_alphabet(Constellation c) {
  switch (c) {
    case Constellation::kQam16: {
      // {+-1, +-3}^2 grid scaled to unit mean energy.
      const double scale = 1.0 / std::sqrt(10.0);
      const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
      CVector a(16);
      int i = 0;
      for (double re : levels)
        for (double im : levels) a[i++] = Complex(re, im) * scale;
      return a;
    }
    case Constellation::kQpsk: {
      const double s = 1.0 / std::sqrt(2.0);
      CVector a(4);
      a << Complex(s, s), Complex(-s, s), Complex(s, -s), Complex(-s, -s);
      return a;
    }
  }
  throw ConfigError("unknown constellation");
}

int nearest_symbol(Complex x, const CVector& alphabet) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < alphabet.size(); ++i) {
    const double d = std::norm(x - alphabet[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Constellation constellation_from_string(const std::string& name) {
  if (name == "qam16" || name == "16qam") return Constellation::kQam16;
  if (name == "qpsk") return Constellation::kQpsk;
  throw ConfigError("unknown constellation: " + name);
}

std::string to_string(Constellation c) {
  return c == Constellation::kQam16 ? "qam16" : "qpsk";
}

}  // namespace leolink
