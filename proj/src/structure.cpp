#include "cxlab/structure.hpp"

#include <cmath>

namespace cxlab {

ExponentPair ExponentPair::from_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("exponent p must be > 1, got " + to_string(p));
  return {p, p / (p - 1.0)};
}

}  // namespace cxlab
