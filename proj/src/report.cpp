#include "cxlab/report.hpp"

#include <cmath>

namespace cxlab {

nlohmann::json scalar_json(const Rational& x) { return to_string(x); }

nlohmann::json scalar_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace cxlab
