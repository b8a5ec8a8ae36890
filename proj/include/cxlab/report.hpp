#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "cxlab/scalar.hpp"

namespace cxlab {

/// One evaluation of an inequality lhs <= rhs.
///
/// `params` holds the instance constants (λ, δ, p, N, k, ...) in the run's
/// scalar mode; `metrics` holds float-only diagnostics (measured constants,
/// norms, lower bounds) that have no exact value.
template <Scalar S>
struct LemmaReport {
  std::string name;
  std::map<std::string, S> params;
  std::map<std::string, double> metrics;
  S lhs{0};
  S rhs{0};
  std::optional<S> ratio;  // lhs / rhs; empty when rhs == 0
  std::optional<std::string> witness;
  bool holds = true;
  bool degenerate = false;
  std::optional<std::uint64_t> seed;

  static constexpr Mode mode = mode_of<S>();

  double ratio_or(double fallback) const { return ratio ? to_double(*ratio) : fallback; }
};

/// Fills ratio/holds from lhs and rhs. rhs == 0 marks the report degenerate;
/// it then holds only when lhs == 0.
template <Scalar S>
LemmaReport<S> make_report(std::string name, S lhs, S rhs) {
  LemmaReport<S> r;
  r.name = std::move(name);
  r.lhs = std::move(lhs);
  r.rhs = std::move(rhs);
  if (r.rhs > 0) {
    r.ratio = S(r.lhs / r.rhs);
    r.holds = leq_tol(r.lhs, r.rhs);
  } else {
    r.degenerate = true;
    r.holds = is_zero(r.lhs);
  }
  return r;
}

/// Scalar as JSON: exact fractions become strings, floats become numbers
/// (null when not finite).
nlohmann::json scalar_json(const Rational& x);
nlohmann::json scalar_json(double x);

template <Scalar S>
nlohmann::json to_json(const LemmaReport<S>& r) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : r.params) params[k] = scalar_json(v);
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = scalar_json(v);
  nlohmann::json j = {
      {"name", r.name},
      {"params", params},
      {"lhs", scalar_json(r.lhs)},
      {"rhs", scalar_json(r.rhs)},
      {"ratio", r.ratio ? scalar_json(*r.ratio) : nlohmann::json(nullptr)},
      {"holds", r.holds},
      {"degenerate", r.degenerate},
      {"witness", r.witness ? nlohmann::json(*r.witness) : nlohmann::json(nullptr)},
      {"mode", std::string(mode_name(r.mode))},
      {"seed", r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr)},
  };
  if (!r.metrics.empty()) j["metrics"] = metrics;
  return j;
}

}  // namespace cxlab
