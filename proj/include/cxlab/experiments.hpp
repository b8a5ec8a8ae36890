#pragma once

// Named experiments shared by the command-line front end and the tests:
// randomized verifier suites, counterexample generators, the capacity
// instance, and config-driven grids. Every runner returns JSON plus a flag
// saying whether the expected outcome (lemma holds, construction violates,
// solver converges) was observed.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxlab/capacity.hpp"
#include "cxlab/cex.hpp"

namespace cxlab {

struct CellOutcome {
  nlohmann::json report;
  bool expectation_met = true;
};

// ---------------------------------------------------------------------------
// Verifier suites.

inline constexpr const char* kSuiteNames[] = {"l1linf", "i2pos", "phi", "inter", "linf", "new23", "gest"};

struct SuiteOptions {
  std::string lemma;
  std::size_t trials = 500;
  unsigned depth = 8;
  std::uint64_t seed = 1;
  Mode mode = Mode::exact;
  double p = 2;
  bool keep_reports = false;
};

struct SuiteSummary {
  SuiteOptions options;
  std::size_t violations = 0;
  std::size_t degenerate = 0;
  bool holds_expected = true;  // false for inter (its constant is only measured)
  double max_ratio = 0;
  std::size_t max_ratio_trial = 0;
  std::optional<std::size_t> first_violation;
  nlohmann::json worst;                 // report of the trial with the largest ratio
  std::vector<nlohmann::json> reports;  // every trial, when keep_reports

  bool expectation_met() const { return !holds_expected || violations == 0; }
};

/// Trial i uses seed mix_seed(options.seed, i). Throws ArgumentError for an
/// unknown lemma, depth outside 1..12, or a non-integral p in exact mode.
SuiteSummary run_suite(const SuiteOptions& options);
nlohmann::json to_json(const SuiteSummary& s);
CellOutcome suite_cell(const SuiteOptions& options);

// ---------------------------------------------------------------------------
// Counterexample generators.

inline constexpr const char* kCexNames[] = {"p-less-2", "increasing", "direct", "new23", "search-new23"};

struct CexOptions {
  std::string generator;
  unsigned k = 4;
  unsigned N = 20;
  std::optional<double> p;  // per-generator default when empty
  Mode mode = Mode::exact;
  std::size_t budget = 10000;
  unsigned depth = 10;
  std::uint64_t seed = 1;
  bool emit_instance = false;
};

double default_p(const std::string& generator);
/// Exact unless p is non-integral or the generator is float-only.
Mode natural_mode(const std::string& generator, double p);

/// Expectations: closed forms reproduced and violations present wherever
/// the closed forms force them; for search-new23 with p <= 2, no ratio
/// above 1. The path audit only has to run.
CellOutcome run_cex(const CexOptions& options);

template <Scalar S>
nlohmann::json to_json(const New23Audit<S>& audit);

// ---------------------------------------------------------------------------
// Capacity.

struct CapacityOptions {
  unsigned n = 16;
  double tol = 1e-10;
  std::size_t max_iters = 200000;
  bool symmetry = true;
  bool oracle = false;
};

/// The family compared against the brute-force oracle: the true family when
/// it has at most 12 members, otherwise every member cut to coordinate
/// depth <= 3, deduplicated, first 12 kept.
std::vector<BiNode> oracle_family(const BitreeInstance& inst);

CellOutcome run_capacity(const CapacityOptions& options);

struct D2Table {
  std::vector<D2Row> rows;
  std::vector<EquilibriumResult> equilibria;
};

/// One row per n, instances solved concurrently. Throws PreconditionError
/// when an equilibrium does not converge.
D2Table d2_table(const std::vector<unsigned>& ns, double tol, std::size_t max_iters, bool symmetry = true);
std::string d2_csv(const D2Table& table);

// ---------------------------------------------------------------------------
// Config-driven grids.

struct ExperimentConfig {
  std::string experiment;  // "verify-<lemma>", "cex-<generator>", "capacity"
  std::map<std::string, std::vector<nlohmann::json>> grid;
  Mode mode = Mode::exact;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string out = "out";
};

/// Throws ArgumentError on schema violations or inadmissible values.
ExperimentConfig parse_config(const nlohmann::json& j);

struct RunResult {
  std::size_t cells = 0;
  std::size_t failed = 0;  // cells whose expectation was not met
  std::vector<std::string> files;
  std::string csv_path;
};

/// Runs the cartesian product of the grid, writing <out>/<experiment>_cell<i>.json
/// and <out>/<experiment>.csv. Each cell JSON gains experiment, cell and
/// runtime_ms. A ResourceError from a cell is rethrown naming the cell.
RunResult run_experiment(const ExperimentConfig& config, bool record_runtime = true);

/// CSV with columns params ∪ {lhs, rhs, ratio, holds}, one row per report.
std::string aggregate_csv(const std::vector<nlohmann::json>& reports);

}  // namespace cxlab
