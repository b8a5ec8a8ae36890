// cxlab: command-line front end for the verifier suites, counterexample
// generators, and the bi-tree capacity experiment.
//
// Exit status: 0 success, 1 an expected outcome was not observed, 2 usage
// error, 3 resource limit exceeded.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cxlab/errors.hpp"
#include "cxlab/experiments.hpp"

namespace {

using namespace cxlab;

constexpr int kOk = 0;
constexpr int kExpectationFailed = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;

Mode resolve_mode(const std::string& mode, bool integral_ok) {
  if (mode == "exact") return Mode::exact;
  if (mode == "float") return Mode::floating;
  return integral_ok ? Mode::exact : Mode::floating;
}

int emit(const CellOutcome& outcome) {
  std::cout << outcome.report.dump(2) << '\n';
  return outcome.expectation_met ? kOk : kExpectationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification laboratory for Hardy-operator embeddings on dyadic trees and bi-trees"};
  app.require_subcommand(1);
  const std::vector<std::string> modes = {"auto", "exact", "float"};

  // verify
  auto* verify = app.add_subcommand("verify", "Run a seeded randomized suite for one inequality");
  SuiteOptions suite;
  std::string verify_mode = "auto";
  verify->add_option("lemma", suite.lemma, "l1linf | i2pos | phi | inter | linf | new23 | gest")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kSuiteNames), std::end(kSuiteNames))));
  verify->add_option("--trials", suite.trials, "Number of random instances")->capture_default_str();
  verify->add_option("--depth", suite.depth, "Tree levels")->capture_default_str();
  verify->add_option("--seed", suite.seed, "Base seed")->capture_default_str();
  verify->add_option("--mode", verify_mode, "exact | float | auto")->check(CLI::IsMember(modes))->capture_default_str();
  verify->add_option("--p", suite.p, "Exponent")->capture_default_str();
  verify->add_flag("--reports", suite.keep_reports, "Include every trial's report");

  // cex
  auto* cex = app.add_subcommand("cex", "Build a counterexample and report the violated inequality");
  CexOptions cex_opts;
  std::string cex_mode = "auto";
  double cex_p = 0;
  cex->add_option("generator", cex_opts.generator, "p-less-2 | increasing | direct | new23 | search-new23")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCexNames), std::end(kCexNames))));
  cex->add_option("--k", cex_opts.k, "Generations of the p<2 instance")->capture_default_str();
  cex->add_option("--N", cex_opts.N, "Levels of the halving tree / path length")->capture_default_str();
  auto* cex_p_opt = cex->add_option("--p", cex_p, "Exponent (default depends on the generator)");
  cex->add_option("--mode", cex_mode, "exact | float | auto")->check(CLI::IsMember(modes))->capture_default_str();
  cex->add_option("--budget", cex_opts.budget, "Search budget")->capture_default_str();
  cex->add_option("--depth", cex_opts.depth, "Search tree levels")->capture_default_str();
  cex->add_option("--seed", cex_opts.seed, "Search seed")->capture_default_str();
  cex->add_flag("--emit-instance", cex_opts.emit_instance, "Include f and g as node/value lists");

  // capacity
  auto* capacity = app.add_subcommand("capacity", "Equilibrium measure and capacity of the rectangle family");
  CapacityOptions cap_opts;
  bool no_symmetry = false;
  std::string cap_csv;
  capacity->add_option("--n", cap_opts.n, "4 | 16 | 256 | 65536")->capture_default_str();
  capacity->add_option("--tol", cap_opts.tol, "KKT tolerance")->capture_default_str();
  capacity->add_option("--max-iters", cap_opts.max_iters, "Iteration budget")->capture_default_str();
  capacity->add_flag("--no-symmetry", no_symmetry, "Solve with one variable per rectangle");
  capacity->add_flag("--oracle", cap_opts.oracle, "Compare with the exact brute-force capacity");
  capacity->add_option("--csv", cap_csv, "Append the table row to this CSV file");

  // report d2
  auto* report = app.add_subcommand("report", "Tables");
  report->require_subcommand(1);
  auto* d2 = report->add_subcommand("d2", "Capacity versus delta/lambda across n");
  std::vector<unsigned> d2_ns = {4, 16, 256, 65536};
  double d2_tol = 1e-10;
  std::size_t d2_iters = 200000;
  std::string d2_out;
  d2->add_option("--n", d2_ns, "Values of n")->delimiter(',')->capture_default_str();
  d2->add_option("--tol", d2_tol, "KKT tolerance")->capture_default_str();
  d2->add_option("--max-iters", d2_iters, "Iteration budget")->capture_default_str();
  d2->add_option("--out", d2_out, "Directory for d2.json and d2.csv");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  std::string config_path;
  bool no_runtime = false;
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_flag("--no-runtime", no_runtime, "Omit runtime_ms so reruns are byte-identical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) {
      suite.mode = resolve_mode(verify_mode, std::floor(suite.p) == suite.p);
      return emit(suite_cell(suite));
    }
    if (*cex) {
      if (*cex_p_opt) cex_opts.p = cex_p;
      const double p = cex_opts.p.value_or(default_p(cex_opts.generator));
      cex_opts.mode = cex_mode == "auto" ? natural_mode(cex_opts.generator, p) : resolve_mode(cex_mode, true);
      return emit(run_cex(cex_opts));
    }
    if (*capacity) {
      cap_opts.symmetry = !no_symmetry;
      const CellOutcome outcome = run_capacity(cap_opts);
      if (!cap_csv.empty() && outcome.report.contains("d2")) {
        const auto& row = outcome.report["d2"];
        const bool fresh = !std::filesystem::exists(cap_csv);
        std::ofstream csv(cap_csv, std::ios::app);
        if (fresh) csv << "n,delta,lambda,delta_over_lambda,cap,cap_over_delta_lambda,n_mean_middle_rho\n";
        csv << row["n"].dump() << ',' << row["delta"].get<std::string>() << ',' << row["lambda"].get<std::string>()
            << ',' << row["delta_over_lambda"].dump() << ',' << row["cap"].dump() << ','
            << row["cap_over_delta_lambda"].dump() << ',' << row["n_mean_middle_rho"].dump() << '\n';
      }
      return emit(outcome);
    }
    if (*d2) {
      const D2Table table = d2_table(d2_ns, d2_tol, d2_iters);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : table.rows) rows.push_back(to_json(r));
      const std::string csv = d2_csv(table);
      if (!d2_out.empty()) {
        std::filesystem::create_directories(d2_out);
        std::ofstream(std::filesystem::path(d2_out) / "d2.json") << rows.dump(2) << '\n';
        std::ofstream(std::filesystem::path(d2_out) / "d2.csv") << csv;
      }
      std::cout << csv;
      return kOk;
    }
    if (*run) {
      std::ifstream in(config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
      }
      const RunResult result = run_experiment(parse_config(j), !no_runtime);
      std::cout << "cells " << result.cells << ", expectation failures " << result.failed << ", table "
                << result.csv_path << '\n';
      return result.failed == 0 ? kOk : kExpectationFailed;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExpectationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExpectationFailed;
  }
  return kUsage;
}
