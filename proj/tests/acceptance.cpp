// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cxlab/experiments.hpp"

using namespace cxlab;

namespace {

// Pinned thresholds.
constexpr std::size_t kTrials = 500;
constexpr unsigned kDepth = 8;
constexpr std::uint64_t kSuiteSeed = 20240611;
constexpr double kIncreasingRatio = 17;
constexpr double kDirectRatio = 9;
constexpr std::size_t kFamilies = 50;
constexpr double kOracleRelTol = 1e-6;
constexpr long kLemmaGLow = 2;   // c₁
constexpr long kLemmaGHigh = 8;  // c₂
constexpr double kKkt = 1e-8;
constexpr double kCapFactor = 2;
constexpr double kDeltaLambdaDrop = 1.5;
constexpr double kMiddleMass = 0.08;  // c₀
constexpr std::uint64_t kSearchSeed = 7;
constexpr std::size_t kSearchBudget = 10000;
constexpr unsigned kSearchDepth = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(secs < budget_s, "runtime budget " + std::to_string(budget_s) + " s");
  if (!out.pass) ++failures;
  std::printf("%s criterion %d (%.2f s):%s\n", out.pass ? "PASS" : "FAIL", id, secs, out.detail.str().c_str());
  std::fflush(stdout);
}

void suites(Outcome& out) {
  struct Case {
    const char* lemma;
    double p;
    Mode mode;
  };
  const Case cases[] = {
      {"l1linf", 2, Mode::exact},      {"i2pos", 2, Mode::exact},       {"phi", 2, Mode::exact},
      {"gest", 2, Mode::exact},        {"gest", 3, Mode::exact},        {"new23", 1, Mode::exact},
      {"new23", 1.5, Mode::floating},  {"new23", 2, Mode::exact},
  };
  for (const auto& c : cases) {
    SuiteOptions o;
    o.lemma = c.lemma;
    o.trials = kTrials;
    o.depth = kDepth;
    o.seed = kSuiteSeed;
    o.mode = c.mode;
    o.p = c.p;
    const auto s = run_suite(o);
    out.detail << ' ' << c.lemma << "(p=" << c.p << ")=" << s.violations;
    out.require(s.violations == 0, std::string(c.lemma) + " violations");
    out.require(s.degenerate < kTrials, std::string(c.lemma) + " all trials degenerate");
  }
}

void increasing_closed_form(Outcome& out) {
  for (unsigned N = 1; N <= 25; ++N) {
    const auto cex = gen_cex_increasing<Rational>(N, 2);
    const Rational expected = 4 * (pow_int(Rational(5, 4), N) - 1);
    out.require(cex.report.lhs == expected, "closed form at N=" + std::to_string(N));
  }
  const auto c20 = gen_cex_increasing<Rational>(20, 2);
  out.require(c20.report.rhs == 20, "lambda = N");
  const double ratio = c20.report.ratio_or(0);
  out.detail << " N=20 ratio=" << ratio;
  out.require(ratio > kIncreasingRatio, "N=20 ratio > 17");
  out.require(!c20.report.holds, "violation at N=20");
}

void p_less_2(Outcome& out) {
  double previous = -1;
  for (unsigned k = 3; k <= 6; ++k) {
    const auto cex = gen_cex_p_less_2(k, 1.5);
    const double ratio = cex.report.ratio_or(0);
    out.detail << " k=" << k << ":" << ratio;
    out.require(ratio > previous, "ratio increasing at k=" + std::to_string(k));
    out.require(cex.report.lhs >= std::pow(2.0, (2 - 1.5) * k), "lhs >= 2^{(2-p)k} at k=" + std::to_string(k));
    previous = ratio;
  }
}

void direct(Outcome& out) {
  const auto cex = gen_cex_direct<Rational>(40, 2);
  out.require(cex.report.params.at("delta") == 2, "delta = 2");
  out.require(cex.report.params.at("lambda") == 40, "lambda = N");
  const double ratio = cex.report.ratio_or(0);
  out.detail << " ratio=" << ratio;
  out.require(ratio > kDirectRatio, "ratio > 9");
}

void capacity_oracle(Outcome& out) {
  double worst = 0;
  for (std::uint64_t i = 0; i < kFamilies; ++i) {
    Rng rng(mix_seed(kSuiteSeed, i));
    const auto size = static_cast<std::size_t>(rng.between(1, 6));
    std::vector<BiNode> family;
    for (std::size_t m = 0; m < size; ++m) family.push_back(BiNode{random_node(TreeDomain{4}, rng), random_node(TreeDomain{4}, rng)});
    const auto eq = capacity_qp(family, std::nullopt, 1e-12, 1000000);
    const double exact = to_double(capacity_bruteforce(family));
    const double rel = std::abs(eq.cap - exact) / exact;
    worst = std::max(worst, rel);
    out.require(eq.converged, "converged on family " + std::to_string(i));
  }
  out.detail << " worst relative error=" << worst;
  out.require(worst <= kOracleRelTol, "QP within 1e-6 of brute force");
  for (unsigned a = 0; a <= 3; ++a) {
    for (unsigned b = 0; b <= 3; ++b) {
      const std::vector<BiNode> single{BiNode{NodeAddress::repeat(false, a), NodeAddress::repeat(true, b)}};
      out.require(capacity_bruteforce(single) == Rational(1, (a + 1) * (b + 1)),
                  "single node at depths " + std::to_string(a) + "," + std::to_string(b));
    }
  }
}

void refutation_table(Outcome& out) {
  const auto table = d2_table({16, 256}, 1e-10, 200000);
  if (table.rows.size() != 2) {
    out.require(false, "two rows");
    return;
  }
  const Rational lo(kLemmaGLow), hi(kLemmaGHigh);
  out.require(hi / lo <= 8, "c2/c1 <= 8");
  for (const auto& row : table.rows) {
    const auto inst = build_instance(row.n);
    out.require(row.delta == Rational(1, row.n * inst.s), "delta = 1/(n log n) at n=" + std::to_string(row.n));
    const auto g = check_lemma_g(inst);
    out.require(g.n_min >= lo && g.n_max <= hi, "n*Ig in [c1, c2] at n=" + std::to_string(row.n));
    out.require(row.kkt_max_violation <= kKkt, "kkt at n=" + std::to_string(row.n));
    out.require(row.n_mean_middle_rho >= kMiddleMass, "n*mean rho >= c0 at n=" + std::to_string(row.n));
    out.detail << " n=" << row.n << ": cap=" << row.cap << " delta/lambda=" << row.delta_over_lambda
               << " n*Ig=[" << to_double(g.n_min) << "," << to_double(g.n_max) << "] n*mean=" << row.n_mean_middle_rho
               << " kkt=" << row.kkt_max_violation << ";";
  }
  const auto& a = table.rows[0];
  const auto& b = table.rows[1];
  out.require(std::max(a.cap, b.cap) <= kCapFactor * std::min(a.cap, b.cap), "caps within a factor 2");
  out.require(a.delta_over_lambda >= kDeltaLambdaDrop * b.delta_over_lambda, "delta/lambda drops by 1.5");
}

void path_audit(Outcome& out) {
  for (unsigned N : {10u, 100u, 1000u}) {
    const auto first = gen_cex_new23<Rational>(N, 4);
    const auto second = gen_cex_new23<Rational>(N, 4);
    out.require(first.size() == 2, "both variants");
    for (std::size_t v = 0; v < first.size(); ++v) {
      const auto& audit = first[v];
      const std::string tag = std::string(variant_name(audit.variant)) + " N=" + std::to_string(N);
      out.require(audit.chain.size() == 15, "complete chain " + tag);
      out.require(audit.argmax_on_boundary && audit.g_nonzero_at_argmax, "argmax on boundary with g != 0 " + tag);
      out.require(to_json(audit).dump() == to_json(second[v]).dump(), "deterministic audit " + tag);
      if (N == 10) out.detail << ' ' << variant_name(audit.variant) << " first failure=" << audit.first_failure.value_or("none");
    }
  }

  const auto run = search_new23(4, kSearchDepth, kSearchBudget, kSearchSeed);
  const auto [f, g] = new23_search_instance(kSearchDepth, kSearchSeed, run.best_index);
  const auto replay = verify_new23(f, g, 4, TreeDomain{kSearchDepth});
  out.require(run.evaluated == kSearchBudget, "budget used");
  out.require(replay.lhs == run.best.lhs && replay.rhs == run.best.rhs, "best instance reproduces");
  out.detail << " p=4 best=" << run.best.ratio_or(0) << " at " << run.best_index;

  for (double p : {1.5, 2.0}) {
    const auto s = search_new23(p, kSearchDepth, kSearchBudget, kSearchSeed);
    const double ratio = s.best.ratio_or(0);
    out.detail << " p=" << p << " best=" << ratio;
    out.require(ratio <= 1, "search ratio <= 1 at p=" + std::to_string(p));
  }
}

}  // namespace

int main() {
  criterion(1, 120, suites);
  criterion(2, 1, increasing_closed_form);
  criterion(3, 30, p_less_2);
  criterion(4, 1, direct);
  criterion(5, 60, capacity_oracle);
  criterion(6, 300, refutation_table);
  criterion(7, 180, path_audit);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
