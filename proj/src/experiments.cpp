#include "cxlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "cxlab/errors.hpp"
#include "cxlab/lemmas.hpp"

namespace cxlab {

namespace {

bool is_integral(double p) { return std::floor(p) == p; }

template <class Range>
bool contains(const Range& names, const std::string& name) {
  return std::find(std::begin(names), std::end(names), name) != std::end(names);
}

std::string join(const auto& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + std::string(n);
  return out;
}

NodeAddress pick_gamma(const TreeFn<Rational>& g, const TreeDomain& d, Rng& rng) {
  const auto supp = g.support();
  if (!supp.empty() && rng.chance(3, 4)) return supp[rng.below(supp.size())];
  return random_node(d, rng);
}

template <Scalar S>
LemmaReport<S> phi_trial(const TreeDomain& d, Rng& rng) {
  const TreeFn<Rational> w = random_weight(d, rng);
  const TreeFn<Rational> g = random_superadditive(d, rng);
  TreeFn<Rational> wg(d);
  for (const auto& [a, v] : g) wg.set(a, w(a) * v);
  const auto nodes = d.all_nodes();
  const auto iwg = hardy_up_field(wg, nodes);

  // δ is I(wg) at a random support node, so the band above δ is populated.
  const auto supp = g.support();
  const Rational delta = iwg.at(supp[rng.below(supp.size())]);
  static const Rational stretch[] = {Rational(1), Rational(5, 4), Rational(3, 2), Rational(2), Rational(3)};
  const Rational lambda = 4 * delta * stretch[rng.below(5)];
  TreeFn<Rational> f(d);
  for (const auto& a : nodes) {
    if (iwg.at(a) <= delta && rng.chance(1, 3)) f.set(a, from_ratio<Rational>(rng.between(1, 8), 4));
  }
  return build_phi(convert<S>(w), convert<S>(g), convert<S>(f), convert_scalar<S>(lambda), convert_scalar<S>(delta), d)
      .report;
}

template <Scalar S>
LemmaReport<S> run_trial(const SuiteOptions& o, std::size_t i) {
  const TreeDomain d{o.depth};
  Rng rng(mix_seed(o.seed, i));
  const std::string& lemma = o.lemma;
  if (lemma == "l1linf") {
    const auto g = random_superadditive(d, rng);
    const auto h = random_sparse(d, rng, 1, 2);
    const NodeAddress gamma = pick_gamma(g, d, rng);
    return verify_supadditive_l1linf(convert<S>(g), convert<S>(h), gamma, d);
  }
  if (lemma == "i2pos") {
    if (i % 2 == 1) {
      const std::size_t levels = std::min<std::size_t>(o.depth, 4);
      const BiTreeDomain bd{levels, levels};
      const auto f = random_sparse(bd, rng, 1, 4);
      const auto g = random_sparse(bd, rng, 1, 4);
      return verify_I2_positive(convert<S>(f), convert<S>(g));
    }
    const auto f = random_sparse(d, rng, 1, 3);
    const auto g = random_sparse(d, rng, 1, 3);
    return verify_I2_positive(convert<S>(f), convert<S>(g));
  }
  if (lemma == "phi") return phi_trial<S>(d, rng);
  if (lemma == "inter") {
    const auto g = random_superadditive(d, rng);
    const auto f = random_sparse(d, rng, 1, 3);
    return verify_inter(convert<S>(f), convert<S>(g), o.p, d);
  }
  if (lemma == "linf") {
    const auto g = random_increasing(d, rng);
    const auto f = random_sparse(d, rng, 1, 3);
    return verify_linf(convert<S>(f), convert<S>(g), d);
  }
  if (lemma == "new23") {
    const auto [f, g] = random_new23_instance(d, rng);
    return verify_new23(convert<S>(f), convert<S>(g), o.p, d);
  }
  if (lemma == "gest") {
    const auto g = random_power_superadditive(d, static_cast<unsigned>(o.p), rng);
    const NodeAddress gamma = pick_gamma(g, d, rng);
    return verify_gest(convert<S>(g), gamma, o.p, d);
  }
  throw ArgumentError("unknown lemma '" + lemma + "'; expected one of " + join(kSuiteNames));
}

template <Scalar S>
SuiteSummary run_suite_as(const SuiteOptions& o) {
  SuiteSummary s;
  s.options = o;
  s.holds_expected = o.lemma != "inter" && !(o.lemma == "new23" && o.p > 2);
  bool have_worst = false;
  for (std::size_t i = 0; i < o.trials; ++i) {
    LemmaReport<S> r = run_trial<S>(o, i);
    r.seed = mix_seed(o.seed, i);
    if (!r.holds) {
      ++s.violations;
      if (!s.first_violation) s.first_violation = i;
    }
    if (r.degenerate) ++s.degenerate;
    const double ratio = r.ratio_or(0.0);
    const bool worse = !have_worst || ratio > s.max_ratio;
    if (worse || o.keep_reports) {
      nlohmann::json j = to_json(r);
      j["trial"] = i;
      if (worse) {
        s.worst = j;
        s.max_ratio = ratio;
        s.max_ratio_trial = i;
        have_worst = true;
      }
      if (o.keep_reports) s.reports.push_back(std::move(j));
    }
  }
  return s;
}

}  // namespace

SuiteSummary run_suite(const SuiteOptions& o) {
  if (!contains(kSuiteNames, o.lemma)) {
    throw ArgumentError("unknown lemma '" + o.lemma + "'; expected one of " + join(kSuiteNames));
  }
  if (o.depth < 1 || o.depth > 12) throw ArgumentError("depth must be in 1..12");
  if (o.trials == 0) throw ArgumentError("trials must be positive");
  if (!(o.p >= 1)) throw ArgumentError("p must be >= 1");
  if (o.mode == Mode::exact && !is_integral(o.p)) {
    throw ArgumentError("exact mode needs an integral p; use --mode float");
  }
  if (o.lemma == "gest" && !(is_integral(o.p) && o.p >= 2 && o.p <= 6)) {
    throw ArgumentError("the gest suite needs an integral p in 2..6");
  }
  return o.mode == Mode::exact ? run_suite_as<Rational>(o) : run_suite_as<double>(o);
}

nlohmann::json to_json(const SuiteSummary& s) {
  return {{"lemma", s.options.lemma},
          {"trials", s.options.trials},
          {"depth", s.options.depth},
          {"seed", s.options.seed},
          {"p", s.options.p},
          {"mode", std::string(mode_name(s.options.mode))},
          {"violations", s.violations},
          {"degenerate", s.degenerate},
          {"holds_expected", s.holds_expected},
          {"max_ratio", s.max_ratio},
          {"max_ratio_trial", s.max_ratio_trial},
          {"first_violation", s.first_violation ? nlohmann::json(*s.first_violation) : nlohmann::json(nullptr)}};
}

CellOutcome suite_cell(const SuiteOptions& options) {
  const SuiteSummary s = run_suite(options);
  CellOutcome out;
  out.report = s.worst;
  out.report["suite"] = to_json(s);
  out.report["params"]["trials"] = s.options.trials;
  out.report["params"]["depth"] = s.options.depth;
  out.report["holds"] = s.violations == 0;
  if (options.keep_reports) out.report["reports"] = s.reports;
  out.expectation_met = s.expectation_met();
  return out;
}

// ---------------------------------------------------------------------------

Mode natural_mode(const std::string& generator, double p) {
  if (generator == "p-less-2" || generator == "search-new23" || !is_integral(p)) return Mode::floating;
  return Mode::exact;
}

double default_p(const std::string& generator) {
  if (generator == "p-less-2") return 1.5;
  if (generator == "new23" || generator == "search-new23") return 4;
  return 2;
}

namespace {

template <class Fn>
nlohmann::json sparse_json(const Fn& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [a, v] : f) out.push_back({a.to_string(), scalar_json(v)});
  return out;
}

template <Scalar S>
CellOutcome increasing_cell(const CexOptions& o, double p) {
  const auto cex = gen_cex_increasing<S>(o.N, p);
  CellOutcome out;
  out.report = to_json(cex.report);
  out.report["closed_form"] = scalar_json(cex.closed_form);
  out.report["increasing"] = cex.increasing;
  out.report["superadditive"] = cex.superadditive;
  if (o.emit_instance) {
    if (o.N > 16) throw ResourceError("instance emission for the halving tree", std::size_t{1} << o.N, 1u << 16);
    out.report["instance"] = {{"g", sparse_json(materialize_halving_tree<S>(o.N))}};
  }
  const bool forced = cex.closed_form > cex.report.rhs;
  const bool closed = leq_tol(cex.report.lhs, cex.closed_form) && leq_tol(cex.closed_form, cex.report.lhs);
  out.expectation_met =
      closed && cex.increasing && (o.N < 2 || !cex.superadditive) && (!forced || !cex.report.holds);
  return out;
}

template <Scalar S>
CellOutcome direct_cell(const CexOptions& o, double p) {
  const auto cex = gen_cex_direct<S>(o.N, p);
  CellOutcome out;
  out.report = to_json(cex.report);
  out.report["sum_g_p"] = scalar_json(cex.sum_g_p);
  out.report["min_If"] = scalar_json(cex.min_if);
  if (o.emit_instance) {
    if (o.N > 16) throw ResourceError("instance emission for the halving tree", std::size_t{1} << o.N, 1u << 16);
    out.report["instance"] = {{"f", sparse_json(materialize_left_path<S>(o.N))},
                              {"g", sparse_json(materialize_halving_tree<S>(o.N))}};
  }
  const bool forced = cex.sum_g_p > cex.report.rhs;
  out.expectation_met = leq_tol(cex.sum_g_p, cex.report.lhs) && (!forced || !cex.report.holds);
  return out;
}

template <Scalar S>
CellOutcome new23_cell(const CexOptions& o, double p) {
  const auto audits = gen_cex_new23<S>(o.N, p);
  CellOutcome out;
  out.report = to_json(audits.front().report);
  out.report["name"] = "new23_audit";
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& a : audits) {
    variants.push_back(to_json(a));
    out.expectation_met = out.expectation_met && a.argmax_on_boundary && a.g_nonzero_at_argmax;
  }
  out.report["variants"] = variants;
  return out;
}

}  // namespace

template <Scalar S>
nlohmann::json to_json(const New23Audit<S>& a) {
  nlohmann::json chain = nlohmann::json::array();
  for (const auto& s : a.chain) {
    chain.push_back({{"id", s.id},
                     {"relation", s.relation},
                     {"lhs", scalar_json(s.lhs)},
                     {"rhs", scalar_json(s.rhs)},
                     {"holds", s.holds},
                     {"at_k", s.at_k ? nlohmann::json(*s.at_k) : nlohmann::json(nullptr)}});
  }
  return {{"variant", std::string(variant_name(a.variant))},
          {"report", to_json(a.report)},
          {"sup_potential", scalar_json(a.sup_potential)},
          {"argmax", a.argmax},
          {"argmax_on_boundary", a.argmax_on_boundary},
          {"g_nonzero_at_argmax", a.g_nonzero_at_argmax},
          {"argmax_ties", a.argmax_ties},
          {"chain", chain},
          {"first_failure", a.first_failure ? nlohmann::json(*a.first_failure) : nlohmann::json(nullptr)}};
}

template nlohmann::json to_json(const New23Audit<Rational>&);
template nlohmann::json to_json(const New23Audit<double>&);

CellOutcome run_cex(const CexOptions& o) {
  if (!contains(kCexNames, o.generator)) {
    throw ArgumentError("unknown generator '" + o.generator + "'; expected one of " + join(kCexNames));
  }
  const double p = o.p.value_or(default_p(o.generator));
  const bool exact = o.mode == Mode::exact;
  const bool float_only = o.generator == "p-less-2" || o.generator == "search-new23";
  if (exact && (float_only || !is_integral(p))) {
    throw ArgumentError(o.generator + " with p = " + to_string(p) + " needs --mode float");
  }

  if (o.generator == "p-less-2") {
    const auto cex = gen_cex_p_less_2(o.k, p);
    CellOutcome out;
    out.report = to_json(cex.report);
    out.report["inter"] = to_json(cex.inter);
    out.report["lower_bound"] = cex.lower_bound;
    out.report["max_boundary_Ig"] = cex.max_boundary_ig;
    out.report["support_per_generation"] = cex.support_per_generation;
    if (o.emit_instance) out.report["instance"] = {{"f", sparse_json(cex.f)}, {"g", sparse_json(cex.g)}};
    out.expectation_met = cex.report.lhs >= cex.lower_bound && cex.f.size() == cex.g.size();
    return out;
  }
  if (o.generator == "increasing") return exact ? increasing_cell<Rational>(o, p) : increasing_cell<double>(o, p);
  if (o.generator == "direct") return exact ? direct_cell<Rational>(o, p) : direct_cell<double>(o, p);
  if (o.generator == "new23") return exact ? new23_cell<Rational>(o, p) : new23_cell<double>(o, p);

  const auto search = search_new23(p, o.depth, o.budget, o.seed);
  CellOutcome out;
  out.report = to_json(search.best);
  out.report["best_index"] = search.best_index;
  out.report["best_seed"] = search.best_seed;
  out.report["evaluated"] = search.evaluated;
  if (o.emit_instance) out.report["instance"] = {{"f", sparse_json(search.f)}, {"g", sparse_json(search.g)}};
  out.expectation_met = p > 2 || search.best.holds;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<BiNode> oracle_family(const BitreeInstance& inst) {
  if (inst.family_size() <= 12) {
    std::vector<BiNode> fam;
    for (std::size_t j = 1; j <= inst.groups; ++j) {
      for (std::size_t k = 0; k <= inst.s; ++k) fam.push_back(inst.member(j, k));
    }
    return fam;
  }
  // Only the first three bits of each coordinate survive the cut, so short
  // representatives of the same shape stand in for the long paths.
  std::set<BiNode> seen;
  std::vector<BiNode> fam;
  for (std::size_t j = 1; j <= inst.groups && fam.size() < 12; ++j) {
    const NodeAddress label = NodeAddress::from_integer(j - 1, inst.M);
    for (std::size_t k = 0; k <= inst.s && fam.size() < 12; ++k) {
      const NodeAddress x = label.append(NodeAddress::repeat(false, std::min<std::size_t>(inst.x_extra[k], 3)));
      const NodeAddress y = label.append(NodeAddress::repeat(false, std::min<std::size_t>(inst.y_extra[k], 3)));
      BiNode cut{x.prefix(std::min<std::size_t>(x.depth(), 3)), y.prefix(std::min<std::size_t>(y.depth(), 3))};
      if (seen.insert(cut).second) fam.push_back(cut);
    }
  }
  return fam;
}

CellOutcome run_capacity(const CapacityOptions& o) {
  const BitreeInstance inst = build_instance(o.n);
  const LemmaGReport lemma_g = check_lemma_g(inst);
  const EquilibriumResult eq = instance_capacity(inst, o.symmetry, o.tol, o.max_iters);

  CellOutcome out;
  nlohmann::json& j = out.report;
  j["name"] = "capacity";
  j["params"] = {{"n", o.n},
                 {"s", inst.s},
                 {"M", inst.M},
                 {"family_size", inst.family_size()},
                 {"tol", o.tol},
                 {"max_iters", o.max_iters},
                 {"symmetry", o.symmetry},
                 {"delta", scalar_json(inst.delta)},
                 {"lambda", scalar_json(inst.lambda)},
                 {"lambda_instance", scalar_json(inst.lambda_instance)}};
  j["lemma_g"] = to_json(lemma_g);
  j["equilibrium"] = to_json(eq);
  j["mode"] = "float";
  const double dl = to_double(Rational(inst.delta / inst.lambda));
  j["lhs"] = eq.cap;
  j["rhs"] = dl;
  j["ratio"] = eq.cap / dl;
  j["holds"] = eq.converged;
  out.expectation_met = eq.converged;
  if (eq.converged) j["d2"] = to_json(report_d2(inst, eq));

  if (o.oracle) {
    const auto fam = oracle_family(inst);
    const Rational exact = capacity_bruteforce(fam);
    const EquilibriumResult qp = capacity_qp(fam, std::nullopt, o.tol, o.max_iters);
    const double rel = std::fabs(qp.cap - to_double(exact)) / to_double(exact);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& b : fam) members.push_back(b.to_string());
    j["oracle"] = {{"family", members},
                   {"bruteforce", scalar_json(exact)},
                   {"qp", qp.cap},
                   {"relative_error", rel},
                   {"converged", qp.converged},
                   {"agree", qp.converged && rel <= 1e-6}};
    out.expectation_met = out.expectation_met && qp.converged && rel <= 1e-6;
  }
  return out;
}

D2Table d2_table(const std::vector<unsigned>& ns, double tol, std::size_t max_iters, bool symmetry) {
  std::vector<std::future<std::pair<D2Row, EquilibriumResult>>> tasks;
  for (unsigned n : ns) {
    tasks.push_back(std::async(std::launch::async, [=] {
      const BitreeInstance inst = build_instance(n);
      EquilibriumResult eq = instance_capacity(inst, symmetry, tol, max_iters);
      D2Row row = report_d2(inst, eq);
      return std::pair{std::move(row), std::move(eq)};
    }));
  }
  D2Table table;
  for (auto& t : tasks) {
    auto [row, eq] = t.get();
    table.rows.push_back(std::move(row));
    table.equilibria.push_back(std::move(eq));
  }
  return table;
}

std::string d2_csv(const D2Table& table) {
  std::ostringstream os;
  os << "n,delta,lambda,delta_over_lambda,delta_over_lambda_instance,cap,cap_over_delta_lambda,"
        "n_mean_middle_rho,kkt_max_violation,iterations,inclusion_full\n";
  for (const auto& r : table.rows) {
    os << r.n << ',' << to_string(r.delta) << ',' << to_string(r.lambda) << ',' << to_string(r.delta_over_lambda)
       << ',' << to_string(r.delta_over_lambda_instance) << ',' << to_string(r.cap) << ','
       << to_string(r.cap_over_delta_lambda) << ',' << to_string(r.n_mean_middle_rho) << ','
       << to_string(r.kkt_max_violation) << ',' << r.iterations << ',' << (r.inclusion_full ? "true" : "false")
       << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>>& grid_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"verify", {"trials", "depth", "p"}},
      {"cex", {"k", "N", "p", "budget", "depth"}},
      {"capacity", {"n", "max_iters"}},
  };
  return keys;
}

std::string family_of(const std::string& experiment) {
  if (experiment.rfind("verify-", 0) == 0) return "verify";
  if (experiment.rfind("cex-", 0) == 0) return "cex";
  if (experiment == "capacity") return "capacity";
  return {};
}

std::uint64_t as_count(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ArgumentError("grid value for '" + key + "' must be a non-negative integer, got " + v.dump());
  }
  return v.get<std::uint64_t>();
}

double as_real(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ArgumentError("grid value for '" + key + "' must be a number, got " + v.dump());
  return v.get<double>();
}

using Cell = std::map<std::string, nlohmann::json>;

std::vector<Cell> expand(const std::map<std::string, std::vector<nlohmann::json>>& grid) {
  std::vector<Cell> cells{Cell{}};
  for (const auto& [key, values] : grid) {
    std::vector<Cell> next;
    for (const auto& c : cells) {
      for (const auto& v : values) {
        Cell d = c;
        d[key] = v;
        next.push_back(std::move(d));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

CellOutcome run_cell(const ExperimentConfig& cfg, const Cell& cell) {
  const std::string fam = family_of(cfg.experiment);
  auto get = [&](const std::string& key) -> const nlohmann::json* {
    auto it = cell.find(key);
    return it == cell.end() ? nullptr : &it->second;
  };
  if (fam == "verify") {
    SuiteOptions o;
    o.lemma = cfg.experiment.substr(7);
    o.seed = cfg.seed;
    o.mode = cfg.mode;
    if (auto v = get("trials")) o.trials = as_count(*v, "trials");
    if (auto v = get("depth")) o.depth = static_cast<unsigned>(as_count(*v, "depth"));
    if (auto v = get("p")) o.p = as_real(*v, "p");
    return suite_cell(o);
  }
  if (fam == "cex") {
    CexOptions o;
    o.generator = cfg.experiment.substr(4);
    o.seed = cfg.seed;
    o.mode = cfg.mode;
    if (auto v = get("k")) o.k = static_cast<unsigned>(as_count(*v, "k"));
    if (auto v = get("N")) o.N = static_cast<unsigned>(as_count(*v, "N"));
    if (auto v = get("p")) o.p = as_real(*v, "p");
    if (auto v = get("budget")) o.budget = as_count(*v, "budget");
    if (auto v = get("depth")) o.depth = static_cast<unsigned>(as_count(*v, "depth"));
    return run_cex(o);
  }
  CapacityOptions o;
  if (cfg.tol) o.tol = *cfg.tol;
  if (auto v = get("n")) o.n = static_cast<unsigned>(as_count(*v, "n"));
  if (auto v = get("max_iters")) o.max_iters = as_count(*v, "max_iters");
  return run_capacity(o);
}

std::string csv_field(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  static const std::set<std::string> allowed = {"experiment", "grid", "mode", "seed", "tol", "out"};
  for (const auto& [key, unused] : j.items()) {
    if (!allowed.count(key)) throw ArgumentError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    throw ArgumentError("config needs a string 'experiment'");
  }
  cfg.experiment = j["experiment"].get<std::string>();
  const std::string fam = family_of(cfg.experiment);
  if (fam.empty() || (fam == "verify" && !contains(kSuiteNames, cfg.experiment.substr(7))) ||
      (fam == "cex" && !contains(kCexNames, cfg.experiment.substr(4)))) {
    throw ArgumentError("unknown experiment '" + cfg.experiment +
                        "'; expected verify-<" + join(kSuiteNames) + ">, cex-<" + join(kCexNames) +
                        ">, or capacity");
  }
  if (!j.contains("grid") || !j["grid"].is_object() || j["grid"].empty()) {
    throw ArgumentError("config needs a nonempty object 'grid'");
  }
  const auto& keys = grid_keys().at(fam);
  for (const auto& [key, values] : j["grid"].items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ArgumentError("grid key '" + key + "' is not a parameter of " + cfg.experiment + " (allowed: " +
                          join(keys) + ")");
    }
    if (!values.is_array() || values.empty()) throw ArgumentError("grid entry '" + key + "' must be a nonempty list");
    cfg.grid[key] = values.get<std::vector<nlohmann::json>>();
  }
  if (j.contains("mode")) {
    const auto m = j["mode"].get<std::string>();
    if (m != "exact" && m != "float") throw ArgumentError("mode must be exact or float");
    cfg.mode = m == "exact" ? Mode::exact : Mode::floating;
  }
  if (j.contains("seed")) cfg.seed = as_count(j["seed"], "seed");
  if (j.contains("tol")) cfg.tol = as_real(j["tol"], "tol");
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  return cfg;
}

std::string aggregate_csv(const std::vector<nlohmann::json>& reports) {
  std::set<std::string> params;
  for (const auto& r : reports) {
    if (r.contains("params")) {
      for (const auto& [k, v] : r["params"].items()) params.insert(k);
    }
  }
  std::ostringstream os;
  os << "experiment,cell";
  for (const auto& k : params) os << ',' << k;
  os << ",lhs,rhs,ratio,holds\n";
  for (const auto& r : reports) {
    os << csv_field(r.value("experiment", nlohmann::json())) << ',' << csv_field(r.value("cell", nlohmann::json()));
    for (const auto& k : params) {
      os << ',';
      if (r.contains("params") && r["params"].contains(k)) os << csv_field(r["params"][k]);
    }
    os << ',' << csv_field(r.value("lhs", nlohmann::json())) << ',' << csv_field(r.value("rhs", nlohmann::json()))
       << ',' << csv_field(r.value("ratio", nlohmann::json())) << ','
       << csv_field(r.value("holds", nlohmann::json())) << '\n';
  }
  return os.str();
}

RunResult run_experiment(const ExperimentConfig& cfg, bool record_runtime) {
  const auto cells = expand(cfg.grid);
  std::filesystem::create_directories(cfg.out);

  struct Done {
    nlohmann::json report;
    bool ok;
    std::string file;
  };
  auto run_one = [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    CellOutcome outcome;
    try {
      outcome = run_cell(cfg, cells[i]);
    } catch (const ResourceError& e) {
      throw ResourceError("cell " + std::to_string(i) + " of " + cfg.experiment + ": " + e.what(), e.required(),
                          e.limit());
    }
    nlohmann::json& j = outcome.report;
    j["experiment"] = cfg.experiment;
    j["cell"] = i;
    j["expectation_met"] = outcome.expectation_met;
    if (record_runtime) {
      j["runtime_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    const std::string file = (std::filesystem::path(cfg.out) / (cfg.experiment + "_cell" + std::to_string(i) + ".json")).string();
    std::ofstream(file) << j.dump(2) << '\n';
    return Done{j, outcome.expectation_met, file};
  };

  // Cells run as independent tasks in waves of hardware_concurrency.
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Done> done;
  for (std::size_t begin = 0; begin < cells.size(); begin += width) {
    std::vector<std::future<Done>> wave;
    for (std::size_t i = begin; i < std::min(cells.size(), begin + width); ++i) {
      wave.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& w : wave) done.push_back(w.get());
  }

  RunResult result;
  result.cells = cells.size();
  std::vector<nlohmann::json> reports;
  for (auto& d : done) {
    if (!d.ok) ++result.failed;
    result.files.push_back(d.file);
    reports.push_back(std::move(d.report));
  }
  result.csv_path = (std::filesystem::path(cfg.out) / (cfg.experiment + ".csv")).string();
  std::ofstream(result.csv_path) << aggregate_csv(reports);
  return result;
}

}  // namespace cxlab
