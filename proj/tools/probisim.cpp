// probisim: command-line front end for the probisim library.
//
// Exit codes: 0 computed / holds, 1 computed / does not hold,
// 2 input or validation error, 3 exhaustive budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probisim/probisim.hpp"
#include "probisim/report.hpp"

namespace {

using namespace probisim;
using report::ordered_json;

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kInputError = 2;
constexpr int kBudget = 3;

/// Error tied to one input file, printed as `path:line: message`.
struct InputError {
  std::string path;
  std::size_t line;
  std::string message;
};

struct Source {
  std::string path;
  std::string text;
};

Source read_source(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError{path, 0, "cannot open file"};
    buf << in.rdbuf();
  }
  return {path, buf.str()};
}

/// Reads two inputs, draining stdin first so that a file still being written
/// by an upstream `tee` is read only after the pipe has closed.
std::pair<Source, Source> read_pair(const std::string& f1, const std::string& f2) {
  if (f2 == "-" && f1 != "-") {
    auto s2 = read_source(f2);
    return {read_source(f1), std::move(s2)};
  }
  auto s1 = read_source(f1);
  return {std::move(s1), read_source(f2)};
}

template <class F>
auto parse_with(const Source& src, F&& parse) {
  try {
    return parse(src.text);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    if (e.line() > 0) msg = msg.substr(msg.find(": ") + 2);  // drop the "line N: " prefix, path:line replaces it
    throw InputError{src.path, e.line(), msg};
  } catch (const Error& e) {
    throw InputError{src.path, 0, e.what()};
  }
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError{path, 0, "cannot write file"};
  out << content;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string join_names(const std::vector<std::size_t>& states, const std::vector<std::string>& names) {
  std::string out;
  for (auto s : states) out += (out.empty() ? "" : " ") + names[s];
  return out;
}

struct Global {
  std::string format = "text";
  std::string report_path;
  double tol = kDefaultTolerance;
};

class Run {
 public:
  Run(const Global& g, std::string command) : g_(g), report_(report::skeleton(command)) {
    start_ = std::chrono::steady_clock::now();
  }

  void input(const Source& s) { report_["inputs"].push_back(report::input(s.path, s.text)); }
  ordered_json& params() { return report_["parameters"]; }
  ordered_json& result() { return report_["result"]; }
  std::ostringstream& text() { return text_; }

  /// Emits the human summary or the JSON report on stdout, plus the report
  /// file when requested.
  int finish(int code, bool summary_on_stdout = true) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    report_["exit_code"] = code;
    report_["wall_time_ms"] = ms;
    const std::string json = report_.dump(2) + "\n";
    if (!g_.report_path.empty()) write_file(g_.report_path, json);
    if (summary_on_stdout) {
      if (g_.format == "json")
        std::cout << json;
      else
        std::cout << text_.str();
    } else if (g_.format == "json") {
      std::cerr << json;
    }
    return code;
  }

 private:
  const Global& g_;
  ordered_json report_;
  std::ostringstream text_;
  std::chrono::steady_clock::time_point start_;
};

// --------------------------------------------------------------------------

int cmd_bisim(const Global& g, const std::string& f1, const std::string& f2) {
  Run run(g, "bisim");
  const auto [s1, s2] = read_pair(f1, f2);
  const auto d1 = parse_with(s1, [&](const std::string& t) { return parse_pts(t, g.tol); });
  const auto d2 = parse_with(s2, [&](const std::string& t) { return parse_pts(t, g.tol); });
  run.input(s1);
  run.input(s2);
  run.params()["tol"] = g.tol;

  const auto r = are_bisimilar(d1.pts, d2.pts, g.tol);
  std::vector<std::string> names;
  for (const auto& n : d1.states) names.push_back("1:" + n);
  for (const auto& n : d2.states) names.push_back("2:" + n);
  run.result()["bisimilar"] = r.bisimilar;
  run.result()["union_partition"] = report::blocks(r.union_partition, names);
  run.text() << "bisimilar: " << (r.bisimilar ? "yes" : "no") << '\n';
  run.text() << "union classes: " << r.union_partition.size() << '\n';
  for (const auto& b : r.union_partition.blocks()) run.text() << "  { " << join_names(b, names) << " }\n";
  if (r.witness) {
    const auto& w = *r.witness;
    run.result()["classes"] = w.m;
    run.result()["k1"] = report::classification(w.k1, d1.states);
    run.result()["k2"] = report::classification(w.k2, d2.states);
    run.result()["quotient"] = report::system(w.quotient);
  }
  return run.finish(r.bisimilar ? kHolds : kFails);
}

int cmd_quotient(const Global& g, const std::string& file, const std::string& partition_file, bool coarsest) {
  Run run(g, "quotient");
  const auto src = read_source(file);
  const auto doc = parse_with(src, [&](const std::string& t) { return parse_pts(t, g.tol); });
  run.input(src);
  run.params()["tol"] = g.tol;

  Classification c;
  if (!partition_file.empty() && !coarsest) {
    const auto ps = read_source(partition_file);
    c = parse_with(ps, [&](const std::string& t) { return parse_classification(t, doc.states); });
    run.input(ps);
    run.params()["partition"] = "file";
  } else {
    c = partition_to_classification(coarsest_bisimulation(doc.pts, g.tol));
    run.params()["partition"] = "coarsest";
  }

  LabelledPTS q;
  try {
    q = quotient(doc.pts, c, g.tol);
  } catch (const NotLumpable& e) {
    throw InputError{partition_file.empty() ? file : partition_file, 0, e.what()};
  }
  const auto part = classification_to_partition(c);
  PtsDocument out;
  out.pts = q;
  out.states.resize(c.m());
  std::vector<std::string> comments{"quotient of " + src.path};
  for (std::size_t j = 0; j < c.m(); ++j) {
    // class j is named after its smallest member
    std::size_t rep = doc.pts.n;
    std::vector<std::size_t> members_of;
    for (std::size_t s = 0; s < c.n(); ++s)
      if (c[s] == j) {
        if (rep == doc.pts.n) rep = s;
        members_of.push_back(s);
      }
    out.states[j] = doc.states[rep];
    comments.push_back(out.states[j] + " = { " + join_names(members_of, doc.states) + " }");
  }
  run.result()["classes"] = c.m();
  run.result()["partition"] = report::blocks(part, doc.states);
  run.result()["quotient"] = report::system(q);
  std::cout << print_pts(out, comments);
  return run.finish(kHolds, false);
}

struct EpsilonArgs {
  std::string norm = "op-inf";
  std::string witnesses = "lumpable";
  std::string aggregate = "max";
  bool exact = false;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  double max_pairs = 1e7;
};

int cmd_epsilon(const Global& g, const std::string& f1, const std::string& f2, const EpsilonArgs& a) {
  Run run(g, "epsilon");
  const auto [s1, s2] = read_pair(f1, f2);
  const auto d1 = parse_with(s1, [&](const std::string& t) { return parse_pts(t, g.tol); });
  const auto d2 = parse_with(s2, [&](const std::string& t) { return parse_pts(t, g.tol); });
  run.input(s1);
  run.input(s2);

  EpsilonOptions o;
  o.norm = *parse_norm_kind(a.norm);
  o.policy = *parse_witness_policy(a.witnesses);
  o.aggregation = *parse_aggregation(a.aggregate);
  o.tol = g.tol;
  const bool search = !a.exact && (a.budget || a.seed);
  run.params()["tol"] = g.tol;
  run.params()["norm"] = a.norm;
  run.params()["witnesses"] = a.witnesses;
  run.params()["aggregate"] = a.aggregate;
  run.params()["method"] = search ? "local-search" : "exhaustive";

  EpsilonResult r;
  if (search) {
    SearchOptions so;
    so.base = o;
    so.budget = a.budget.value_or(so.budget);
    so.seed = a.seed.value_or(so.seed);
    run.params()["budget"] = so.budget;
    run.params()["seed"] = so.seed;
    r = epsilon_bisim_search(d1.pts, d2.pts, so);
  } else {
    ExactOptions eo;
    eo.base = o;
    eo.jobs = a.jobs;
    eo.max_pairs = a.max_pairs;
    run.params()["max_pairs"] = a.max_pairs;
    try {
      r = epsilon_bisim_exact(d1.pts, d2.pts, eo);
    } catch (const BudgetExceeded& e) {
      run.result()["error"] = e.what();
      run.result()["pairs"] = e.count();
      std::cerr << "error: " << e.what() << " (limit " << a.max_pairs << "); use --budget/--seed for local search\n";
      return run.finish(kBudget);
    }
  }
  run.result() = report::epsilon(r, d1.states, d2.states);
  if (r.found()) {
    run.text() << "epsilon: " << format_double(r.epsilon) << '\n';
    run.text() << "classes: " << r.k1->m() << '\n';
    run.text() << "k1: " << print_classification(*r.k1, d1.states);
    run.text() << "k2: " << print_classification(*r.k2, d2.states);
  } else {
    run.text() << "epsilon: inf (no admissible classification pair with equal class count)\n";
  }
  run.text() << "method: " << to_string(r.method) << (r.optimal ? " (optimal)" : " (upper bound)") << '\n';
  return run.finish(kHolds);
}

int cmd_sim_check(const Global& g, const std::string& cf, const std::string& af, const std::string& relation_file) {
  Run run(g, "sim-check");
  const auto cs = read_source(cf);
  const auto as = read_source(af);
  const auto c = parse_with(cs, [](const std::string& t) { return parse_kripke(t); });
  const auto a = parse_with(as, [](const std::string& t) { return parse_kripke(t); });
  run.input(cs);
  run.input(as);

  auto pairs_json = [&](const Relation& r) {
    ordered_json out = ordered_json::array();
    for (auto [x, y] : r.pairs()) out.push_back({c.states[x], a.states[y]});
    return out;
  };
  ordered_json marked = ordered_json::object();
  marked["concrete"] = ordered_json::array();
  marked["abstract"] = ordered_json::array();
  for (auto s : c.ks.marked()) marked["concrete"].push_back(c.states[s]);
  for (auto s : a.ks.marked()) marked["abstract"].push_back(a.states[s]);
  run.result()["marked"] = marked;

  if (!relation_file.empty()) {
    const auto rs = read_source(relation_file);
    const auto rel = parse_with(rs, [&](const std::string& t) { return parse_relation(t, c.states, a.states); });
    run.input(rs);
    run.params()["mode"] = "relation";
    const auto check = is_simulation(c.ks, a.ks, rel);
    run.result()["simulation"] = check.holds;
    run.result()["relation"] = pairs_json(rel);
    run.text() << "simulation: " << (check.holds ? "yes" : "no") << '\n';
    if (check.counterexample) {
      const auto& v = *check.counterexample;
      run.result()["counterexample"] = {{"c", c.states[v.c]}, {"a", a.states[v.a]}, {"c_next", c.states[v.c_next]}};
      run.text() << "counterexample: " << c.states[v.c] << " R " << a.states[v.a] << ", " << c.states[v.c] << " -> "
                 << c.states[v.c_next] << " has no matching step\n";
    }
    return run.finish(check.holds ? kHolds : kFails);
  }

  run.params()["mode"] = "largest";
  const auto rel = largest_simulation(c.ks, a.ks);
  run.result()["simulation"] = true;
  run.result()["relation"] = pairs_json(rel);
  run.text() << "largest simulation (" << rel.size() << " pairs):\n";
  for (auto [x, y] : rel.pairs()) run.text() << "  " << c.states[x] << " " << a.states[y] << '\n';
  return run.finish(kHolds);
}

int cmd_galois_check(const Global& g, const std::string& gf, const std::vector<std::string>& against) {
  Run run(g, "galois-check");
  const auto gs = read_source(gf);
  const auto doc = parse_with(gs, [](const std::string& t) { return parse_galois(t); });
  run.input(gs);

  const auto check = check_galois(doc.spec);
  run.result()["galois"] = check.holds;
  run.text() << "galois connection: " << (check.holds ? "yes" : "no") << '\n';
  if (check.violation) {
    const auto& v = *check.violation;
    ordered_json j;
    j["message"] = v.message;
    switch (v.kind) {
      case GaloisViolation::Kind::AlphaNotMonotone:
        j["kind"] = "alpha-not-monotone";
        j["set"] = report::state_set(v.set, doc.concrete);
        j["larger_set"] = report::state_set(v.larger_set, doc.concrete);
        j["alpha_set"] = doc.abstract[v.elem];
        j["alpha_larger_set"] = doc.abstract[v.larger_elem];
        break;
      case GaloisViolation::Kind::GammaNotMonotone:
        j["kind"] = "gamma-not-monotone";
        j["elem"] = doc.abstract[v.elem];
        j["larger_elem"] = doc.abstract[v.larger_elem];
        break;
      case GaloisViolation::Kind::GammaAlphaNotExtensive:
        j["kind"] = "gamma-alpha-not-extensive";
        j["set"] = report::state_set(v.set, doc.concrete);
        break;
      case GaloisViolation::Kind::AlphaGammaNotReductive:
        j["kind"] = "alpha-gamma-not-reductive";
        j["elem"] = doc.abstract[v.elem];
        break;
    }
    run.result()["violation"] = j;
    run.text() << "violation: " << j.dump() << '\n';
  }
  int code = check.holds ? kHolds : kFails;

  if (against.size() == 2) {
    const auto cs = read_source(against[0]);
    const auto as = read_source(against[1]);
    const auto c = parse_with(cs, [](const std::string& t) { return parse_kripke(t); });
    const auto a = parse_with(as, [](const std::string& t) { return parse_kripke(t); });
    run.input(cs);
    run.input(as);
    if (c.states != doc.concrete)
      throw InputError{cs.path, 0, "concrete states must match the Galois spec's concrete states in order"};
    std::vector<std::size_t> state_of;
    for (const auto& e : doc.abstract) {
      auto it = std::find(a.states.begin(), a.states.end(), e);
      if (it == a.states.end()) throw InputError{as.path, 0, "no abstract state named '" + e + "'"};
      state_of.push_back(static_cast<std::size_t>(it - a.states.begin()));
    }
    const auto basis = check_abstraction_basis(c.ks, a.ks, doc.spec, state_of);
    run.result()["abstraction_basis"] = basis.holds;
    run.text() << "abstraction basis: " << (basis.holds ? "yes" : "no") << '\n';
    if (basis.counterexample) {
      const auto& v = *basis.counterexample;
      run.result()["basis_counterexample"] = {{"set", report::state_set(v.set, doc.concrete)},
                                              {"abstract", doc.abstract[v.elem]},
                                              {"post", report::state_set(v.post, doc.concrete)}};
      run.text() << "counterexample: S = " << report::state_set(v.set, doc.concrete).dump()
                 << ", a = " << doc.abstract[v.elem] << ", post(S) = " << report::state_set(v.post, doc.concrete).dump()
                 << '\n';
    }
    if (!basis.holds) code = kFails;
  }
  return run.finish(code);
}

// --------------------------------------------------------------------------

int cmd_gen_random(const Global& g, std::size_t n, const std::string& actions, double density, std::uint64_t seed,
                   const std::string& out) {
  Run run(g, "gen random");
  run.params()["states"] = n;
  run.params()["actions"] = actions;
  run.params()["density"] = density;
  run.params()["seed"] = seed;
  PtsDocument doc;
  try {
    doc.pts = gen_random_pts(n, split_list(actions), density, seed);
  } catch (const Error& e) {
    throw InputError{"gen random", 0, e.what()};
  }
  doc.states = default_state_names(n);
  write_file(out, print_pts(doc, {"gen random seed " + std::to_string(seed)}));
  return run.finish(kHolds, false);
}

int cmd_gen_planted(const Global& g, const std::string& qf, const std::string& mult, std::uint64_t seed,
                    const std::string& out, std::string truth) {
  Run run(g, "gen planted");
  const auto qs = read_source(qf);
  const auto q = parse_with(qs, [&](const std::string& t) { return parse_pts(t, g.tol); });
  run.input(qs);
  std::vector<std::size_t> m;
  for (const auto& tok : split_list(mult)) {
    auto v = detail::parse_index(tok);
    if (!v) throw InputError{"--mult", 0, "bad multiplicity '" + tok + "'"};
    m.push_back(*v);
  }
  if (m.size() == 1 && q.pts.n > 1) m.assign(q.pts.n, m.front());
  PlantedSystem planted;
  try {
    planted = gen_planted(q.pts, m, seed);
  } catch (const Error& e) {
    throw InputError{"--mult", 0, e.what()};
  }
  PtsDocument doc;
  doc.pts = planted.lift;
  for (std::size_t s = 0; s < planted.lift.n; ++s) {
    const std::size_t j = planted.truth[s];
    std::size_t k = 0;
    for (std::size_t t = 0; t < s; ++t) k += planted.truth[t] == j;
    doc.states.push_back(q.states[j] + "_" + std::to_string(k));
  }
  run.params()["multiplicities"] = m;
  run.params()["seed"] = seed;
  run.result()["truth"] = report::classification(planted.truth, doc.states);
  write_file(out, print_pts(doc, {"gen planted from " + qs.path + " seed " + std::to_string(seed)}));
  if (truth.empty() && !out.empty() && out != "-") truth = out + ".class";
  if (!truth.empty()) write_file(truth, print_classification(planted.truth, doc.states));
  return run.finish(kHolds, false);
}

int cmd_gen_perturb(const Global& g, const std::string& pf, double delta, std::uint64_t seed, const std::string& out) {
  Run run(g, "gen perturb");
  const auto ps = read_source(pf);
  auto doc = parse_with(ps, [&](const std::string& t) { return parse_pts(t, g.tol); });
  run.input(ps);
  run.params()["delta"] = delta;
  run.params()["seed"] = seed;
  try {
    doc.pts = perturb(doc.pts, delta, seed);
  } catch (const Error& e) {
    throw InputError{"--delta", 0, e.what()};
  }
  write_file(out, print_pts(doc, {"gen perturb of " + ps.path + " delta " + format_double(delta) + " seed " +
                                  std::to_string(seed)}));
  return run.finish(kHolds, false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and approximate probabilistic bisimulation, simulations and Galois connections"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--format", g.format, "Summary format on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--report", g.report_path, "Also write the JSON report to this file");
  app.add_option("--tol", g.tol, "Probability comparison tolerance")->capture_default_str();

  int code = kHolds;
  auto guarded = [&](auto&& fn) {
    return [&, fn] {
      try {
        code = fn();
      } catch (const InputError& e) {
        std::cerr << e.path;
        if (e.line > 0) std::cerr << ':' << e.line;
        std::cerr << ": error: " << e.message << '\n';
        code = kInputError;
      } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kBudget;
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kInputError;
      }
    };
  };

  auto add_tol = [&](CLI::App* sub) { sub->add_option("--tol", g.tol, "Probability comparison tolerance"); };

  std::string f1, f2;
  auto* bisim = app.add_subcommand("bisim", "Decide bisimilarity of two systems");
  bisim->add_option("P1", f1, "First system ('-' for stdin)")->required();
  bisim->add_option("P2", f2, "Second system ('-' for stdin)")->required();
  add_tol(bisim);
  bisim->callback(guarded([&] { return cmd_bisim(g, f1, f2); }));

  std::string partition_file;
  bool coarsest = false;
  auto* quot = app.add_subcommand("quotient", "Print the lumped system");
  quot->add_option("P", f1, "System ('-' for stdin)")->required();
  auto* popt = quot->add_option("--partition", partition_file, "Classification file (`state class` lines)");
  quot->add_flag("--coarsest", coarsest, "Lump by the coarsest bisimulation (default)")->excludes(popt);
  add_tol(quot);
  quot->callback(guarded([&] { return cmd_quotient(g, f1, partition_file, coarsest); }));

  EpsilonArgs ea;
  std::uint64_t budget = 0, seed = 0;
  auto* eps = app.add_subcommand("epsilon", "Compute epsilon-bisimilarity");
  eps->add_option("P1", f1, "First system")->required();
  eps->add_option("P2", f2, "Second system")->required();
  eps->add_option("--norm", ea.norm)->check(CLI::IsMember({"op-inf", "entry-max", "frobenius"}))->capture_default_str();
  eps->add_option("--witnesses", ea.witnesses, "Admissible classification pairs")
      ->check(CLI::IsMember({"lumpable", "any"}))
      ->capture_default_str();
  eps->add_option("--aggregate", ea.aggregate, "Combine per-action norms")
      ->check(CLI::IsMember({"max", "sum"}))
      ->capture_default_str();
  auto* exact_flag = eps->add_flag("--exact", ea.exact, "Exhaustive search (default)");
  auto* budget_opt = eps->add_option("--budget", budget, "Local-search proposal budget")->excludes(exact_flag);
  auto* seed_opt = eps->add_option("--seed", seed, "Local-search seed")->excludes(exact_flag);
  eps->add_option("--jobs", ea.jobs, "Threads for the exhaustive search")->capture_default_str();
  eps->add_option("--max-pairs", ea.max_pairs, "Exhaustive search limit")->capture_default_str();
  add_tol(eps);
  eps->callback(guarded([&] {
    if (budget_opt->count()) ea.budget = budget;
    if (seed_opt->count()) ea.seed = seed;
    return cmd_epsilon(g, f1, f2, ea);
  }));

  std::string relation_file;
  bool largest = false;
  auto* sim = app.add_subcommand("sim-check", "Check or compute a simulation between Kripke structures");
  sim->add_option("C", f1, "Concrete structure")->required();
  sim->add_option("A", f2, "Abstract structure")->required();
  auto* ropt = sim->add_option("--relation", relation_file, "Relation file (`c a` lines)");
  sim->add_flag("--largest", largest, "Compute the largest simulation (default)")->excludes(ropt);
  sim->callback(guarded([&] { return cmd_sim_check(g, f1, f2, relation_file); }));

  std::vector<std::string> against;
  auto* gal = app.add_subcommand("galois-check", "Verify a Galois connection");
  gal->add_option("G", f1, "Galois spec file")->required();
  gal->add_option("--against", against, "Concrete and abstract Kripke structures")->expected(2);
  gal->callback(guarded([&] { return cmd_galois_check(g, f1, against); }));

  auto* gen = app.add_subcommand("gen", "Generate systems");
  gen->require_subcommand(1);
  std::string out, truth, actions = "a", mult;
  std::size_t states = 4;
  double density = 1.0, delta = 0.01;
  std::uint64_t gseed = 0;

  auto* grand = gen->add_subcommand("random", "Random reactive system with dyadic probabilities");
  grand->add_option("--states", states)->capture_default_str();
  grand->add_option("--actions", actions, "Comma-separated labels")->capture_default_str();
  grand->add_option("--density", density, "Probability that an action is enabled")->capture_default_str();
  grand->add_option("--seed", gseed)->capture_default_str();
  grand->add_option("--out", out, "Output file (stdout by default)");
  grand->callback(guarded([&] { return cmd_gen_random(g, states, actions, density, gseed, out); }));

  auto* gplant = gen->add_subcommand("planted", "Lift a quotient system to a bisimilar refinement");
  gplant->add_option("Q", f1, "Quotient system")->required();
  gplant->add_option("--mult", mult, "Copies per quotient state, comma-separated (one value = all)")->required();
  gplant->add_option("--seed", gseed)->capture_default_str();
  gplant->add_option("--out", out, "Output file (stdout by default)");
  gplant->add_option("--truth", truth, "Ground-truth classification file (default <out>.class)");
  add_tol(gplant);
  gplant->callback(guarded([&] { return cmd_gen_planted(g, f1, mult, gseed, out, truth); }));

  auto* gpert = gen->add_subcommand("perturb", "Move up to delta mass in every enabled row");
  gpert->add_option("P", f1, "System")->required();
  gpert->add_option("--delta", delta)->capture_default_str();
  gpert->add_option("--seed", gseed)->capture_default_str();
  gpert->add_option("--out", out, "Output file (stdout by default)");
  add_tol(gpert);
  gpert->callback(guarded([&] { return cmd_gen_perturb(g, f1, delta, gseed, out); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }
  return code;
}
