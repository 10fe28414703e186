#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "probisim/galois_sim.hpp"
#include "probisim/pts.hpp"

namespace probisim {

// ---------------------------------------------------------------------------
// Line handling shared by every text format

namespace detail {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

// Splits into whitespace tokens, dropping '#' comments and blank lines.
inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::istringstream in{std::string(raw)};
    for (std::string tok; in >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] inline void syntax(std::size_t line, const std::string& msg) {
  throw ParseError(ParseError::Kind::Syntax, line, msg);
}

[[noreturn]] inline void unknown(std::size_t line, const std::string& what, const std::string& name) {
  throw ParseError(ParseError::Kind::UnknownName, line, "unknown " + what + " '" + name + "'");
}

// Declaration line "key: a b c" -> {a, b, c}; nullopt if the line is something else.
inline std::optional<std::vector<std::string>> declaration(const Line& l, std::string_view key) {
  const std::string& head = l.tokens.front();
  if (head == std::string(key) + ":") return std::vector<std::string>(l.tokens.begin() + 1, l.tokens.end());
  if (head.size() > key.size() + 1 && head.compare(0, key.size() + 1, std::string(key) + ":") == 0) {
    std::vector<std::string> v{head.substr(key.size() + 1)};
    v.insert(v.end(), l.tokens.begin() + 1, l.tokens.end());
    return v;
  }
  return std::nullopt;
}

class NameTable {
 public:
  void declare(const std::vector<std::string>& names, std::size_t line, const std::string& what) {
    for (const auto& n : names) {
      if (!index_.emplace(n, names_.size()).second) syntax(line, "duplicate " + what + " '" + n + "'");
      names_.push_back(n);
    }
  }
  std::size_t lookup(const std::string& n, std::size_t line, const std::string& what) const {
    auto it = index_.find(n);
    if (it == index_.end()) unknown(line, what, n);
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<std::string>& names() const { return names_; }
  bool empty() const { return names_.empty(); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
};

inline std::optional<double> parse_decimal(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Decimal or `p/q`; fractions are divided in binary floating point.
inline std::optional<double> parse_probability(std::string_view s) {
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = detail::parse_decimal(s.substr(0, slash));
    auto den = detail::parse_decimal(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  return detail::parse_decimal(s);
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// ---------------------------------------------------------------------------
// Probabilistic transition systems

struct PtsDocument {
  LabelledPTS pts;
  std::vector<std::string> states;  // state index -> name
};

/// Grammar: `states: ...`, `actions: ...`, then `src action dst prob` lines.
inline PtsDocument parse_pts(std::string_view text, double tol = kDefaultTolerance) {
  detail::NameTable states, actions;
  std::size_t states_line = 0, actions_line = 0;
  struct Edge {
    std::size_t line;
    std::string src, action, dst;
    double prob;
  };
  std::vector<Edge> edges;
  for (const auto& l : detail::tokenize(text)) {
    if (auto names = detail::declaration(l, "states")) {
      if (states_line) detail::syntax(l.number, "states declared twice");
      if (names->empty()) detail::syntax(l.number, "empty state declaration");
      states.declare(*names, l.number, "state");
      states_line = l.number;
    } else if (auto acts = detail::declaration(l, "actions")) {
      if (actions_line) detail::syntax(l.number, "actions declared twice");
      if (acts->empty()) detail::syntax(l.number, "empty action declaration");
      actions.declare(*acts, l.number, "action");
      actions_line = l.number;
    } else if (l.tokens.size() == 4) {
      auto prob = parse_probability(l.tokens[3]);
      if (!prob) detail::syntax(l.number, "bad probability '" + l.tokens[3] + "'");
      edges.push_back({l.number, l.tokens[0], l.tokens[1], l.tokens[2], *prob});
    } else {
      detail::syntax(l.number, "expected `src action dst prob`, a `states:` or an `actions:` line");
    }
  }
  if (!states_line) detail::syntax(0, "missing `states:` declaration");
  if (!actions_line) detail::syntax(0, "missing `actions:` declaration");

  PtsDocument doc;
  doc.states = states.names();
  doc.pts.n = doc.states.size();
  const auto n = static_cast<Eigen::Index>(doc.pts.n);
  for (const auto& a : actions.names()) doc.pts.trans.emplace(a, Matrix::Zero(n, n));

  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::map<std::pair<std::size_t, std::string>, std::size_t> row_line;  // first line of each (state, action) row
  for (const auto& e : edges) {
    const auto s = states.lookup(e.src, e.line, "state");
    const auto a = actions.lookup(e.action, e.line, "action");
    const auto t = states.lookup(e.dst, e.line, "state");
    if (!seen.emplace(s, a, t).second)
      detail::syntax(e.line, "duplicate transition " + e.src + " " + e.action + " " + e.dst);
    doc.pts.trans.at(e.action)(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = e.prob;
    row_line.try_emplace({s, e.action}, e.line);
  }

  try {
    validate_pts(doc.pts, tol);
  } catch (const ValidationError& v) {
    std::size_t line = 0;
    if (v.state()) {
      if (auto it = row_line.find({*v.state(), v.action()}); it != row_line.end()) line = it->second;
    }
    std::string msg = v.what();
    if (v.state() && *v.state() < doc.states.size())
      msg += " (state '" + doc.states[*v.state()] + "')";
    throw ParseError(ParseError::Kind::Validation, line, msg);
  }
  return doc;
}

/// Inverse of parse_pts; lists non-zero entries action by action.
inline std::string print_pts(const PtsDocument& doc, const std::vector<std::string>& header_comments = {}) {
  std::ostringstream out;
  for (const auto& c : header_comments) out << "# " << c << '\n';
  out << "states:";
  for (const auto& s : doc.states) out << ' ' << s;
  out << "\nactions:";
  for (const auto& a : doc.pts.actions()) out << ' ' << a;
  out << '\n';
  const auto n = static_cast<Eigen::Index>(doc.pts.n);
  for (const auto& [a, m] : doc.pts.trans)
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index t = 0; t < n; ++t)
        if (m(s, t) != 0.0)
          out << doc.states[static_cast<std::size_t>(s)] << ' ' << a << ' ' << doc.states[static_cast<std::size_t>(t)]
              << ' ' << format_double(m(s, t)) << '\n';
  return out.str();
}

/// Names s0..s{n-1}.
inline std::vector<std::string> default_state_names(std::size_t n, const std::string& prefix = "s") {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = prefix + std::to_string(i);
  return out;
}

// ---------------------------------------------------------------------------
// Classifications (`state class` per line)

inline Classification parse_classification(std::string_view text, const std::vector<std::string>& state_names) {
  detail::NameTable names;
  names.declare(state_names, 0, "state");
  std::vector<std::optional<std::size_t>> assign(state_names.size());
  for (const auto& l : detail::tokenize(text)) {
    if (l.tokens.size() != 2) detail::syntax(l.number, "expected `state class`");
    const auto s = names.lookup(l.tokens[0], l.number, "state");
    auto c = detail::parse_index(l.tokens[1]);
    if (!c) detail::syntax(l.number, "bad class index '" + l.tokens[1] + "'");
    if (assign[s]) detail::syntax(l.number, "state '" + l.tokens[0] + "' classified twice");
    assign[s] = *c;
  }
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < assign.size(); ++s) {
    if (!assign[s]) throw ParseError(ParseError::Kind::Validation, 0, "state '" + state_names[s] + "' has no class");
    out.push_back(*assign[s]);
  }
  try {
    return Classification::from_labels(std::move(out));
  } catch (const Error& e) {
    throw ParseError(ParseError::Kind::Validation, 0, e.what());
  }
}

inline std::string print_classification(const Classification& c, const std::vector<std::string>& state_names) {
  std::ostringstream out;
  for (std::size_t s = 0; s < c.n(); ++s) out << state_names[s] << ' ' << c[s] << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Kripke structures

struct KripkeDocument {
  KripkeStructure ks;
  std::vector<std::string> states;
};

/// Grammar: `states: ...`, optional `marked: ...`, edge lines `src -> dst`.
inline KripkeDocument parse_kripke(std::string_view text) {
  detail::NameTable states;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> marked_lines;
  std::vector<detail::Line> edge_lines;
  for (const auto& l : detail::tokenize(text)) {
    if (auto names = detail::declaration(l, "states")) {
      if (!states.empty()) detail::syntax(l.number, "states declared twice");
      if (names->empty()) detail::syntax(l.number, "empty state declaration");
      states.declare(*names, l.number, "state");
    } else if (auto m = detail::declaration(l, "marked")) {
      marked_lines.emplace_back(l.number, *m);
    } else if (l.tokens.size() == 3 && l.tokens[1] == "->") {
      edge_lines.push_back(l);
    } else {
      detail::syntax(l.number, "expected `src -> dst`, `states:` or `marked:`");
    }
  }
  if (states.empty()) detail::syntax(0, "missing `states:` declaration");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& l : edge_lines) {
    auto e = std::make_pair(states.lookup(l.tokens[0], l.number, "state"), states.lookup(l.tokens[2], l.number, "state"));
    if (!seen.insert(e).second) detail::syntax(l.number, "duplicate edge");
    edges.push_back(e);
  }
  std::vector<std::size_t> marked;
  for (const auto& [line, names] : marked_lines)
    for (const auto& n : names) marked.push_back(states.lookup(n, line, "state"));
  return {KripkeStructure(states.names().size(), edges, marked), states.names()};
}

inline std::string print_kripke(const KripkeDocument& doc) {
  std::ostringstream out;
  out << "states:";
  for (const auto& s : doc.states) out << ' ' << s;
  out << '\n';
  if (!doc.ks.marked().empty()) {
    out << "marked:";
    for (auto s : doc.ks.marked()) out << ' ' << doc.states[s];
    out << '\n';
  }
  for (std::size_t s = 0; s < doc.ks.n(); ++s)
    for (auto t : doc.ks.succ(s)) out << doc.states[s] << " -> " << doc.states[t] << '\n';
  return out.str();
}

/// `c a` per line, names resolved against the two structures.
inline Relation parse_relation(std::string_view text, const std::vector<std::string>& conc,
                               const std::vector<std::string>& abs) {
  detail::NameTable cn, an;
  cn.declare(conc, 0, "concrete state");
  an.declare(abs, 0, "abstract state");
  Relation r(conc.size(), abs.size());
  for (const auto& l : detail::tokenize(text)) {
    if (l.tokens.size() != 2) detail::syntax(l.number, "expected `concrete abstract`");
    r.insert(cn.lookup(l.tokens[0], l.number, "concrete state"), an.lookup(l.tokens[1], l.number, "abstract state"));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Galois connections

struct GaloisDocument {
  GaloisSpec spec;
  std::vector<std::string> concrete;
  std::vector<std::string> abstract;
};

/// Grammar: `abstract: ...`, `leq: x <= y` lines (closed reflexively and
/// transitively), `alpha: c m` per concrete state, optional `concrete: ...`
/// (otherwise concrete states are taken from the alpha lines in order), and
/// optional `alpha-set: m c1 c2 ...` lines overriding alpha on one subset.
inline GaloisDocument parse_galois(std::string_view text, std::size_t cap = kDefaultPowersetCap) {
  detail::NameTable abs, conc;
  bool explicit_concrete = false;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> leq_lines, alpha_lines, set_lines;
  for (const auto& l : detail::tokenize(text)) {
    if (auto names = detail::declaration(l, "abstract")) {
      if (!abs.empty()) detail::syntax(l.number, "abstract elements declared twice");
      if (names->empty()) detail::syntax(l.number, "empty abstract declaration");
      abs.declare(*names, l.number, "abstract element");
    } else if (auto c = detail::declaration(l, "concrete")) {
      if (explicit_concrete) detail::syntax(l.number, "concrete states declared twice");
      conc.declare(*c, l.number, "concrete state");
      explicit_concrete = true;
    } else if (auto x = detail::declaration(l, "leq")) {
      if (x->size() != 3 || (*x)[1] != "<=") detail::syntax(l.number, "expected `leq: x <= y`");
      leq_lines.emplace_back(l.number, *x);
    } else if (auto a = detail::declaration(l, "alpha")) {
      if (a->size() != 2) detail::syntax(l.number, "expected `alpha: concrete abstract`");
      alpha_lines.emplace_back(l.number, *a);
    } else if (auto s = detail::declaration(l, "alpha-set")) {
      if (s->empty()) detail::syntax(l.number, "expected `alpha-set: abstract concrete...`");
      set_lines.emplace_back(l.number, *s);
    } else {
      detail::syntax(l.number, "expected `abstract:`, `concrete:`, `leq:`, `alpha:` or `alpha-set:`");
    }
  }
  if (abs.empty()) detail::syntax(0, "missing `abstract:` declaration");

  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (const auto& [line, x] : leq_lines)
    order.emplace_back(abs.lookup(x[0], line, "abstract element"), abs.lookup(x[2], line, "abstract element"));

  GaloisDocument doc;
  try {
    doc.spec.abs = FiniteLattice::from_pairs(abs.names().size(), order);
  } catch (const NotALattice& e) {
    throw ParseError(ParseError::Kind::NotALattice, leq_lines.empty() ? 0 : leq_lines.front().first,
                     std::string("abstract order is not a lattice: ") + e.what());
  }

  if (!explicit_concrete)
    for (const auto& [line, a] : alpha_lines)
      if (!conc.find(a[0])) conc.declare({a[0]}, line, "concrete state");
  const std::size_t n = conc.names().size();
  if (n > cap) throw ParseError(ParseError::Kind::Validation, 0, CarrierTooLarge(n, cap).what());

  std::vector<std::optional<std::size_t>> alpha(n);
  for (const auto& [line, a] : alpha_lines) {
    const auto c = conc.lookup(a[0], line, "concrete state");
    if (alpha[c]) detail::syntax(line, "alpha given twice for '" + a[0] + "'");
    alpha[c] = abs.lookup(a[1], line, "abstract element");
  }
  doc.spec.concrete_n = n;
  for (std::size_t c = 0; c < n; ++c) {
    if (!alpha[c])
      throw ParseError(ParseError::Kind::Validation, 0, "no alpha line for concrete state '" + conc.names()[c] + "'");
    doc.spec.alpha_singleton.push_back(*alpha[c]);
  }
  if (!set_lines.empty()) {
    auto table = doc.spec.join_extended_table();
    std::set<StateSet> overridden;
    for (const auto& [line, s] : set_lines) {
      const auto m = abs.lookup(s[0], line, "abstract element");
      StateSet set = 0;
      for (std::size_t i = 1; i < s.size(); ++i) set |= StateSet{1} << conc.lookup(s[i], line, "concrete state");
      if (!overridden.insert(set).second) detail::syntax(line, "alpha-set given twice for the same subset");
      table[set] = m;
    }
    doc.spec.alpha_table = std::move(table);
  }
  doc.concrete = conc.names();
  doc.abstract = abs.names();
  return doc;
}

}  // namespace probisim
