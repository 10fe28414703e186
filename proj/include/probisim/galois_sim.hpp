#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probisim/error.hpp"

namespace probisim {

/// Subset of a small concrete state space, bit s = state s.
using StateSet = std::uint64_t;

inline constexpr std::size_t kDefaultPowersetCap = 16;

inline std::vector<std::size_t> members(StateSet s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; s != 0; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Kripke structures and simulations

/// Finite transition graph with a distinguished state set. The marked set
/// is carried along for reporting; simulation checks do not look at it.
class KripkeStructure {
 public:
  KripkeStructure() = default;

  KripkeStructure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                  std::vector<std::size_t> marked = {})
      : succ_(n), marked_(std::move(marked)) {
    for (auto [s, t] : edges) {
      if (s >= n || t >= n) throw InvalidStructure("edge endpoint out of range");
      succ_[s].push_back(t);
    }
    for (auto& v : succ_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto s : marked_)
      if (s >= n) throw InvalidStructure("marked state out of range");
    std::sort(marked_.begin(), marked_.end());
    marked_.erase(std::unique(marked_.begin(), marked_.end()), marked_.end());
  }

  std::size_t n() const { return succ_.size(); }
  const std::vector<std::size_t>& succ(std::size_t s) const { return succ_[s]; }
  const std::vector<std::size_t>& marked() const { return marked_; }

  bool has_edge(std::size_t s, std::size_t t) const { return std::binary_search(succ_[s].begin(), succ_[s].end(), t); }

  std::size_t edge_count() const {
    std::size_t k = 0;
    for (const auto& v : succ_) k += v.size();
    return k;
  }

  /// Strongest post: every one-step successor of a state in s.
  StateSet post(StateSet s) const {
    StateSet out = 0;
    for (auto c : members(s))
      for (auto t : succ_[c]) out |= StateSet{1} << t;
    return out;
  }

 private:
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> marked_;
};

/// Relation between the states of two structures, stored as a bit table.
class Relation {
 public:
  Relation() = default;
  Relation(std::size_t rows, std::size_t cols, bool full = false)
      : rows_(rows), cols_(cols), bits_(rows * cols, full ? 1 : 0) {}

  static Relation identity(std::size_t n) {
    Relation r(n, n);
    for (std::size_t i = 0; i < n; ++i) r.insert(i, i);
    return r;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool contains(std::size_t c, std::size_t a) const { return bits_[c * cols_ + a] != 0; }
  void insert(std::size_t c, std::size_t a) { bits_[c * cols_ + a] = 1; }
  void erase(std::size_t c, std::size_t a) { bits_[c * cols_ + a] = 0; }

  std::size_t size() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t c = 0; c < rows_; ++c)
      for (std::size_t a = 0; a < cols_; ++a)
        if (contains(c, a)) out.emplace_back(c, a);
    return out;
  }

  Relation operator|(const Relation& o) const {
    Relation r = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] |= o.bits_[i];
    return r;
  }

  bool operator==(const Relation&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<unsigned char> bits_;
};

struct SimulationViolation {
  std::size_t c = 0, a = 0, c_next = 0;  // c R a, c -> c_next, no matching a -> a'
  bool operator==(const SimulationViolation&) const = default;
};

struct SimulationCheck {
  bool holds = true;
  std::optional<SimulationViolation> counterexample;
  explicit operator bool() const { return holds; }
};

/// Checks that every concrete step from a related pair is matched by an
/// abstract step into a related pair. The counterexample is the
/// lexicographically smallest (c, a, c').
inline SimulationCheck is_simulation(const KripkeStructure& conc, const KripkeStructure& abs, const Relation& r) {
  if (r.rows() != conc.n() || r.cols() != abs.n()) throw DimensionMismatch("relation does not match structure sizes");
  for (std::size_t c = 0; c < conc.n(); ++c)
    for (std::size_t a = 0; a < abs.n(); ++a) {
      if (!r.contains(c, a)) continue;
      for (auto c2 : conc.succ(c)) {
        const auto& next = abs.succ(a);
        const bool matched = std::any_of(next.begin(), next.end(), [&](std::size_t a2) { return r.contains(c2, a2); });
        if (!matched) return {false, SimulationViolation{c, a, c2}};
      }
    }
  return {};
}

/// Greatest simulation: start from the full relation and drop violating
/// pairs until nothing changes.
inline Relation largest_simulation(const KripkeStructure& conc, const KripkeStructure& abs) {
  Relation r(conc.n(), abs.n(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t c = 0; c < conc.n(); ++c)
      for (std::size_t a = 0; a < abs.n(); ++a) {
        if (!r.contains(c, a)) continue;
        for (auto c2 : conc.succ(c)) {
          const auto& next = abs.succ(a);
          if (std::none_of(next.begin(), next.end(), [&](std::size_t a2) { return r.contains(c2, a2); })) {
            r.erase(c, a);
            changed = true;
            break;
          }
        }
      }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Finite lattices and Galois connections

class FiniteLattice {
 public:
  FiniteLattice() = default;

  /// leq[x][y] == x <= y. Throws NotALattice.
  explicit FiniteLattice(std::vector<std::vector<bool>> leq) : leq_(std::move(leq)) {
    const std::size_t k = leq_.size();
    if (k == 0) throw NotALattice("lattice carrier is empty");
    for (const auto& row : leq_)
      if (row.size() != k) throw NotALattice("order table is not square");
    for (std::size_t x = 0; x < k; ++x) {
      if (!leq_[x][x]) throw NotALattice("order is not reflexive at element " + std::to_string(x));
      for (std::size_t y = 0; y < k; ++y) {
        if (x != y && leq_[x][y] && leq_[y][x])
          throw NotALattice("antisymmetry fails between elements " + std::to_string(x) + " and " + std::to_string(y));
        for (std::size_t z = 0; z < k; ++z)
          if (leq_[x][y] && leq_[y][z] && !leq_[x][z])
            throw NotALattice("order is not transitive at " + std::to_string(x) + ", " + std::to_string(y) + ", " +
                              std::to_string(z));
      }
    }
    // Pairwise joins and meets plus top and bottom give completeness for a
    // finite poset.
    join_.assign(k, std::vector<std::size_t>(k));
    meet_.assign(k, std::vector<std::size_t>(k));
    for (std::size_t x = 0; x < k; ++x)
      for (std::size_t y = 0; y < k; ++y) {
        auto j = extremum(x, y, true);
        auto m = extremum(x, y, false);
        if (!j) throw NotALattice("elements " + std::to_string(x) + " and " + std::to_string(y) + " have no join");
        if (!m) throw NotALattice("elements " + std::to_string(x) + " and " + std::to_string(y) + " have no meet");
        join_[x][y] = *j;
        meet_[x][y] = *m;
      }
    bottom_ = 0;
    top_ = 0;
    for (std::size_t x = 1; x < k; ++x) {
      bottom_ = meet_[bottom_][x];
      top_ = join_[top_][x];
    }
  }

  /// Builds the order as the reflexive-transitive closure of the given pairs.
  static FiniteLattice from_pairs(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::vector<bool>> leq(k, std::vector<bool>(k, false));
    for (std::size_t x = 0; x < k; ++x) leq[x][x] = true;
    for (auto [x, y] : pairs) {
      if (x >= k || y >= k) throw NotALattice("order pair out of range");
      leq[x][y] = true;
    }
    for (std::size_t z = 0; z < k; ++z)
      for (std::size_t x = 0; x < k; ++x)
        if (leq[x][z])
          for (std::size_t y = 0; y < k; ++y)
            if (leq[z][y]) leq[x][y] = true;
    return FiniteLattice(std::move(leq));
  }

  /// Subsets of n states ordered by inclusion; element index = bitmask.
  static FiniteLattice powerset(std::size_t n) {
    const std::size_t k = std::size_t{1} << n;
    std::vector<std::vector<bool>> leq(k, std::vector<bool>(k));
    for (std::size_t x = 0; x < k; ++x)
      for (std::size_t y = 0; y < k; ++y) leq[x][y] = (x & ~y) == 0;
    return FiniteLattice(std::move(leq));
  }

  std::size_t size() const { return leq_.size(); }
  bool leq(std::size_t x, std::size_t y) const { return leq_[x][y]; }
  std::size_t join(std::size_t x, std::size_t y) const { return join_[x][y]; }
  std::size_t meet(std::size_t x, std::size_t y) const { return meet_[x][y]; }
  std::size_t bottom() const { return bottom_; }
  std::size_t top() const { return top_; }

 private:
  std::optional<std::size_t> extremum(std::size_t x, std::size_t y, bool upper) const {
    const std::size_t k = leq_.size();
    auto bound = [&](std::size_t z) { return upper ? leq_[x][z] && leq_[y][z] : leq_[z][x] && leq_[z][y]; };
    for (std::size_t z = 0; z < k; ++z) {
      if (!bound(z)) continue;
      bool best = true;
      for (std::size_t w = 0; w < k && best; ++w)
        if (bound(w) && !(upper ? leq_[z][w] : leq_[w][z])) best = false;
      if (best) return z;
    }
    return std::nullopt;
  }

  std::vector<std::vector<bool>> leq_;
  std::vector<std::vector<std::size_t>> join_, meet_;
  std::size_t bottom_ = 0, top_ = 0;
};

/// Abstraction of the concrete powerset into a finite lattice. alpha is
/// given on singletons and extended to sets by joins, unless an explicit
/// per-subset table overrides it. gamma is always derived.
struct GaloisSpec {
  std::size_t concrete_n = 0;
  FiniteLattice abs;
  std::vector<std::size_t> alpha_singleton;
  std::optional<std::vector<std::size_t>> alpha_table;  // indexed by StateSet

  std::size_t alpha(StateSet s) const {
    if (alpha_table) return (*alpha_table)[s];
    std::size_t acc = abs.bottom();
    for (auto c : members(s)) acc = abs.join(acc, alpha_singleton[c]);
    return acc;
  }

  /// Union of the concrete states whose singleton abstraction lies below m.
  StateSet gamma(std::size_t m) const {
    StateSet out = 0;
    for (std::size_t c = 0; c < concrete_n; ++c)
      if (abs.leq(alpha(StateSet{1} << c), m)) out |= StateSet{1} << c;
    return out;
  }

  /// Throws InvalidStructure if alpha is not total or points outside the lattice.
  void validate() const {
    if (alpha_singleton.size() != concrete_n) throw InvalidStructure("alpha must be given for every concrete state");
    for (auto m : alpha_singleton)
      if (m >= abs.size()) throw InvalidStructure("alpha maps outside the abstract lattice");
    if (alpha_table) {
      if (alpha_table->size() != (std::size_t{1} << concrete_n)) throw InvalidStructure("alpha table has wrong size");
      for (auto m : *alpha_table)
        if (m >= abs.size()) throw InvalidStructure("alpha table maps outside the abstract lattice");
    }
  }

  /// alpha with every subset filled in from the join extension.
  std::vector<std::size_t> join_extended_table() const {
    std::vector<std::size_t> t(std::size_t{1} << concrete_n);
    GaloisSpec plain{concrete_n, abs, alpha_singleton, std::nullopt};
    for (StateSet s = 0; s < t.size(); ++s) t[s] = plain.alpha(s);
    return t;
  }
};

inline void check_powerset_cap(std::size_t n, std::size_t cap) {
  if (n > cap || n > 62) throw CarrierTooLarge(n, cap);
}

struct GaloisViolation {
  enum class Kind { AlphaNotMonotone, GammaNotMonotone, GammaAlphaNotExtensive, AlphaGammaNotReductive };
  Kind kind;
  StateSet set = 0, larger_set = 0;   // AlphaNotMonotone: set < larger_set; GammaAlphaNotExtensive: set
  std::size_t elem = 0, larger_elem = 0;  // GammaNotMonotone: elem <= larger_elem; AlphaGammaNotReductive: elem
  std::string message;
};

struct GaloisCheck {
  bool holds = true;
  std::optional<GaloisViolation> violation;
  explicit operator bool() const { return holds; }
};

/// Verifies monotonicity of alpha and gamma and both composite
/// inequalities over the whole concrete powerset.
inline GaloisCheck check_galois(const GaloisSpec& g, std::size_t cap = kDefaultPowersetCap) {
  using K = GaloisViolation::Kind;
  check_powerset_cap(g.concrete_n, cap);
  const StateSet count = StateSet{1} << g.concrete_n;
  std::vector<std::size_t> alpha(count);
  for (StateSet s = 0; s < count; ++s) alpha[s] = g.alpha(s);

  // Monotone along each covering pair S < S + {c} suffices by transitivity.
  for (StateSet s = 0; s < count; ++s)
    for (std::size_t c = 0; c < g.concrete_n; ++c) {
      const StateSet bigger = s | (StateSet{1} << c);
      if (bigger != s && !g.abs.leq(alpha[s], alpha[bigger]))
        return {false, GaloisViolation{K::AlphaNotMonotone, s, bigger, alpha[s], alpha[bigger],
                                       "alpha is not monotone between a set and its one-state extension"}};
    }

  const std::size_t k = g.abs.size();
  std::vector<StateSet> gamma(k);
  for (std::size_t m = 0; m < k; ++m) gamma[m] = g.gamma(m);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y)
      if (g.abs.leq(x, y) && (gamma[x] & ~gamma[y]) != 0)
        return {false, GaloisViolation{K::GammaNotMonotone, gamma[x], gamma[y], x, y, "gamma is not monotone"}};

  for (StateSet s = 0; s < count; ++s)
    if ((s & ~gamma[alpha[s]]) != 0)
      return {false, GaloisViolation{K::GammaAlphaNotExtensive, s, gamma[alpha[s]], alpha[s], 0,
                                     "gamma(alpha(S)) does not contain S"}};

  for (std::size_t m = 0; m < k; ++m)
    if (!g.abs.leq(alpha[gamma[m]], m))
      return {false, GaloisViolation{K::AlphaGammaNotReductive, gamma[m], 0, m, alpha[gamma[m]],
                                     "alpha(gamma(m)) is not below m"}};
  return {};
}

/// All pairs (S, a) with alpha(S) <= a, ordered by S then a. With a filter,
/// only pairs for that abstract element are listed.
inline std::vector<std::pair<StateSet, std::size_t>> induced_relation(const GaloisSpec& g,
                                                                      std::optional<std::size_t> only = std::nullopt,
                                                                      std::size_t cap = kDefaultPowersetCap) {
  check_powerset_cap(g.concrete_n, cap);
  std::vector<std::pair<StateSet, std::size_t>> out;
  const StateSet count = StateSet{1} << g.concrete_n;
  for (StateSet s = 0; s < count; ++s) {
    const std::size_t a = g.alpha(s);
    for (std::size_t m = 0; m < g.abs.size(); ++m)
      if ((!only || *only == m) && g.abs.leq(a, m)) out.emplace_back(s, m);
  }
  return out;
}

struct BasisViolation {
  StateSet set = 0;
  std::size_t elem = 0;  // abstract lattice element related to set
  StateSet post = 0;
};

struct BasisCheck {
  bool holds = true;
  std::optional<BasisViolation> counterexample;
  explicit operator bool() const { return holds; }
};

/// Checks that the induced relation S R a <=> alpha(S) <= a simulates the
/// strongest-post lift of `conc` (S -> post(S) whenever post(S) is non-empty)
/// by `abs`. `state_of[m]` names the state of `abs` standing for lattice
/// element m; identity by default.
inline BasisCheck check_abstraction_basis(const KripkeStructure& conc, const KripkeStructure& abs,
                                          const GaloisSpec& g, std::vector<std::size_t> state_of = {},
                                          std::size_t cap = kDefaultPowersetCap) {
  check_powerset_cap(g.concrete_n, cap);
  if (conc.n() != g.concrete_n) throw DimensionMismatch("concrete structure and Galois spec disagree on state count");
  const std::size_t k = g.abs.size();
  if (state_of.empty()) {
    if (abs.n() != k) throw DimensionMismatch("abstract structure must have one state per lattice element");
    state_of.resize(k);
    for (std::size_t m = 0; m < k; ++m) state_of[m] = m;
  }
  if (state_of.size() != k) throw DimensionMismatch("element-to-state map must cover the lattice");
  std::vector<std::size_t> elem_of(abs.n(), k);
  for (std::size_t m = 0; m < k; ++m) {
    if (state_of[m] >= abs.n()) throw DimensionMismatch("element-to-state map points outside the abstract structure");
    elem_of[state_of[m]] = m;
  }

  const StateSet count = StateSet{1} << g.concrete_n;
  for (StateSet s = 0; s < count; ++s) {
    const StateSet next = conc.post(s);
    if (next == 0) continue;
    const std::size_t a = g.alpha(s);
    const std::size_t target = g.alpha(next);
    for (std::size_t m = 0; m < k; ++m) {
      if (!g.abs.leq(a, m)) continue;
      bool matched = false;
      for (auto t : abs.succ(state_of[m])) {
        const std::size_t e = elem_of[t];
        if (e < k && g.abs.leq(target, e)) {
          matched = true;
          break;
        }
      }
      if (!matched) return {false, BasisViolation{s, m, next}};
    }
  }
  return {};
}

}  // namespace probisim
