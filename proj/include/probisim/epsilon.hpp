#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "probisim/bisim.hpp"
#include "probisim/linalg.hpp"
#include "probisim/pts.hpp"

namespace probisim {

/// Which classification pairs count as witnesses. `Lumpable` restricts both
/// sides to lumpable classifications, so epsilon = 0 exactly for bisimilar
/// systems. `Any` ranges over every classification matrix.
enum class WitnessPolicy { Lumpable, Any };

/// How per-action norms combine into one number.
enum class Aggregation { Max, Sum };

enum class SearchMethod { Exhaustive, LocalSearch };

inline std::string_view to_string(WitnessPolicy p) { return p == WitnessPolicy::Lumpable ? "lumpable" : "any"; }
inline std::string_view to_string(Aggregation a) { return a == Aggregation::Max ? "max" : "sum"; }
inline std::string_view to_string(SearchMethod m) {
  return m == SearchMethod::Exhaustive ? "exhaustive" : "local-search";
}

inline std::optional<WitnessPolicy> parse_witness_policy(std::string_view s) {
  if (s == "lumpable") return WitnessPolicy::Lumpable;
  if (s == "any") return WitnessPolicy::Any;
  return std::nullopt;
}

inline std::optional<Aggregation> parse_aggregation(std::string_view s) {
  if (s == "max") return Aggregation::Max;
  if (s == "sum") return Aggregation::Sum;
  return std::nullopt;
}

struct EpsilonOptions {
  NormKind norm = NormKind::OpInf;
  Aggregation aggregation = Aggregation::Max;
  WitnessPolicy policy = WitnessPolicy::Lumpable;
  double tol = kDefaultTolerance;  // lumpability test under WitnessPolicy::Lumpable
};

struct EpsilonResult {
  double epsilon = std::numeric_limits<double>::infinity();
  std::optional<Classification> k1, k2;  // empty when no admissible pair exists
  EpsilonOptions options;
  SearchMethod method = SearchMethod::Exhaustive;
  bool optimal = false;
  std::uint64_t evaluated = 0;

  bool found() const { return k1.has_value(); }
};

// ---------------------------------------------------------------------------
// Canonical enumeration of classifications

/// Stirling number of the second kind, as a double (saturates to inf).
inline double stirling2(std::size_t n, std::size_t m) {
  std::vector<double> row(m + 1, 0.0);
  row[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, m); j >= 1; --j) row[j] = static_cast<double>(j) * row[j] + row[j - 1];
    row[0] = 0.0;
  }
  return row[m];
}

/// Surjective assignments of n states onto m classes in restricted-growth
/// form (labels numbered by first occurrence), in lexicographic order.
class RestrictedGrowthStrings {
 public:
  RestrictedGrowthStrings(std::size_t n, std::size_t m) : n_(n), m_(m), a_(n, 0) {
    if (m < 1 || m > n) throw InvalidRange("need 1 <= m <= n, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
    fill_tail(0, 0);
  }

  const std::vector<std::size_t>& current() const { return a_; }
  Classification classification() const { return Classification(a_, m_); }

  /// Advances to the next string; false once the sequence is exhausted.
  bool next() {
    // prefix_max[i] = max(a[0..i-1])
    std::vector<std::size_t> prefix_max(n_ + 1, 0);
    for (std::size_t i = 2; i <= n_; ++i) prefix_max[i] = std::max(prefix_max[i - 1], a_[i - 1]);
    for (std::size_t i = n_; i-- > 1;) {
      const std::size_t cap = std::min(prefix_max[i] + 1, m_ - 1);
      if (a_[i] >= cap) continue;
      const std::size_t v = a_[i] + 1;
      const std::size_t top = std::max(prefix_max[i], v);
      if (n_ - 1 - i < m_ - 1 - top) continue;
      a_[i] = v;
      fill_tail(i + 1, top);
      return true;
    }
    return false;
  }

 private:
  // Smallest completion of positions from..n-1 given the max label so far.
  void fill_tail(std::size_t from, std::size_t top) {
    if (from == 0) {
      a_[0] = 0;
      from = 1;
      top = 0;
    }
    const std::size_t missing = m_ - 1 - top;
    const std::size_t len = n_ - from;
    for (std::size_t k = 0; k < len; ++k) a_[from + k] = k + missing < len ? 0 : top + 1 + (k - (len - missing));
  }

  std::size_t n_, m_;
  std::vector<std::size_t> a_;
};

template <class F>
void for_each_classification(std::size_t n, std::size_t m, F&& f) {
  RestrictedGrowthStrings g(n, m);
  do {
    f(g.classification());
  } while (g.next());
}

inline std::vector<Classification> enumerate_classifications(std::size_t n, std::size_t m) {
  std::vector<Classification> out;
  for_each_classification(n, m, [&](Classification c) { out.push_back(std::move(c)); });
  return out;
}

// ---------------------------------------------------------------------------
// Distance for one classification pair

namespace detail {

inline std::vector<std::string> union_actions(const LabelledPTS& p1, const LabelledPTS& p2) {
  auto a = p1.actions();
  for (const auto& b : p2.actions())
    if (!p1.has_action(b)) a.push_back(b);
  std::sort(a.begin(), a.end());
  return a;
}

// Lumped matrix per action of `actions`; absent actions lump to zero.
inline std::vector<Matrix> lumped_family(const LabelledPTS& p, const Classification& c,
                                         const std::vector<std::string>& actions) {
  std::vector<Matrix> out;
  out.reserve(actions.size());
  const auto m = static_cast<Eigen::Index>(c.m());
  for (const auto& a : actions) out.push_back(p.has_action(a) ? lump(p.matrix(a), c) : Matrix::Zero(m, m));
  return out;
}

inline double combine(double acc, double v, Aggregation agg) { return agg == Aggregation::Max ? std::max(acc, v) : acc + v; }

// Distance between family f1 and f2 relabelled so that class i of the
// result is class inv[i] of f2. Stops early once the partial value exceeds
// `cutoff` (the returned value is then only a lower bound above cutoff).
inline double family_distance(const std::vector<Matrix>& f1, const std::vector<Matrix>& f2,
                              const std::vector<std::size_t>& inv, const EpsilonOptions& o, Matrix& diff,
                              double cutoff = std::numeric_limits<double>::infinity()) {
  double acc = 0.0;
  const auto m = static_cast<Eigen::Index>(inv.size());
  diff.resize(m, m);
  for (std::size_t a = 0; a < f1.size(); ++a) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        diff(i, j) = f1[a](i, j) - f2[a](static_cast<Eigen::Index>(inv[static_cast<std::size_t>(i)]),
                                         static_cast<Eigen::Index>(inv[static_cast<std::size_t>(j)]));
    acc = combine(acc, matrix_norm(diff, o.norm), o.aggregation);
    if (acc > cutoff) return acc;
  }
  return acc;
}

inline bool admissible(const LabelledPTS& p, const Classification& c, const EpsilonOptions& o) {
  return o.policy == WitnessPolicy::Any || is_lumpable(p, c, o.tol).lumpable;
}

inline void check_sizes(const LabelledPTS& p1, const LabelledPTS& p2, const Classification& k1,
                        const Classification& k2) {
  if (k1.n() != p1.n || k2.n() != p2.n) throw DimensionMismatch("classification does not match its system's size");
  if (k1.m() != k2.m()) throw ClassCountMismatch(k1.m(), k2.m());
}

// Total order used to pick one witness among equal-epsilon candidates.
struct Candidate {
  double eps = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> a1, a2;
  std::size_t m = 0;
  bool valid = false;

  bool better_than(const Candidate& o) const {
    if (!valid) return false;
    if (!o.valid) return true;
    if (eps != o.eps) return eps < o.eps;
    if (m != o.m) return m < o.m;
    if (a1 != o.a1) return a1 < o.a1;
    return a2 < o.a2;
  }
};

}  // namespace detail

/// Aggregated norm of K1^+ M1 K1 - K2^+ M2 K2 over the union of action labels.
inline double epsilon_distance(const LabelledPTS& p1, const LabelledPTS& p2, const Classification& k1,
                               const Classification& k2, const EpsilonOptions& opts = {}) {
  detail::check_sizes(p1, p2, k1, k2);
  const auto actions = detail::union_actions(p1, p2);
  const auto f1 = detail::lumped_family(p1, k1, actions);
  const auto f2 = detail::lumped_family(p2, k2, actions);
  std::vector<std::size_t> id(k1.m());
  std::iota(id.begin(), id.end(), std::size_t{0});
  Matrix diff;
  return detail::family_distance(f1, f2, id, opts, diff);
}

inline double epsilon_distance(const LabelledPTS& p1, const LabelledPTS& p2, const Classification& k1,
                               const Classification& k2, NormKind norm) {
  EpsilonOptions o;
  o.norm = norm;
  return epsilon_distance(p1, p2, k1, k2, o);
}

/// Number of (k1, k2) pairs the exhaustive search visits before any filtering.
inline double exhaustive_pair_count(std::size_t n1, std::size_t n2) {
  double total = 0.0;
  double fact = 1.0;
  for (std::size_t m = 1; m <= std::min(n1, n2); ++m) {
    fact *= static_cast<double>(m);
    total += stirling2(n1, m) * stirling2(n2, m) * fact;
  }
  return total;
}

struct ExactOptions {
  EpsilonOptions base;
  double max_pairs = 1e7;
  unsigned jobs = 1;
};

/// Minimum over every admissible classification pair with equal class
/// count, including every relabelling of the second side. Ties go to the
/// smallest class count, then the lexicographically smallest assignments.
/// The result is the same for any `jobs`.
inline EpsilonResult epsilon_bisim_exact(const LabelledPTS& p1, const LabelledPTS& p2, const ExactOptions& opts = {}) {
  const double count = exhaustive_pair_count(p1.n, p2.n);
  if (count > opts.max_pairs) throw BudgetExceeded(count);
  const auto& o = opts.base;
  const auto actions = detail::union_actions(p1, p2);

  struct Side {
    Classification k;
    std::vector<Matrix> fam;
  };
  auto collect = [&](const LabelledPTS& p, std::size_t m) {
    std::vector<Side> out;
    for_each_classification(p.n, m, [&](Classification c) {
      if (detail::admissible(p, c, o)) {
        auto fam = detail::lumped_family(p, c, actions);
        out.push_back({std::move(c), std::move(fam)});
      }
    });
    return out;
  };

  detail::Candidate best;
  std::uint64_t evaluated = 0;
  const unsigned jobs = std::max(1u, opts.jobs);

  for (std::size_t m = 1; m <= std::min(p1.n, p2.n); ++m) {
    const auto l1 = collect(p1, m);
    const auto l2 = collect(p2, m);
    if (l1.empty() || l2.empty()) continue;

    auto work = [&](unsigned slot, detail::Candidate& local, std::uint64_t& visits) {
      Matrix diff;
      std::vector<std::size_t> inv(m);
      for (std::size_t i = slot; i < l1.size(); i += jobs) {
        for (const auto& s2 : l2) {
          std::iota(inv.begin(), inv.end(), std::size_t{0});
          do {
            ++visits;
            const double cutoff = local.valid ? local.eps : std::numeric_limits<double>::infinity();
            const double d = detail::family_distance(l1[i].fam, s2.fam, inv, o, diff, cutoff);
            if (local.valid && d > local.eps) continue;
            detail::Candidate c;
            c.valid = true;
            c.eps = d;
            c.m = m;
            c.a1 = l1[i].k.assign();
            // side-2 state with canonical class q ends up in class sigma(q), sigma = inv^-1
            std::vector<std::size_t> sigma(m);
            for (std::size_t r = 0; r < m; ++r) sigma[inv[r]] = r;
            c.a2.resize(p2.n);
            for (std::size_t s = 0; s < p2.n; ++s) c.a2[s] = sigma[s2.k[s]];
            if (c.better_than(local)) local = std::move(c);
          } while (std::next_permutation(inv.begin(), inv.end()));
        }
      }
    };

    std::vector<detail::Candidate> locals(jobs, best);
    std::vector<std::uint64_t> visits(jobs, 0);
    if (jobs == 1) {
      work(0, locals[0], visits[0]);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, std::ref(locals[t]), std::ref(visits[t]));
      for (auto& th : pool) th.join();
    }
    for (unsigned t = 0; t < jobs; ++t) {
      if (locals[t].better_than(best)) best = locals[t];
      evaluated += visits[t];
    }
  }

  EpsilonResult r;
  r.options = o;
  r.method = SearchMethod::Exhaustive;
  r.optimal = true;
  r.evaluated = evaluated;
  if (best.valid) {
    r.epsilon = best.eps;
    r.k1 = Classification(best.a1, best.m);
    r.k2 = Classification(best.a2, best.m);
  }
  return r;
}

inline EpsilonResult epsilon_bisim_exact(const LabelledPTS& p1, const LabelledPTS& p2, NormKind norm) {
  ExactOptions o;
  o.base.norm = norm;
  return epsilon_bisim_exact(p1, p2, o);
}

// ---------------------------------------------------------------------------
// Local search

struct SearchOptions {
  EpsilonOptions base;
  std::uint64_t budget = 10000;  // proposals, restarts included
  std::uint64_t seed = 42;
  std::uint64_t patience = 200;  // non-improving proposals before a restart
};

namespace detail {

class PairSearch {
 public:
  PairSearch(const LabelledPTS& p1, const LabelledPTS& p2, const SearchOptions& opts)
      : p1_(p1), p2_(p2), o_(opts.base), opts_(opts), actions_(union_actions(p1, p2)), rng_(opts.seed) {}

  EpsilonResult run() {
    seed_starts();
    std::uint64_t stale = opts_.patience;
    State cur;
    double cur_d = std::numeric_limits<double>::infinity();
    while (used_ < opts_.budget) {
      if (stale >= opts_.patience || !cur.valid()) {
        ++used_;
        stale = 0;
        cur = random_start();
        cur_d = cur.valid() ? consider(cur) : std::numeric_limits<double>::infinity();
        continue;
      }
      ++used_;
      State next = propose(cur);
      if (!next.valid()) {
        ++stale;
        continue;
      }
      const double d = consider(next);
      if (d < cur_d) {
        stale = 0;
      } else {
        ++stale;
      }
      if (d <= cur_d) {
        cur = std::move(next);
        cur_d = d;
      }
    }

    EpsilonResult r;
    r.options = o_;
    r.method = SearchMethod::LocalSearch;
    r.optimal = false;
    r.evaluated = used_;
    if (best_.valid) {
      r.epsilon = best_.eps;
      r.k1 = Classification(best_.a1, best_.m);
      r.k2 = Classification(best_.a2, best_.m);
    }
    return r;
  }

 private:
  struct State {
    std::vector<std::size_t> a1, a2;
    std::size_t m = 0;
    bool valid() const { return m > 0; }
  };

  std::size_t max_m() const { return std::min(p1_.n, p2_.n); }

  double distance(const State& s) {
    const auto f1 = lumped_family(p1_, Classification(s.a1, s.m), actions_);
    const auto f2 = lumped_family(p2_, Classification(s.a2, s.m), actions_);
    std::vector<std::size_t> id(s.m);
    std::iota(id.begin(), id.end(), std::size_t{0});
    return family_distance(f1, f2, id, o_, diff_);
  }

  double consider(const State& s) {
    const double d = distance(s);
    Candidate c;
    c.valid = true;
    c.eps = d;
    c.m = s.m;
    c.a1 = s.a1;
    c.a2 = s.a2;
    if (c.better_than(best_)) best_ = std::move(c);
    return d;
  }

  // Under the lumpable policy, replaces a side by its coarsest lumpable
  // refinement. Returns false if the side was changed.
  bool project(const LabelledPTS& p, std::vector<std::size_t>& a, std::size_t& m) {
    if (o_.policy == WitnessPolicy::Any) return true;
    Classification c(a, m);
    if (is_lumpable(p, c, o_.tol)) return true;
    auto refined = partition_to_classification(refine_to_lumpable(p, classification_to_partition(c), o_.tol));
    a = refined.assign();
    m = refined.m();
    return false;
  }

  // Makes both sides lumpable (if required) with equal class counts, and
  // relabels side 2 for the best match when projection scrambled labels.
  State normalise(State s) {
    std::size_t m1 = s.m, m2 = s.m;
    const bool kept1 = project(p1_, s.a1, m1);
    const bool kept2 = project(p2_, s.a2, m2);
    if (m1 != m2) return {};
    s.m = m1;
    if (!(kept1 && kept2)) align(s);
    return s;
  }

  void align(State& s) {
    const auto f1 = lumped_family(p1_, Classification(s.a1, s.m), actions_);
    const auto f2 = lumped_family(p2_, Classification(s.a2, s.m), actions_);
    std::vector<std::size_t> inv(s.m), best_inv;
    std::iota(inv.begin(), inv.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    if (s.m <= 6) {
      do {
        const double d = family_distance(f1, f2, inv, o_, diff_, best);
        if (d < best) {
          best = d;
          best_inv = inv;
        }
      } while (std::next_permutation(inv.begin(), inv.end()));
    } else {
      best = family_distance(f1, f2, inv, o_, diff_);
      for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t i = 0; i < s.m; ++i)
          for (std::size_t j = i + 1; j < s.m; ++j) {
            std::swap(inv[i], inv[j]);
            const double d = family_distance(f1, f2, inv, o_, diff_, best);
            if (d < best) {
              best = d;
              improved = true;
            } else {
              std::swap(inv[i], inv[j]);
            }
          }
      }
      best_inv = inv;
    }
    std::vector<std::size_t> sigma(s.m);
    for (std::size_t r = 0; r < s.m; ++r) sigma[best_inv[r]] = r;
    for (auto& c : s.a2) c = sigma[c];
  }

  void seed_starts() {
    auto offer = [&](const Classification& c1, const Classification& c2) {
      if (c1.m() != c2.m()) return;
      State s{c1.assign(), c2.assign(), c1.m()};
      s = normalise(std::move(s));
      if (!s.valid()) return;
      align(s);
      consider(s);
    };
    offer(partition_to_classification(coarsest_bisimulation(p1_, o_.tol)),
          partition_to_classification(coarsest_bisimulation(p2_, o_.tol)));
    offer(Classification::all_to_one(p1_.n), Classification::all_to_one(p2_.n));
    if (p1_.n == p2_.n) offer(Classification::identity(p1_.n), Classification::identity(p2_.n));
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::vector<std::size_t> random_surjection(std::size_t n, std::size_t m) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    std::vector<std::size_t> a(n);
    for (std::size_t k = 0; k < n; ++k) a[order[k]] = k < m ? k : uniform(0, m - 1);
    return a;
  }

  State random_start() {
    const std::size_t m = uniform(1, max_m());
    State s{random_surjection(p1_.n, m), random_surjection(p2_.n, m), m};
    return normalise(std::move(s));
  }

  static std::size_t count(const std::vector<std::size_t>& a, std::size_t cls) {
    return static_cast<std::size_t>(std::count(a.begin(), a.end(), cls));
  }

  State propose(const State& cur) {
    State s = cur;
    switch (uniform(0, 3)) {
      case 0: {  // move one state to another class
        if (s.m < 2) return {};
        auto& a = uniform(0, 1) == 0 ? s.a1 : s.a2;
        const std::size_t x = uniform(0, a.size() - 1);
        if (count(a, a[x]) < 2) return {};
        std::size_t y = uniform(0, s.m - 2);
        if (y >= a[x]) ++y;
        a[x] = y;
        break;
      }
      case 1: {  // merge two classes on both sides
        if (s.m < 2) return {};
        std::size_t i = uniform(0, s.m - 1), j = uniform(0, s.m - 2);
        if (j >= i) ++j;
        if (i > j) std::swap(i, j);
        for (auto* a : {&s.a1, &s.a2})
          for (auto& c : *a) c = c == j ? i : (c > j ? c - 1 : c);
        --s.m;
        break;
      }
      case 2: {  // split one class on both sides
        if (s.m >= max_m()) return {};
        const std::size_t i = uniform(0, s.m - 1);
        if (count(s.a1, i) < 2 || count(s.a2, i) < 2) return {};
        for (auto* a : {&s.a1, &s.a2}) {
          std::vector<std::size_t> members;
          for (std::size_t x = 0; x < a->size(); ++x)
            if ((*a)[x] == i) members.push_back(x);
          std::shuffle(members.begin(), members.end(), rng_);
          const std::size_t moved = uniform(1, members.size() - 1);
          for (std::size_t k = 0; k < moved; ++k) (*a)[members[k]] = s.m;
        }
        ++s.m;
        break;
      }
      default: {  // swap two labels on side 2
        if (s.m < 2) return {};
        std::size_t i = uniform(0, s.m - 1), j = uniform(0, s.m - 2);
        if (j >= i) ++j;
        for (auto& c : s.a2) c = c == i ? j : (c == j ? i : c);
        break;
      }
    }
    return normalise(std::move(s));
  }

  const LabelledPTS& p1_;
  const LabelledPTS& p2_;
  EpsilonOptions o_;
  SearchOptions opts_;
  std::vector<std::string> actions_;
  std::mt19937_64 rng_;
  std::uint64_t used_ = 0;
  Candidate best_;
  Matrix diff_;
};

}  // namespace detail

/// Seeded hill climbing with restarts over classification pairs. Returns an
/// upper bound on the exhaustive value; deterministic for fixed seed and budget.
inline EpsilonResult epsilon_bisim_search(const LabelledPTS& p1, const LabelledPTS& p2, const SearchOptions& opts = {}) {
  return detail::PairSearch(p1, p2, opts).run();
}

}  // namespace probisim
