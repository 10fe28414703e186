#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "probisim/linalg.hpp"
#include "probisim/pts.hpp"

namespace probisim {

namespace detail {

// Per state: for each action, an enabled flag followed by the mass into
// every current block.
inline std::vector<std::vector<double>> signatures(const LabelledPTS& p, const Classification& c, double tol) {
  std::vector<std::vector<double>> sig(p.n);
  for (auto& v : sig) v.reserve(p.trans.size() * (c.m() + 1));
  for (const auto& [a, m] : p.trans) {
    for (std::size_t s = 0; s < p.n; ++s) {
      auto mass = block_masses(m, c, s);
      double total = 0.0;
      for (double v : mass) total += v;
      sig[s].push_back(total > tol ? 1.0 : 0.0);
      sig[s].insert(sig[s].end(), mass.begin(), mass.end());
    }
  }
  return sig;
}

inline bool same_signature(const std::vector<double>& x, const std::vector<double>& y, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol) return false;
  return true;
}

}  // namespace detail

/// Coarsest lumpable partition that refines `initial`. Blocks are split by
/// signature until nothing changes. Grouping compares each state with the
/// first member of each candidate group, so with noisy inputs the result can
/// depend on state order (tolerance matching is not transitive).
inline Partition refine_to_lumpable(const LabelledPTS& p, const Partition& initial, double tol = kDefaultTolerance) {
  Partition current = initial;
  for (;;) {
    const auto cls = partition_to_classification(current);
    const auto sig = detail::signatures(p, cls, tol);
    std::vector<std::vector<std::size_t>> next;
    next.reserve(current.size());
    for (const auto& block : current.blocks()) {
      const std::size_t first_group = next.size();
      for (auto s : block) {
        bool placed = false;
        for (std::size_t g = first_group; g < next.size(); ++g) {
          if (detail::same_signature(sig[next[g].front()], sig[s], tol)) {
            next[g].push_back(s);
            placed = true;
            break;
          }
        }
        if (!placed) next.push_back({s});
      }
    }
    if (next.size() == current.size()) return current;
    current = Partition(std::move(next), p.n);
  }
}

/// Coarsest probabilistic bisimulation, as a partition of the states.
inline Partition coarsest_bisimulation(const LabelledPTS& p, double tol = kDefaultTolerance) {
  return refine_to_lumpable(p, Partition::single_block(p.n), tol);
}

/// Lumped system K^+ M K per action. Throws NotLumpable.
inline LabelledPTS quotient(const LabelledPTS& p, const Classification& c, double tol = kDefaultTolerance) {
  if (auto r = is_lumpable(p, c, tol); !r) {
    const auto& v = *r.violation;
    std::string details = "states " + std::to_string(v.state) + " and " + std::to_string(v.other) + " of block " +
                          std::to_string(v.block);
    details += v.target_block ? " send different mass into block " + std::to_string(*v.target_block)
                              : std::string(" differ in enabledness");
    throw NotLumpable(v.action, details);
  }
  LabelledPTS q;
  q.n = c.m();
  for (const auto& [a, m] : p.trans) q.trans.emplace(a, lump(m, c));
  return q;
}

struct BisimWitness {
  std::size_t m = 0;
  Classification k1, k2;
  LabelledPTS quotient;  // common lumped family, over the union of both action sets
};

struct BisimResult {
  bool bisimilar = false;
  Partition union_partition;  // coarsest bisimulation of the disjoint union
  std::size_t offset = 0;     // first state of the second system in the union
  std::optional<BisimWitness> witness;
};

/// Two systems are bisimilar iff every class of the coarsest bisimulation
/// on their disjoint union contains states of both.
inline BisimResult are_bisimilar(const LabelledPTS& p1, const LabelledPTS& p2, double tol = kDefaultTolerance) {
  auto u = disjoint_union(p1, p2);
  BisimResult r;
  r.offset = u.offset;
  r.union_partition = coarsest_bisimulation(u.pts, tol);
  for (const auto& block : r.union_partition.blocks()) {
    const bool left = block.front() < u.offset;
    const bool right = block.back() >= u.offset;
    if (!(left && right)) return r;
  }
  r.bisimilar = true;

  const auto whole = partition_to_classification(r.union_partition);
  std::vector<std::size_t> a1(whole.assign().begin(), whole.assign().begin() + static_cast<std::ptrdiff_t>(u.offset));
  std::vector<std::size_t> a2(whole.assign().begin() + static_cast<std::ptrdiff_t>(u.offset), whole.assign().end());
  BisimWitness w;
  w.m = whole.m();
  w.k1 = Classification(std::move(a1), w.m);
  w.k2 = Classification(std::move(a2), w.m);
  w.quotient = quotient(u.pts, whole, tol);
  r.witness = std::move(w);
  return r;
}

}  // namespace probisim
