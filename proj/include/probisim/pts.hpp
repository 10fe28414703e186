#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "probisim/error.hpp"

namespace probisim {

/// Dense real matrix. Rows index source states, columns target states.
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTolerance = 1e-9;

/// Finite reactive probabilistic transition system: one sub-stochastic
/// matrix per action label. A row of zeros means the action is disabled
/// in that state; otherwise the row is a full distribution.
struct LabelledPTS {
  std::size_t n = 0;
  std::map<std::string, Matrix> trans;  // ordered by label

  std::vector<std::string> actions() const {
    std::vector<std::string> out;
    out.reserve(trans.size());
    for (const auto& [a, _] : trans) out.push_back(a);
    return out;
  }

  bool has_action(const std::string& a) const { return trans.count(a) != 0; }

  const Matrix& matrix(const std::string& a) const { return trans.at(a); }

  bool enabled(const std::string& a, std::size_t s, double tol = kDefaultTolerance) const {
    auto it = trans.find(a);
    if (it == trans.end()) return false;
    return it->second.row(static_cast<Eigen::Index>(s)).sum() > tol;
  }

  bool operator==(const LabelledPTS& other) const {
    if (n != other.n || trans.size() != other.trans.size()) return false;
    for (const auto& [a, m] : trans) {
      auto it = other.trans.find(a);
      if (it == other.trans.end() || m != it->second) return false;
    }
    return true;
  }
};

/// Throws ValidationError unless every LabelledPTS invariant holds within tol.
inline void validate_pts(const LabelledPTS& p, double tol = kDefaultTolerance) {
  using K = ValidationError::Kind;
  if (p.n == 0) throw ValidationError(K::EmptyStateSet, "system has no states");
  if (p.trans.empty()) throw ValidationError(K::EmptyActionSet, "system has no actions");
  const auto n = static_cast<Eigen::Index>(p.n);
  for (const auto& [a, m] : p.trans) {
    if (m.rows() != n || m.cols() != n)
      throw ValidationError(K::BadShape, "matrix for action '" + a + "' is not " + std::to_string(p.n) + "x" +
                                             std::to_string(p.n));
    for (Eigen::Index s = 0; s < n; ++s) {
      double sum = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double v = m(s, t);
        if (!std::isfinite(v))
          throw ValidationError(K::NonFinite, "non-finite entry under action '" + a + "'",
                                static_cast<std::size_t>(s), a);
        if (v < -tol)
          throw ValidationError(K::NegativeEntry,
                                "negative entry " + std::to_string(v) + " in state " + std::to_string(s) +
                                    " under action '" + a + "'",
                                static_cast<std::size_t>(s), a, v);
        if (v > 1.0 + tol)
          throw ValidationError(K::EntryOutOfRange,
                                "entry " + std::to_string(v) + " exceeds 1 in state " + std::to_string(s) +
                                    " under action '" + a + "'",
                                static_cast<std::size_t>(s), a, v);
        sum += v;
      }
      if (std::abs(sum) > tol && std::abs(sum - 1.0) > tol)
        throw ValidationError(K::RowSumInvalid,
                              "row " + std::to_string(s) + " under action '" + a + "' sums to " +
                                  std::to_string(sum) + " (must be 0 or 1)",
                              static_cast<std::size_t>(s), a, sum);
    }
  }
}

/// Surjective assignment of states 0..n-1 to classes 0..m-1.
class Classification {
 public:
  Classification() = default;

  /// Throws NonSurjective if some class in 0..m-1 is empty, InvalidPartition
  /// if a label is out of range.
  Classification(std::vector<std::size_t> assign, std::size_t m) : assign_(std::move(assign)), m_(m) {
    std::vector<bool> seen(m_, false);
    for (auto c : assign_) {
      if (c >= m_) throw InvalidPartition("class label " + std::to_string(c) + " out of range");
      seen[c] = true;
    }
    for (std::size_t j = 0; j < m_; ++j)
      if (!seen[j]) throw NonSurjective(j);
  }

  /// Class count inferred as max label + 1.
  static Classification from_labels(std::vector<std::size_t> assign) {
    std::size_t m = 0;
    for (auto c : assign) m = std::max(m, c + 1);
    return Classification(std::move(assign), m);
  }

  static Classification identity(std::size_t n) {
    std::vector<std::size_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = i;
    return Classification(std::move(a), n);
  }

  static Classification all_to_one(std::size_t n) { return Classification(std::vector<std::size_t>(n, 0), n ? 1 : 0); }

  std::size_t n() const { return assign_.size(); }
  std::size_t m() const { return m_; }
  std::size_t operator[](std::size_t s) const { return assign_[s]; }
  const std::vector<std::size_t>& assign() const { return assign_; }

  /// Relabel classes in order of first occurrence (restricted growth string).
  Classification canonical() const {
    std::vector<std::size_t> relabel(m_, m_);
    std::size_t next = 0;
    std::vector<std::size_t> out(assign_.size());
    for (std::size_t s = 0; s < assign_.size(); ++s) {
      auto& r = relabel[assign_[s]];
      if (r == m_) r = next++;
      out[s] = r;
    }
    return Classification(std::move(out), m_);
  }

  bool operator==(const Classification&) const = default;
  auto operator<=>(const Classification&) const = default;

 private:
  std::vector<std::size_t> assign_;
  std::size_t m_ = 0;
};

/// Set of disjoint non-empty blocks covering 0..n-1, each block sorted,
/// blocks ordered by smallest member.
class Partition {
 public:
  Partition() = default;

  /// Validates and canonicalises. Throws InvalidPartition.
  Partition(std::vector<std::vector<std::size_t>> blocks, std::size_t n) : n_(n) {
    std::vector<bool> seen(n, false);
    for (auto& b : blocks) {
      if (b.empty()) throw InvalidPartition("empty block");
      std::sort(b.begin(), b.end());
      for (auto s : b) {
        if (s >= n) throw InvalidPartition("state " + std::to_string(s) + " out of range");
        if (seen[s]) throw InvalidPartition("state " + std::to_string(s) + " appears twice");
        seen[s] = true;
      }
    }
    for (std::size_t s = 0; s < n; ++s)
      if (!seen[s]) throw InvalidPartition("state " + std::to_string(s) + " not covered");
    std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    blocks_ = std::move(blocks);
  }

  static Partition discrete(std::size_t n) {
    std::vector<std::vector<std::size_t>> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = {i};
    return Partition(std::move(b), n);
  }

  static Partition single_block(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return Partition({all}, n);
  }

  std::size_t n() const { return n_; }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& operator[](std::size_t j) const { return blocks_[j]; }

  /// True iff every block of *this lies within a block of other.
  bool refines(const Partition& other) const {
    std::vector<std::size_t> owner(n_);
    for (std::size_t j = 0; j < other.size(); ++j)
      for (auto s : other[j]) owner[s] = j;
    for (const auto& b : blocks_)
      for (auto s : b)
        if (owner[s] != owner[b.front()]) return false;
    return true;
  }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::size_t n_ = 0;
};

inline Classification partition_to_classification(const Partition& p) {
  std::vector<std::size_t> assign(p.n());
  for (std::size_t j = 0; j < p.size(); ++j)
    for (auto s : p[j]) assign[s] = j;
  return Classification(std::move(assign), p.size());
}

inline Partition classification_to_partition(const Classification& c) {
  std::vector<std::vector<std::size_t>> blocks(c.m());
  for (std::size_t s = 0; s < c.n(); ++s) blocks[c[s]].push_back(s);
  for (std::size_t j = 0; j < blocks.size(); ++j)
    if (blocks[j].empty()) throw NonSurjective(j);
  return Partition(std::move(blocks), c.n());
}

struct DisjointUnion {
  LabelledPTS pts;
  std::size_t offset = 0;  // index of the second system's state 0
};

/// Block-diagonal union over the union of both action sets.
inline DisjointUnion disjoint_union(const LabelledPTS& p1, const LabelledPTS& p2) {
  DisjointUnion u;
  u.offset = p1.n;
  u.pts.n = p1.n + p2.n;
  const auto n1 = static_cast<Eigen::Index>(p1.n);
  const auto n2 = static_cast<Eigen::Index>(p2.n);
  auto slot = [&](const std::string& a) -> Matrix& {
    auto [it, fresh] = u.pts.trans.try_emplace(a);
    if (fresh) it->second = Matrix::Zero(n1 + n2, n1 + n2);
    return it->second;
  };
  for (const auto& [a, m] : p1.trans) slot(a).topLeftCorner(n1, n1) = m;
  for (const auto& [a, m] : p2.trans) slot(a).bottomRightCorner(n2, n2) = m;
  return u;
}

}  // namespace probisim
