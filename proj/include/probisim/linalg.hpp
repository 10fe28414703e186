#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probisim/pts.hpp"

namespace probisim {

/// n x m 0/1 matrix with K(i, j) = 1 iff state i is in class j.
inline Matrix classification_matrix(const Classification& c) {
  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(c.n()), static_cast<Eigen::Index>(c.m()));
  for (std::size_t s = 0; s < c.n(); ++s) k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c[s])) = 1.0;
  return k;
}

/// Reads the classification back out of a classification matrix; throws
/// NotClassificationMatrix if k is not 0/1 with one 1 per row and no zero column.
inline Classification classification_of(const Matrix& k) {
  std::vector<std::size_t> assign(static_cast<std::size_t>(k.rows()));
  std::vector<bool> hit(static_cast<std::size_t>(k.cols()), false);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    Eigen::Index ones = 0;
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      const double v = k(i, j);
      if (v == 1.0) {
        ++ones;
        assign[static_cast<std::size_t>(i)] = static_cast<std::size_t>(j);
        hit[static_cast<std::size_t>(j)] = true;
      } else if (v != 0.0) {
        throw NotClassificationMatrix("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0 or 1");
      }
    }
    if (ones != 1) throw NotClassificationMatrix("row " + std::to_string(i) + " does not contain exactly one 1");
  }
  for (std::size_t j = 0; j < hit.size(); ++j)
    if (!hit[j]) throw NotClassificationMatrix("column " + std::to_string(j) + " is empty");
  return Classification(std::move(assign), static_cast<std::size_t>(k.cols()));
}

/// Moore-Penrose pseudo-inverse of a classification matrix: the transpose
/// with each row divided by its block size.
inline Matrix pseudo_inverse(const Matrix& k) {
  classification_of(k);
  Matrix p = k.transpose();
  for (Eigen::Index j = 0; j < p.rows(); ++j) p.row(j) /= p.row(j).sum();
  return p;
}

/// The four Penrose identities, entrywise within tol.
inline bool penrose_check(const Matrix& k, const Matrix& p, double tol) {
  if (p.rows() != k.cols() || p.cols() != k.rows())
    throw DimensionMismatch("pseudo-inverse candidate must be " + std::to_string(k.cols()) + "x" +
                            std::to_string(k.rows()));
  auto close = [tol](const Matrix& a, const Matrix& b) { return ((a - b).cwiseAbs().array() <= tol).all(); };
  const Matrix kp = k * p;
  const Matrix pk = p * k;
  return close(kp * k, k) && close(pk * p, p) && close(kp.transpose(), kp) && close(pk.transpose(), pk);
}

/// K^+ M K computed literally.
inline Matrix lump(const Matrix& m, const Matrix& k) {
  if (m.rows() != m.cols() || m.rows() != k.rows())
    throw DimensionMismatch("lump needs square M matching K's row count");
  return pseudo_inverse(k) * m * k;
}

/// Same value as lump(m, classification_matrix(c)) by direct aggregation:
/// entry (i, j) is the mean over block i of each member's mass into block j.
/// Additions happen in (source, target) state order, so the result does not
/// depend on how classes are labelled.
inline Matrix lump(const Matrix& m, const Classification& c) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != c.n())
    throw DimensionMismatch("lump needs square M matching the classification size");
  const auto mc = static_cast<Eigen::Index>(c.m());
  Matrix out = Matrix::Zero(mc, mc);
  std::vector<double> size(c.m(), 0.0);
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    const auto i = static_cast<Eigen::Index>(c[static_cast<std::size_t>(s)]);
    size[static_cast<std::size_t>(i)] += 1.0;
    for (Eigen::Index t = 0; t < m.cols(); ++t) {
      const double v = m(s, t);
      if (v != 0.0) out(i, static_cast<Eigen::Index>(c[static_cast<std::size_t>(t)])) += v;
    }
  }
  for (Eigen::Index i = 0; i < mc; ++i) out.row(i) /= size[static_cast<std::size_t>(i)];
  return out;
}

/// First place a classification fails to be lumpable.
struct LumpViolation {
  std::string action;
  std::size_t block = 0;
  std::size_t state = 0;                    // block representative (smallest member)
  std::size_t other = 0;                    // member that disagrees with it
  std::optional<std::size_t> target_block;  // empty: enabledness differs
};

struct LumpabilityResult {
  bool lumpable = true;
  std::optional<LumpViolation> violation;
  explicit operator bool() const { return lumpable; }
};

/// Mass of state s into each class of c under matrix m.
inline std::vector<double> block_masses(const Matrix& m, const Classification& c, std::size_t s) {
  std::vector<double> out(c.m(), 0.0);
  const auto r = static_cast<Eigen::Index>(s);
  for (Eigen::Index t = 0; t < m.cols(); ++t) out[c[static_cast<std::size_t>(t)]] += m(r, t);
  return out;
}

/// Strong lumpability plus equal enabledness inside every block, per action.
inline LumpabilityResult is_lumpable(const LabelledPTS& p, const Classification& c, double tol = kDefaultTolerance) {
  if (c.n() != p.n) throw DimensionMismatch("classification covers " + std::to_string(c.n()) + " states, system has " +
                                            std::to_string(p.n));
  std::vector<std::size_t> rep(c.m(), p.n);
  for (std::size_t s = 0; s < p.n; ++s)
    if (rep[c[s]] == p.n) rep[c[s]] = s;

  for (const auto& [a, m] : p.trans) {
    std::vector<std::vector<double>> rep_mass(c.m());
    std::vector<bool> rep_enabled(c.m());
    for (std::size_t j = 0; j < c.m(); ++j) {
      rep_mass[j] = block_masses(m, c, rep[j]);
      rep_enabled[j] = m.row(static_cast<Eigen::Index>(rep[j])).sum() > tol;
    }
    for (std::size_t s = 0; s < p.n; ++s) {
      const std::size_t j = c[s];
      if (s == rep[j]) continue;
      const bool en = m.row(static_cast<Eigen::Index>(s)).sum() > tol;
      if (en != rep_enabled[j]) return {false, LumpViolation{a, j, rep[j], s, std::nullopt}};
      const auto mass = block_masses(m, c, s);
      for (std::size_t t = 0; t < c.m(); ++t)
        if (std::abs(mass[t] - rep_mass[j][t]) > tol) return {false, LumpViolation{a, j, rep[j], s, t}};
    }
  }
  return {};
}

enum class NormKind { OpInf, EntryMax, Frobenius };

inline std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::OpInf: return "op-inf";
    case NormKind::EntryMax: return "entry-max";
    case NormKind::Frobenius: return "frobenius";
  }
  return "?";
}

inline std::optional<NormKind> parse_norm_kind(std::string_view s) {
  if (s == "op-inf") return NormKind::OpInf;
  if (s == "entry-max") return NormKind::EntryMax;
  if (s == "frobenius") return NormKind::Frobenius;
  return std::nullopt;
}

/// Sums are taken over sorted magnitudes so permuting rows or columns
/// leaves the result bit-identical.
inline double matrix_norm(const Matrix& m, NormKind kind) {
  std::vector<double> buf;
  switch (kind) {
    case NormKind::OpInf: {
      double best = 0.0;
      buf.resize(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) buf[static_cast<std::size_t>(j)] = std::abs(m(i, j));
        std::sort(buf.begin(), buf.end());
        double row = 0.0;
        for (double v : buf) row += v;
        best = std::max(best, row);
      }
      return best;
    }
    case NormKind::EntryMax:
      return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
    case NormKind::Frobenius: {
      buf.reserve(static_cast<std::size_t>(m.size()));
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) buf.push_back(m(i, j) * m(i, j));
      std::sort(buf.begin(), buf.end());
      double sum = 0.0;
      for (double v : buf) sum += v;
      return std::sqrt(sum);
    }
  }
  return 0.0;
}

}  // namespace probisim
