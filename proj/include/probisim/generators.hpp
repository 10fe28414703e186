#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "probisim/pts.hpp"

namespace probisim {

/// Denominator of every generated probability weight.
inline constexpr std::uint32_t kDyadicDenominator = 1u << 10;

namespace detail {

// `parts` positive integers summing to kDyadicDenominator.
inline std::vector<std::uint32_t> positive_split(std::size_t parts, std::mt19937_64& rng) {
  std::vector<std::uint32_t> cuts(kDyadicDenominator - 1);
  std::iota(cuts.begin(), cuts.end(), 1u);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(parts - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::uint32_t> out;
  std::uint32_t prev = 0;
  for (auto c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(kDyadicDenominator - prev);
  return out;
}

// `parts` non-negative integers summing to kDyadicDenominator.
inline std::vector<std::uint32_t> weak_split(std::size_t parts, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, kDyadicDenominator);
  std::vector<std::uint32_t> cuts(parts - 1);
  for (auto& c : cuts) c = pick(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::uint32_t> out;
  std::uint32_t prev = 0;
  for (auto c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(kDyadicDenominator - prev);
  return out;
}

}  // namespace detail

/// Random reactive system. Each (state, action) is enabled with probability
/// `density`; enabled rows spread mass over up to four random targets in
/// multiples of 2^-10, so row sums are exactly 1.
inline LabelledPTS gen_random_pts(std::size_t n, const std::vector<std::string>& actions, double density,
                                  std::uint64_t seed) {
  if (n == 0) throw InvalidRange("need at least one state");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidRange("density must lie in (0, 1]");
  if (actions.empty()) throw InvalidRange("need at least one action");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution enabled(density);
  LabelledPTS p;
  p.n = n;
  const auto ni = static_cast<Eigen::Index>(n);
  for (const auto& a : actions) p.trans.emplace(a, Matrix::Zero(ni, ni));
  std::vector<std::size_t> targets(n);
  for (auto& [a, m] : p.trans) {
    for (std::size_t s = 0; s < n; ++s) {
      if (!enabled(rng)) continue;
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(n, 4))(rng);
      std::iota(targets.begin(), targets.end(), std::size_t{0});
      std::shuffle(targets.begin(), targets.end(), rng);
      const auto w = detail::positive_split(k, rng);
      for (std::size_t i = 0; i < k; ++i)
        m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(targets[i])) = double(w[i]) / kDyadicDenominator;
    }
  }
  return p;
}

struct PlantedSystem {
  LabelledPTS lift;
  Classification truth;  // lifted state -> quotient state
};

/// Splits quotient state j into multiplicities[j] copies (numbered block by
/// block). Each copy sends exactly the quotient's mass into every target
/// block, spread over the block's members with random dyadic weights.
inline PlantedSystem gen_planted(const LabelledPTS& q, const std::vector<std::size_t>& multiplicities,
                                 std::uint64_t seed) {
  if (multiplicities.size() != q.n) throw InvalidRange("need one multiplicity per quotient state");
  std::vector<std::size_t> first(q.n + 1, 0), assign;
  for (std::size_t j = 0; j < q.n; ++j) {
    if (multiplicities[j] == 0) throw InvalidRange("multiplicities must be at least 1");
    first[j + 1] = first[j] + multiplicities[j];
    assign.insert(assign.end(), multiplicities[j], j);
  }
  const std::size_t n = first[q.n];
  std::mt19937_64 rng(seed);
  PlantedSystem out;
  out.lift.n = n;
  const auto ni = static_cast<Eigen::Index>(n);
  for (const auto& [a, qm] : q.trans) {
    Matrix m = Matrix::Zero(ni, ni);
    for (std::size_t s = 0; s < n; ++s) {
      const auto i = static_cast<Eigen::Index>(assign[s]);
      for (std::size_t j = 0; j < q.n; ++j) {
        const double mass = qm(i, static_cast<Eigen::Index>(j));
        if (mass == 0.0) continue;
        const auto w = detail::weak_split(multiplicities[j], rng);
        double placed = 0.0;
        for (std::size_t k = 0; k + 1 < w.size(); ++k) {
          const double v = mass * (double(w[k]) / kDyadicDenominator);
          m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(first[j] + k)) = v;
          placed += v;
        }
        m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(first[j + 1] - 1)) = mass - placed;
      }
    }
    out.lift.trans.emplace(a, std::move(m));
  }
  out.truth = Classification(std::move(assign), q.n);
  return out;
}

/// Moves min(delta, available) mass from one random non-zero entry to
/// another random entry in every enabled row. Disabled rows stay zero.
inline LabelledPTS perturb(const LabelledPTS& p, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw InvalidRange("delta must be non-negative");
  LabelledPTS out = p;
  if (delta == 0.0 || p.n < 2) return out;
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(p.n);
  for (auto& [a, m] : out.trans) {
    for (Eigen::Index s = 0; s < n; ++s) {
      std::vector<Eigen::Index> support;
      for (Eigen::Index t = 0; t < n; ++t)
        if (m(s, t) > 0.0) support.push_back(t);
      if (support.empty()) continue;
      const auto from = support[std::uniform_int_distribution<std::size_t>(0, support.size() - 1)(rng)];
      auto to = static_cast<Eigen::Index>(std::uniform_int_distribution<std::size_t>(0, p.n - 2)(rng));
      if (to >= from) ++to;
      const double moved = std::min(delta, m(s, from));
      m(s, from) -= moved;
      m(s, to) += moved;
    }
  }
  return out;
}

}  // namespace probisim
