#pragma once

// Brute-force reference implementations used to cross-check the fast paths.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/rational.hpp"

namespace porosity::oracle {

/// Largest open subinterval of (0, h) missing the points, by checking every pair of
/// boundary candidates. `complete` adds 0 as a boundary; otherwise the interval below
/// the last point is not explored, matching the windowed semantics.
inline Rational largest_gap(const std::vector<Rational>& points, bool complete, const Rational& h) {
  std::vector<Rational> bounds{h};
  for (const auto& p : points)
    if (p < h) bounds.push_back(p);
  if (complete) bounds.push_back(Rational(0));
  Rational best(0);
  for (std::size_t i = 0; i < bounds.size(); ++i)
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      const Rational& a = bounds[j];
      const Rational& b = bounds[i];
      if (!(a < b)) continue;
      bool empty = true;
      for (const auto& p : points)
        if (a < p && p < b) {
          empty = false;
          break;
        }
      if (empty && best < b - a) best = b - a;
    }
  return best;
}

/// C(tau) by minimizing over every subset of admissible gaps taken as a chain. For each
/// chain, a deep entry tau_n is paired with the smallest chain left endpoint >= tau_n.
inline Extended c_tau(const std::vector<Rational>& points, const std::vector<Rational>& tau, const Rational& epsilon,
                      std::size_t max_gaps = 18) {
  std::vector<Gap> adm;
  for (auto& g : consecutive_gaps(points))
    if (g.relative_length() >= Rational(1) - epsilon) adm.push_back(std::move(g));
  require(adm.size() <= max_gaps, ErrorCode::invalid_argument,
          "oracle limited to " + std::to_string(max_gaps) + " admissible gaps");
  const std::size_t first = deep_half(tau.size()).first;
  Extended best = Extended::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << adm.size()); ++mask) {
    Extended worst(Rational(0));
    for (std::size_t n = first; n < tau.size() && worst.is_finite(); ++n) {
      std::optional<Rational> a;
      for (std::size_t g = 0; g < adm.size(); ++g)
        if ((mask >> g & 1U) && adm[g].left >= tau[n] && (!a || adm[g].left < *a)) a = adm[g].left;
      if (!a) {
        worst = Extended::infinity();
      } else if (worst < Extended(*a / tau[n])) {
        worst = *a / tau[n];
      }
    }
    if (worst < best) best = worst;
  }
  return best;
}

}  // namespace porosity::oracle
