#pragma once

// Components of Ext E near 0, the largest-gap function lambda(E,0,h), the right-hand
// porosity estimate p+(E,0), and epsilon-admissible gap chains.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/rational.hpp"
#include "porosity/sequence.hpp"
#include "porosity/set_model.hpp"

namespace porosity {

/// Open interval (left, right) missing E; maximal within the analyzed window.
struct Gap {
  Rational left;
  Rational right;

  Rational length() const { return right - left; }
  /// (right - left) / right, in (0, 1].
  Rational relative_length() const { return (right - left) / right; }
  /// 1 - relative_length = left / right.
  Rational slack() const { return left / right; }

  friend bool operator==(const Gap&, const Gap&) = default;
};

/// Decreasing list of gaps that all pass the admissibility threshold 1 - epsilon.
struct GapChain {
  std::vector<Gap> gaps;
  Rational epsilon{1, 4};
  std::size_t depth = 0;

  std::size_t size() const noexcept { return gaps.size(); }
  bool empty() const noexcept { return gaps.empty(); }

  std::vector<Rational> lefts() const {
    std::vector<Rational> out;
    for (const auto& g : gaps) out.push_back(g.left);
    return out;
  }
  std::vector<Rational> rights() const {
    std::vector<Rational> out;
    for (const auto& g : gaps) out.push_back(g.right);
    return out;
  }

  /// Ordering and threshold invariants.
  bool valid() const {
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (!(gaps[i].left < gaps[i].right)) return false;
      if (gaps[i].relative_length() < Rational(1) - epsilon) return false;
      if (i + 1 < gaps.size() && gaps[i].left < gaps[i + 1].right) return false;
    }
    return true;
  }

  friend bool operator==(const GapChain&, const GapChain&) = default;
};

/// Admissibility threshold used when none is given.
inline Rational default_epsilon() { return Rational(1, 4); }
/// Agreement required between depth and depth/2 estimates.
inline Rational default_tolerance() { return Rational::pow2(-16); }

/// Gaps between consecutive points of a decreasing list.
inline std::vector<Gap> consecutive_gaps(const std::vector<Rational>& points) {
  std::vector<Gap> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) out.push_back({points[i + 1], points[i]});
  return out;
}

/// The depth-1 components (x_{n+1}, x_n) between the first `depth` points.
inline std::vector<Gap> gaps(const PorousSet& set, std::size_t depth) {
  require(depth >= 2, ErrorCode::invalid_argument, "gaps needs depth >= 2");
  auto e = enumerate(set, depth);
  require(e.points.size() == depth, ErrorCode::depth_exceeds_finite_set,
          "set has only " + std::to_string(e.points.size()) + " points, depth " + std::to_string(depth));
  return consecutive_gaps(e.points);
}

struct GapLength {
  Rational value;
  /// The widest gap found (ties go to the largest left endpoint).
  Gap gap;
  /// The unexplored tail (0, x_depth) might hold a longer gap.
  bool partial = false;
};

/// lambda(E,0,h) from an already enumerated prefix. `complete` means the prefix is
/// the whole (finite) set.
inline GapLength largest_gap_in(const std::vector<Rational>& points, bool complete, const Rational& h) {
  require(h.sign() > 0, ErrorCode::invalid_argument, "h must be positive");
  require(complete || (!points.empty() && points.back() < h), ErrorCode::window_not_covered,
          "h = " + h.str() + " lies below the enumerated window");
  GapLength best{Rational(0), Gap{Rational(0), Rational(0)}, false};
  bool have = false;
  auto consider = [&](const Rational& a, const Rational& b) {
    Rational len = b - a;
    if (!have || best.value < len) {
      best.value = len;
      best.gap = {a, b};
      have = true;
    }
  };
  auto first_below = std::upper_bound(points.begin(), points.end(), h, std::greater<>());
  // Scanning from the top means a later equal-length gap never replaces an earlier one.
  Rational upper = h;
  for (auto it = first_below; it != points.end(); ++it) {
    consider(*it, upper);
    upper = *it;
  }
  if (complete) {
    consider(Rational(0), upper);
  } else {
    best.partial = best.value < points.back();
  }
  return best;
}

/// lambda(E,0,h): length of the largest open subinterval of (0,h) missing E, using the
/// first `depth` points. The tail (0, x_depth) is never counted as a gap.
inline GapLength largest_gap_length(const PorousSet& set, const Rational& h, std::size_t depth) {
  require(depth >= 1, ErrorCode::invalid_argument, "depth must be >= 1");
  auto e = enumerate(set, depth);
  return largest_gap_in(e.points, e.complete, h);
}

/// One row of the lambda(h)/h profile at the candidate h = x_n.
struct ProfileRow {
  std::size_t index = 0;  // 1-based n
  Rational h;
  Rational lambda;
  Rational ratio;
  bool deep = false;
  bool partial = false;
};

/// lambda(x_n)/x_n for n = 1 .. depth-1 using the first `depth` points of an infinite set.
inline std::vector<ProfileRow> lambda_profile(const std::vector<Rational>& points) {
  const std::size_t d = points.size();
  require(d >= 2, ErrorCode::invalid_argument, "profile needs at least two points");
  std::vector<ProfileRow> rows(d - 1);
  Rational lam(0);
  const std::size_t deep_from = std::max<std::size_t>(1, d / 2);  // 1-based
  for (std::size_t i = d - 1; i-- > 0;) {
    Rational g = points[i] - points[i + 1];
    if (lam < g) lam = g;
    ProfileRow& r = rows[i];
    r.index = i + 1;
    r.h = points[i];
    r.lambda = lam;
    r.ratio = lam / points[i];
    r.deep = r.index >= deep_from;
    r.partial = lam < points.back();
  }
  return rows;
}

struct PorosityEstimate {
  Rational estimate;
  bool converged = false;
  bool partial = false;
  Rational half_depth_estimate;
  /// Candidate h attaining the estimate.
  Rational argmax_h;
  std::size_t depth = 0;
};

namespace detail {
struct DeepMax {
  Rational value;
  Rational at;
  bool partial = false;
};
inline DeepMax deep_profile_max(const std::vector<Rational>& points) {
  DeepMax m{Rational(0), points.front(), false};
  bool have = false;
  for (const auto& row : lambda_profile(points)) {
    if (!row.deep) continue;
    if (!have || m.value < row.ratio) {
      m.value = row.ratio;
      m.at = row.h;
      have = true;
    }
    m.partial = m.partial || row.partial;
  }
  return m;
}
}  // namespace detail

/// Estimate of p+(E,0) = limsup_{h->0+} lambda(E,0,h)/h: the maximum of lambda/h over the
/// candidates h = x_n in the deep half of the window. Converged when the estimates at
/// `depth` and `depth/2` differ by less than `tol`.
inline PorosityEstimate porosity_plus(const PorousSet& set, std::size_t depth, const Rational& tol = default_tolerance()) {
  require(set.zero_isolated() != Tri::yes, ErrorCode::zero_isolated,
          "0 is an isolated point; porosity at 0 is degenerate");
  require(depth >= 3, ErrorCode::invalid_argument, "porosity_plus needs depth >= 3");
  auto e = enumerate(set, depth);
  require(e.points.size() == depth, ErrorCode::depth_exceeds_finite_set, "set ended before depth");
  std::vector<Rational> half(e.points.begin(), e.points.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(2, depth / 2)));
  auto full = detail::deep_profile_max(e.points);
  auto coarse = detail::deep_profile_max(half);
  PorosityEstimate out;
  out.estimate = full.value;
  out.half_depth_estimate = coarse.value;
  out.argmax_h = full.at;
  out.partial = full.partial;
  out.converged = abs(full.value - coarse.value) < tol;
  out.depth = depth;
  return out;
}

/// Maximal decreasing chains of gaps with relative length >= 1 - epsilon. The admissible
/// gaps of a window are totally ordered, so the single maximal chain is the chain of all of them.
inline std::vector<GapChain> admissible_chains(const PorousSet& set, std::size_t depth, const Rational& epsilon) {
  require(epsilon.sign() > 0 && epsilon < Rational(1), ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  auto all = gaps(set, depth);
  GapChain chain{{}, epsilon, depth};
  const Rational threshold = Rational(1) - epsilon;
  for (auto& g : all)
    if (g.relative_length() >= threshold) chain.gaps.push_back(std::move(g));
  require(!chain.empty(), ErrorCode::no_admissible_gaps,
          "no gap reaches relative length " + threshold.str() + " within depth " + std::to_string(depth));
  return {std::move(chain)};
}

}  // namespace porosity
