#pragma once

// Finite-depth pretangent spaces of a distance set E ⊂ R+ at 0: mutual stability of
// point sequences against a scaling sequence, greedy self-stable families with metric
// identification, and the radius extremes R* and R+ over sampled spaces.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/rational.hpp"
#include "porosity/sequence.hpp"
#include "porosity/set_model.hpp"
#include "porosity/window.hpp"

namespace porosity {

/// Positive null sequence used to rescale distances.
struct ScalingSequence {
  TruncatedSequence values;
  /// An E-valued sequence s with s_n / r_n -> 1, when one is known.
  std::optional<TruncatedSequence> normal_certificate;
  std::string family;
};

enum class Stability { stable, unstable, indeterminate };

constexpr std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct StabilityResult {
  Stability status = Stability::indeterminate;
  std::optional<Rational> limit;
  /// Deep-half max minus min of |x_n - y_n| / r_n.
  Rational oscillation;
};

namespace detail {

inline std::vector<Rational> aligned_values(const TruncatedSequence& s, std::size_t depth) {
  return s.prefix(depth).values;
}

/// Values at the given 0-based indices.
inline TruncatedSequence restrict_to(const TruncatedSequence& s, const std::vector<std::size_t>& idx) {
  TruncatedSequence out;
  out.source = s.source;
  for (auto i : idx) out.values.push_back(s.values.at(i));
  return out;
}

inline Rational range_of(const std::vector<Rational>& v, std::size_t first, std::size_t last) {
  auto m = min_max(v, first, last);
  return m.hi - m.lo;
}

}  // namespace detail

/// Mutual stability of x and y against r: the ratio |x_n - y_n| / r_n on the deep half.
/// A stable limit is the exact ratio when it is constant there, otherwise the simplest
/// rational within tol of the deep-half midpoint (so ratios tending to 0 resolve to 0).
/// Unstable when the oscillation stays >= tol on the last quarter as well.
inline StabilityResult limit_ratio(const TruncatedSequence& x, const TruncatedSequence& y, const ScalingSequence& r,
                                   std::size_t depth, const Rational& tol = default_tolerance()) {
  require(tol.sign() > 0, ErrorCode::invalid_argument, "tol must be positive");
  require(depth >= 4, ErrorCode::invalid_argument, "limit_ratio needs depth >= 4");
  if (!x.rule && !y.rule && !r.values.rule)
    require(x.size() == y.size() && y.size() == r.values.size(), ErrorCode::length_mismatch,
            "sequence lengths " + std::to_string(x.size()) + ", " + std::to_string(y.size()) + ", " +
                std::to_string(r.values.size()));
  auto xv = detail::aligned_values(x, depth);
  auto yv = detail::aligned_values(y, depth);
  auto rv = detail::aligned_values(r.values, depth);
  std::vector<Rational> ratio;
  ratio.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    require(rv[i].sign() > 0, ErrorCode::invalid_argument, "scaling must be positive");
    ratio.push_back(abs(xv[i] - yv[i]) / rv[i]);
  }
  StabilityResult out;
  const std::size_t first = depth / 2;
  auto m = detail::min_max(ratio, first, depth - 1);
  out.oscillation = m.hi - m.lo;
  if (out.oscillation < tol) {
    out.status = Stability::stable;
    if (out.oscillation.is_zero()) {
      out.limit = m.lo;
    } else {
      Rational mid = (m.lo + m.hi) / Rational(2);
      out.limit = simplest_between(max(Rational(0), mid - tol), mid + tol);
    }
  } else if (detail::range_of(ratio, depth - depth / 4, depth - 1) >= tol) {
    out.status = Stability::unstable;
  }
  return out;
}

struct NormalScalingResult {
  Tri normal = Tri::unknown;
  std::optional<TruncatedSequence> witness;
  /// Deep-half max of |s_n / r_n - 1|.
  Rational deviation;
};

/// Looks for s_n in E with s_n / r_n -> 1 by taking the E-point nearest r_n in ratio.
inline NormalScalingResult is_normal_scaling(const PorousSet& set, const ScalingSequence& r, std::size_t depth,
                                             const Rational& tol = default_tolerance()) {
  require(set.zero_isolated() != Tri::yes, ErrorCode::zero_isolated,
          "0 is isolated; the set of normal scaling sequences is empty");
  require(depth >= 4, ErrorCode::invalid_argument, "is_normal_scaling needs depth >= 4");
  auto rv = detail::aligned_values(r.values, depth);
  Rational floor = *std::min_element(rv.begin(), rv.end()) / Rational(2);
  Window w = Window::down_to(set, floor, std::size_t{1} << 14);

  NormalScalingResult out;
  TruncatedSequence s;
  s.source = SequenceSource::set_enumeration;
  std::vector<Rational> dev;
  for (const auto& rn : rv) {
    std::optional<Rational> best;
    Rational best_dev;
    auto consider = [&](const std::optional<Rational>& p) {
      if (!p) return;
      Rational d = abs(*p / rn - Rational(1));
      if (!best || d < best_dev) {
        best = p;
        best_dev = d;
      }
    };
    if (w.contains(rn)) {
      consider(rn);
    } else {
      consider(w.smallest_above(rn));
      if (w.covers(rn)) consider(w.largest_below(rn));
    }
    if (!best || !w.covers(rn)) return out;  // window too shallow to decide
    s.values.push_back(*best);
    dev.push_back(best_dev);
  }
  const std::size_t first = depth / 2;
  out.deviation = detail::min_max(dev, first, depth - 1).hi;
  auto inc = s.last_increase();
  const bool decreasing_deep = !inc || *inc <= first;
  if (out.deviation < tol && decreasing_deep) {
    out.normal = Tri::yes;
  } else {
    // Deviations that are not shrinking between the third and last quarter are not heading to 0.
    auto third = detail::min_max(dev, first, depth - depth / 4 - 1);
    auto last = detail::min_max(dev, depth - depth / 4, depth - 1);
    if (last.lo >= tol && last.lo >= third.lo) out.normal = Tri::no;
  }
  out.witness = std::move(s);
  return out;
}

/// Running minimum (y_{m(n)}) with m(n) the index of min_{i <= n} y_i.
inline TruncatedSequence monotone_envelope(const TruncatedSequence& y) {
  TruncatedSequence out;
  out.source = y.source;
  for (const auto& v : y.values) {
    require(v.sign() > 0, ErrorCode::invalid_argument, "monotone_envelope needs positive values");
    out.values.push_back(out.values.empty() ? v : min(out.values.back(), v));
  }
  return out;
}

/// Finite metric identification of a mutually stable family.
struct PretangentApprox {
  ScalingSequence scaling;
  /// Accepted sequences; members[0] is the constant-0 sequence.
  std::vector<TruncatedSequence> members;
  std::vector<std::size_t> member_class;
  /// Pairwise limits between members (symmetric, zero diagonal).
  std::vector<std::vector<Rational>> member_distances;
  /// Pairwise limits between classes; class 0 is the marked point.
  std::vector<std::vector<Rational>> distances;
  std::size_t marked_index = 0;
  /// 0-based indices of the common subsequence the limits were taken along.
  std::vector<std::size_t> subsequence;
  /// Candidates (input positions) left out, with the reason.
  std::vector<std::pair<std::size_t, std::string>> rejected;
  std::size_t pool_size = 0;
  std::size_t extraction_rounds = 0;
  std::size_t triangle_violations = 0;
  /// Some class lies at distance exactly 1 from the marked point.
  bool has_unit_sphere = false;

  std::size_t class_count() const noexcept { return distances.size(); }
  /// Sorted distances from the marked point, one per class.
  std::vector<Rational> distance_set() const {
    std::vector<Rational> out;
    for (const auto& row : distances) out.push_back(row[marked_index]);
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

inline TruncatedSequence zero_sequence(std::size_t depth) {
  TruncatedSequence z;
  z.values.assign(depth, Rational(0));
  z.rule = [](std::size_t) { return Rational(0); };
  return z;
}

/// Bounded ratio to the scaling: the last quarter does not exceed the third quarter.
inline bool bounded_against(const std::vector<Rational>& x, const std::vector<Rational>& r) {
  const std::size_t d = x.size();
  std::vector<Rational> q;
  for (std::size_t i = 0; i < d; ++i) q.push_back(x[i] / r[i]);
  auto third = min_max(q, d / 2, d - d / 4 - 1);
  auto last = min_max(q, d - d / 4, d - 1);
  return last.hi <= third.hi;
}

inline std::vector<std::size_t> tail_half(const std::vector<std::size_t>& idx) {
  return {idx.begin() + static_cast<std::ptrdiff_t>(idx.size() / 2), idx.end()};
}

inline std::size_t floor_log2(std::size_t n) {
  std::size_t k = 0;
  while (n >>= 1) ++k;
  return k;
}

}  // namespace detail

/// Greedy maximal self-stable family relative to the candidate pool, processed in input
/// order from the constant-0 sequence. Candidates with indeterminate limits trigger
/// extraction of the tail-half index subsequence (at most log2(depth) rounds).
inline PretangentApprox build_self_stable(const ScalingSequence& r, const std::vector<TruncatedSequence>& candidates,
                                          std::size_t depth, const Rational& tol = default_tolerance()) {
  require(depth >= 8, ErrorCode::invalid_argument, "build_self_stable needs depth >= 8");
  PretangentApprox out;
  out.scaling = r;
  out.scaling.values = r.values.prefix(depth);
  out.pool_size = candidates.size();
  out.members.push_back(detail::zero_sequence(depth));
  out.member_distances = {{Rational(0)}};
  for (std::size_t i = 0; i < depth; ++i) out.subsequence.push_back(i);
  const std::size_t budget = detail::floor_log2(depth);

  auto pairwise = [&](const std::vector<TruncatedSequence>& members, const std::vector<std::size_t>& idx,
                      std::vector<std::vector<StabilityResult>>& res) {
    ScalingSequence rs{detail::restrict_to(out.scaling.values, idx), std::nullopt, r.family};
    const std::size_t n = members.size();
    res.assign(n, std::vector<StabilityResult>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        res[a][b] = res[b][a] =
            limit_ratio(detail::restrict_to(members[a], idx), detail::restrict_to(members[b], idx), rs, idx.size(), tol);
  };

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto cand = candidates[c].prefix(depth);
    if (!detail::bounded_against(cand.values, out.scaling.values.values)) {
      out.rejected.emplace_back(c, "ratio to the scaling is unbounded");
      continue;
    }
    auto trial = out.members;
    trial.push_back(cand);
    auto idx = out.subsequence;
    std::size_t rounds = 0;
    std::vector<std::vector<StabilityResult>> res;
    bool accepted = false;
    std::string why;
    while (true) {
      pairwise(trial, idx, res);
      bool any_unstable = false, any_open = false;
      for (std::size_t a = 0; a < trial.size(); ++a)
        for (std::size_t b = a + 1; b < trial.size(); ++b) {
          any_unstable = any_unstable || res[a][b].status == Stability::unstable;
          any_open = any_open || res[a][b].status == Stability::indeterminate;
        }
      if (any_unstable) {
        why = "not mutually stable with the accepted family";
        break;
      }
      if (!any_open) {
        accepted = true;
        break;
      }
      if (out.extraction_rounds + rounds >= budget || idx.size() / 2 < 4)
        fail(ErrorCode::no_stable_subsequence,
             "candidate " + std::to_string(c) + " still indeterminate after " +
                 std::to_string(out.extraction_rounds + rounds) + " extraction rounds at depth " +
                 std::to_string(depth));
      idx = detail::tail_half(idx);
      ++rounds;
    }
    if (!accepted) {
      out.rejected.emplace_back(c, why);
      continue;
    }
    out.members = std::move(trial);
    out.subsequence = std::move(idx);
    out.extraction_rounds += rounds;
    const std::size_t n = out.members.size();
    out.member_distances.assign(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) out.member_distances[a][b] = *res[a][b].limit;
  }

  // Metric identification: each member joins the first earlier class at distance 0.
  std::vector<std::size_t> reps;
  out.member_class.assign(out.members.size(), 0);
  for (std::size_t m = 0; m < out.members.size(); ++m) {
    std::optional<std::size_t> cls;
    for (std::size_t k = 0; k < reps.size() && !cls; ++k)
      if (out.member_distances[m][reps[k]].is_zero()) cls = k;
    if (!cls) {
      cls = reps.size();
      reps.push_back(m);
    }
    out.member_class[m] = *cls;
  }
  const std::size_t k = reps.size();
  out.distances.assign(k, std::vector<Rational>(k, Rational(0)));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out.distances[a][b] = out.member_distances[reps[a]][reps[b]];
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t c = 0; c < k; ++c)
        if (out.distances[a][c] > out.distances[a][b] + out.distances[b][c]) ++out.triangle_violations;
  for (std::size_t a = 1; a < k; ++a) out.has_unit_sphere = out.has_unit_sphere || out.distances[a][0] == Rational(1);
  return out;
}

struct SpaceExtremes {
  Rational rho_star;
  /// Smallest nonzero distance from the marked point; infinite for the one-point space.
  Extended rho_low;
};

inline SpaceExtremes space_extremes(const PretangentApprox& omega) {
  SpaceExtremes out{Rational(0), Extended::infinity()};
  for (std::size_t a = 0; a < omega.class_count(); ++a) {
    if (a == omega.marked_index) continue;
    const Rational& d = omega.distances[a][omega.marked_index];
    out.rho_star = max(out.rho_star, d);
    if (d.sign() > 0 && Extended(d) < out.rho_low) out.rho_low = d;
  }
  return out;
}

struct SampledSpace {
  std::string scaling_family;
  PretangentApprox approx;
  SpaceExtremes extremes;
  /// The scaling built from the pairs attaining C_E.
  bool proof_witness = false;
};

struct RStarSample {
  Rational R_star;
  Extended R_low;
  /// C_E estimate at the same depth, for the identity R* = C_E.
  Extended C_E;
  std::vector<SampledSpace> spaces;
};

namespace detail {

/// Scalings drawn from E: suffixes, strided subsequences and chain endpoints, each paired
/// with the enumeration index of every term.
struct IndexedScaling {
  std::string family;
  std::vector<std::size_t> index;
};

inline std::vector<IndexedScaling> scaling_families(const std::vector<Rational>& points, std::size_t depth,
                                                    const Rational& epsilon, std::size_t trials) {
  std::vector<IndexedScaling> out;
  auto push = [&](std::string family, std::vector<std::size_t> idx) {
    if (idx.size() >= depth) {
      idx.resize(depth);
      out.push_back({std::move(family), std::move(idx)});
    }
  };
  for (std::size_t s = 0; s < trials; ++s) {
    std::vector<std::size_t> idx;
    for (std::size_t i = s; i < points.size(); ++i) idx.push_back(i);
    push(s == 0 ? "enumeration" : "suffix+" + std::to_string(s), std::move(idx));
  }
  for (std::size_t stride = 2; stride <= trials; ++stride)
    for (std::size_t off = 0; off < stride; ++off) {
      std::vector<std::size_t> idx;
      for (std::size_t i = off; i < points.size(); i += stride) idx.push_back(i);
      push("stride" + std::to_string(stride) + "+" + std::to_string(off), std::move(idx));
    }
  std::vector<std::size_t> lefts, rights;
  const Rational threshold = Rational(1) - epsilon;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if ((points[i] - points[i + 1]) / points[i] >= threshold) {
      lefts.push_back(i + 1);
      rights.push_back(i);
    }
  push("chain-lefts", std::move(lefts));
  push("chain-rights", std::move(rights));
  return out;
}

/// 0̃ plus E-point sequences at fixed enumeration offsets from the scaling's terms.
inline std::vector<TruncatedSequence> offset_pool(const std::vector<Rational>& points,
                                                  const std::vector<std::size_t>& index) {
  std::vector<TruncatedSequence> pool;
  pool.push_back(zero_sequence(index.size()));
  for (int off = -2; off <= 2; ++off) {
    TruncatedSequence s;
    s.source = SequenceSource::set_enumeration;
    bool ok = true;
    for (auto i : index) {
      long j = static_cast<long>(i) + off;
      if (j < 0 || static_cast<std::size_t>(j) >= points.size()) {
        ok = false;
        break;
      }
      s.values.push_back(points[static_cast<std::size_t>(j)]);
    }
    if (ok) pool.push_back(std::move(s));
  }
  return pool;
}

inline ScalingSequence scaling_of(const std::vector<Rational>& points, const IndexedScaling& sc) {
  ScalingSequence r;
  r.family = sc.family;
  r.values.source = SequenceSource::set_enumeration;
  for (auto i : sc.index) r.values.values.push_back(points[i]);
  r.normal_certificate = r.values;  // r ⊂ E
  return r;
}

}  // namespace detail

/// Samples pretangent spaces over normal scalings drawn from E and returns the extremes
/// R* = max rho* and R+ = min rho+. The proof-witness scaling r_j = x_{n_j}, taken along
/// the entries where a_n / x_n attains C_E, is always included.
inline RStarSample sample_R_star(const PorousSet& set, std::size_t depth, std::size_t trials = 3,
                                 const Rational& tol = default_tolerance(),
                                 const Rational& epsilon = default_epsilon()) {
  require(set.zero_isolated() != Tri::yes, ErrorCode::zero_isolated, "0 is isolated; no normal scalings exist");
  require(depth >= 8, ErrorCode::invalid_argument, "sample_R_star needs depth >= 8");
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be positive");
  const std::size_t sample_depth = depth;
  const std::size_t total = sample_depth * trials + 2;
  Window w(enumerate(set, total));
  require(w.size() == total, ErrorCode::depth_exceeds_finite_set, "set ended before the sampling window");
  const auto& pts = w.points();

  RStarSample out;
  out.R_star = Rational(0);
  out.R_low = Extended::infinity();
  auto add_space = [&](SampledSpace sp) {
    sp.extremes = space_extremes(sp.approx);
    out.R_star = max(out.R_star, sp.extremes.rho_star);
    if (sp.extremes.rho_low < out.R_low) out.R_low = sp.extremes.rho_low;
    out.spaces.push_back(std::move(sp));
  };

  auto ce = C_E_estimate(set, depth, epsilon, trials);
  out.C_E = ce.value;

  const std::size_t scaling_len = sample_depth;
  for (const auto& sc : detail::scaling_families(pts, scaling_len, epsilon, trials)) {
    auto r = detail::scaling_of(pts, sc);
    auto pool = detail::offset_pool(pts, sc.index);
    add_space({sc.family, build_self_stable(r, pool, scaling_len, tol), {}, false});
  }

  if (ce.value.is_finite()) {
    // Entries of the maximizing tau where the dominating left endpoint attains C_E.
    Window tw = Window::down_to(set, *std::min_element(ce.achieving_tau.values.begin(), ce.achieving_tau.values.end()));
    auto ct = detail::c_tau_in(tw, ce.achieving_tau.values, epsilon, depth);
    ScalingSequence r;
    r.family = "proof-witness";
    r.values.source = SequenceSource::set_enumeration;
    TruncatedSequence t;
    t.source = SequenceSource::chain_endpoints;
    for (std::size_t i = 0; i < ce.achieving_tau.size(); ++i) {
      const auto& a = ct.dominating_lefts[i];
      if (a && *a / ce.achieving_tau[i] == ce.value.value()) {
        r.values.values.push_back(ce.achieving_tau[i]);
        t.values.push_back(*a);
      }
    }
    r.normal_certificate = r.values;
    if (r.values.size() >= 8) {
      std::vector<TruncatedSequence> pool{detail::zero_sequence(r.values.size()), r.values, t};
      add_space({r.family, build_self_stable(r, pool, r.values.size(), tol), {}, true});
    }
  }
  return out;
}

struct FamilyQ {
  Rational Q;
  bool weakly_self_similar = false;
  bool spheres_nonempty = false;
  Rational R_star;
  Extended R_low;
};

/// Q = max rho* / rho+ over a family of pointed spaces given by their distance sets
/// (1/inf read as 0), together with closure of the family under self-rescaling.
inline FamilyQ family_Q(const std::vector<std::vector<Rational>>& spaces) {
  require(!spaces.empty(), ErrorCode::empty_family, "family_Q needs at least one space");
  auto canonical = [](std::vector<Rational> s) {
    s.push_back(Rational(0));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  std::vector<std::vector<Rational>> fam;
  for (const auto& s : spaces) {
    for (const auto& d : s) require(d.sign() >= 0, ErrorCode::invalid_argument, "distances must be nonnegative");
    fam.push_back(canonical(s));
  }
  FamilyQ out{Rational(0), true, true, Rational(0), Extended::infinity()};
  for (const auto& s : fam) {
    const Rational& top = s.back();
    out.R_star = max(out.R_star, top);
    if (s.size() > 1) {
      if (Extended(s[1]) < out.R_low) out.R_low = s[1];
      out.Q = max(out.Q, top / s[1]);
    }
    out.spheres_nonempty = out.spheres_nonempty && std::binary_search(s.begin(), s.end(), Rational(1));
    for (std::size_t i = 1; i < s.size() && out.weakly_self_similar; ++i) {
      std::vector<Rational> scaled;
      for (const auto& d : s) scaled.push_back(d / s[i]);
      out.weakly_self_similar = std::find(fam.begin(), fam.end(), scaled) != fam.end();
    }
  }
  return out;
}

}  // namespace porosity
