#pragma once

// Quantitative porosity at 0: asymptotic equivalence of sequences, the (k, K)
// tau-porosity criterion, C(tau) and C_E, universal chains and M(L), and the
// complete-strong-porosity classifier with certificates.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/rational.hpp"
#include "porosity/sequence.hpp"
#include "porosity/set_model.hpp"
#include "porosity/window.hpp"

namespace porosity {

// ---------------------------------------------------------------------------
// Asymptotic equivalence
// ---------------------------------------------------------------------------

struct AsympResult {
  Tri equivalent = Tri::unknown;
  /// Dyadic constants with c1 * a_n < g_n < c2 * a_n on the whole prefix.
  Rational c1;
  Rational c2;
};

namespace detail {
struct MinMax {
  Rational lo;
  Rational hi;
};
inline MinMax min_max(const std::vector<Rational>& v, std::size_t first, std::size_t last) {
  MinMax m{v[first], v[first]};
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (v[i] < m.lo) m.lo = v[i];
    if (m.hi < v[i]) m.hi = v[i];
  }
  return m;
}
inline Rational dyadic_below(const Rational& x) {
  long e = x.floor_log2();
  Rational p = Rational::pow2(e);
  return p == x ? Rational::pow2(e - 1) : p;
}
inline Rational dyadic_above(const Rational& x) { return Rational::pow2(x.floor_log2() + 1); }
}  // namespace detail

/// Tests a ≍ g: bounded ratio g_n / a_n whose deep-half range does not drift when the
/// window doubles. A factor-4 drift of either bound between [d/4, d/2) and [d/2, d)
/// counts as divergence.
inline AsympResult is_asymp(const TruncatedSequence& a, const TruncatedSequence& g, std::size_t depth) {
  require(a.size() == g.size(), ErrorCode::length_mismatch,
          "lengths " + std::to_string(a.size()) + " and " + std::to_string(g.size()));
  require(depth >= 8, ErrorCode::invalid_argument, "is_asymp needs depth >= 8");
  auto ap = a.prefix(depth);
  auto gp = g.prefix(depth);
  require(ap.strictly_positive() && gp.strictly_positive(), ErrorCode::invalid_argument, "sequences must be positive");
  std::vector<Rational> ratio;
  ratio.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) ratio.push_back(gp[i] / ap[i]);
  auto whole = detail::min_max(ratio, 0, depth - 1);
  auto recent = detail::min_max(ratio, depth / 2, depth - 1);
  auto earlier = detail::min_max(ratio, depth / 4, depth / 2 - 1);
  AsympResult out;
  out.c1 = detail::dyadic_below(whole.lo);
  out.c2 = detail::dyadic_above(whole.hi);
  if (recent.lo * Rational(2) > earlier.lo && recent.hi < earlier.hi * Rational(2)) {
    out.equivalent = Tri::yes;
  } else if (recent.lo * Rational(4) <= earlier.lo || recent.hi >= earlier.hi * Rational(4)) {
    out.equivalent = Tri::no;
  }
  return out;
}

// ---------------------------------------------------------------------------
// (k, K) criterion
// ---------------------------------------------------------------------------

/// A point of E inside (k tau_n, K tau_n).
struct Violation {
  std::size_t n = 0;  // 1-based index into tau
  Rational point;
  Rational k;
  Rational K;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline bool canonical_less(const Violation& a, const Violation& b) {
  return std::tie(a.k, a.K, a.n) < std::tie(b.k, b.K, b.n);
}

struct TauPorosityResult {
  Tri holds_eventually = Tri::unknown;
  /// One past the last violation.
  std::size_t first_good_index = 1;
  std::vector<Violation> violations;
};

namespace detail {

inline void check_membership(const Window& w, const std::vector<Rational>& tau) {
  for (std::size_t i = 0; i < tau.size(); ++i)
    require(w.contains(tau[i]), ErrorCode::tau_not_in_set,
            "tau_" + std::to_string(i + 1) + " = " + tau[i].str() + " is not a point of E");
}

inline TauPorosityResult scan_intervals(const Window& w, const std::vector<Rational>& tau, const Rational& k,
                                        const Rational& K) {
  TauPorosityResult out;
  const std::size_t d = tau.size();
  const std::size_t deep_from = d / 2 + 1;  // 1-based
  std::size_t deep_hits = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (auto p = w.point_in_open(k * tau[i], K * tau[i])) {
      out.violations.push_back({i + 1, *p, k, K});
      out.first_good_index = i + 2;
      if (i + 1 >= deep_from) ++deep_hits;
    }
  }
  out.holds_eventually = deep_hits == 0 ? Tri::yes : (deep_hits >= 2 ? Tri::no : Tri::unknown);
  return out;
}

}  // namespace detail

/// Scans n = 1..depth for points of E in (k tau_n, K tau_n). The criterion holds
/// eventually when the deep half [depth/2+1, depth] is violation-free; two or more
/// deep violations count as recurrence.
inline TauPorosityResult tau_porosity_test(const PorousSet& set, const TruncatedSequence& tau, const Rational& k,
                                           const Rational& K, std::size_t depth, bool tau_external = false) {
  require(k > Rational(1), ErrorCode::invalid_argument, "k must exceed 1");
  require(K > k, ErrorCode::invalid_argument, "K must exceed k");
  require(depth >= 2, ErrorCode::invalid_argument, "depth must be >= 2");
  auto t = tau.prefix(depth);
  require(t.strictly_positive(), ErrorCode::invalid_argument, "tau must be positive");
  Rational floor = *std::min_element(t.values.begin(), t.values.end());
  Window w = Window::down_to(set, floor);
  if (!tau_external) detail::check_membership(w, t.values);
  return detail::scan_intervals(w, t.values, k, K);
}

// ---------------------------------------------------------------------------
// C(tau), C_E
// ---------------------------------------------------------------------------

struct CTauResult {
  Extended value;
  /// Gaps chosen for the deep entries (distinct, decreasing).
  std::optional<GapChain> chain;
  /// 1-based index of tau attaining the value.
  std::size_t argmax = 0;
  /// Per-entry dominating left endpoints a_n for every index (nullopt: none).
  std::vector<std::optional<Rational>> dominating_lefts;
};

namespace detail {

inline std::vector<Gap> admissible_in(const Window& w, const Rational& epsilon) {
  std::vector<Gap> out;
  const Rational threshold = Rational(1) - epsilon;
  for (auto& g : consecutive_gaps(w.points()))
    if (g.relative_length() >= threshold) out.push_back(std::move(g));
  return out;
}

/// Smallest admissible left endpoint >= x; `adm` is decreasing.
inline const Gap* dominating_gap(const std::vector<Gap>& adm, const Rational& x) {
  auto it = std::upper_bound(adm.begin(), adm.end(), x,
                             [](const Rational& v, const Gap& g) { return v > g.left; });  // first left < x
  if (it == adm.begin()) return nullptr;
  return &*(it - 1);
}

inline CTauResult c_tau_in(const Window& w, const std::vector<Rational>& tau, const Rational& epsilon,
                           std::size_t depth_tag) {
  CTauResult out;
  auto adm = admissible_in(w, epsilon);
  const auto deep = deep_half(tau.size());
  GapChain chain{{}, epsilon, depth_tag};
  Rational best(0);
  bool infinite = false;
  out.dominating_lefts.resize(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const Gap* g = dominating_gap(adm, tau[i]);
    if (g) out.dominating_lefts[i] = g->left;
    if (i < deep.first) continue;
    if (!g) {
      infinite = true;
      if (out.argmax == 0) out.argmax = i + 1;
      continue;
    }
    if (chain.gaps.empty() || !(chain.gaps.back() == *g)) chain.gaps.push_back(*g);
    Rational r = g->left / tau[i];
    if (!infinite && (out.argmax == 0 || best < r)) {
      best = r;
      out.argmax = i + 1;
    }
  }
  out.value = infinite ? Extended::infinity() : Extended(best);
  if (!infinite) out.chain = std::move(chain);
  return out;
}

}  // namespace detail

/// C(tau): the least limsup a_n / tau_n over epsilon-admissible chains with tau_n <= a_n.
/// Each deep entry tau_n is paired with the smallest admissible left endpoint a_n >= tau_n;
/// the pointwise choice is itself a decreasing chain, so it attains the infimum.
/// Infinite when some deep entry has no admissible gap above it.
inline CTauResult C_tau(const PorousSet& set, const TruncatedSequence& tau, std::size_t depth, const Rational& epsilon,
                        bool tau_external = false) {
  require(epsilon.sign() > 0 && epsilon < Rational(1), ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  require(depth >= 2, ErrorCode::invalid_argument, "depth must be >= 2");
  auto t = tau.prefix(depth);
  require(t.strictly_positive(), ErrorCode::invalid_argument, "tau must be positive");
  if (auto inc = t.last_increase())
    require(*inc <= deep_half(depth).first, ErrorCode::invalid_argument,
            "tau increases at index " + std::to_string(*inc) + " inside the deep half");
  Rational floor = *std::min_element(t.values.begin(), t.values.end());
  Window w = Window::down_to(set, floor);
  if (!tau_external) detail::check_membership(w, t.values);
  return detail::c_tau_in(w, t.values, epsilon, depth);
}

struct TauSample {
  std::string family;
  TruncatedSequence tau;
  Extended value;
};

struct CEEstimate {
  Extended value;
  TruncatedSequence achieving_tau;
  std::string achieving_family;
  /// Sampled families only bound the true supremum from below.
  bool lower_bound = true;
  std::vector<TauSample> samples;
};

namespace detail {

/// tau families drawn from the first `depth` points: the enumeration, its suffixes,
/// strided subsequences, and the left/right endpoints of the admissible chain.
inline std::vector<std::pair<std::string, std::vector<Rational>>> tau_families(const std::vector<Rational>& points,
                                                                               const Rational& epsilon,
                                                                               std::size_t tau_samples) {
  std::vector<std::pair<std::string, std::vector<Rational>>> out;
  out.emplace_back("enumeration", points);
  for (std::size_t s = 1; s < tau_samples && s + 2 <= points.size(); ++s)
    out.emplace_back("suffix+" + std::to_string(s), std::vector<Rational>(points.begin() + static_cast<std::ptrdiff_t>(s), points.end()));
  for (std::size_t stride = 2; stride <= tau_samples; ++stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      std::vector<Rational> v;
      for (std::size_t i = off; i < points.size(); i += stride) v.push_back(points[i]);
      if (v.size() >= 2) out.emplace_back("stride" + std::to_string(stride) + "+" + std::to_string(off), std::move(v));
    }
  }
  std::vector<Rational> lefts, rights;
  const Rational threshold = Rational(1) - epsilon;
  for (const auto& g : consecutive_gaps(points)) {
    if (g.relative_length() >= threshold) {
      lefts.push_back(g.left);
      rights.push_back(g.right);
    }
  }
  if (lefts.size() >= 2) {
    out.emplace_back("chain-lefts", std::move(lefts));
    out.emplace_back("chain-rights", std::move(rights));
  }
  return out;
}

}  // namespace detail

/// Lower estimate of C_E = sup over tau of C(tau), maximized over sampled tau families.
inline CEEstimate C_E_estimate(const PorousSet& set, std::size_t depth, const Rational& epsilon,
                               std::size_t tau_samples = 3) {
  require(set.zero_isolated() != Tri::yes, ErrorCode::zero_isolated, "0 is isolated; C_E is not defined");
  require(depth >= 4, ErrorCode::invalid_argument, "C_E_estimate needs depth >= 4");
  require(tau_samples >= 1, ErrorCode::invalid_argument, "tau_samples must be positive");
  Window w(enumerate(set, depth));
  require(w.size() == depth, ErrorCode::depth_exceeds_finite_set, "set ended before depth");
  CEEstimate out;
  bool have = false;
  for (auto& [family, values] : detail::tau_families(w.points(), epsilon, tau_samples)) {
    TruncatedSequence tau;
    tau.values = std::move(values);
    tau.source = family.rfind("chain", 0) == 0 ? SequenceSource::chain_endpoints : SequenceSource::set_enumeration;
    auto r = detail::c_tau_in(w, tau.values, epsilon, depth);
    if (!have || out.value < r.value) {
      out.value = r.value;
      out.achieving_tau = tau;
      out.achieving_family = family;
      have = true;
    }
    out.samples.push_back({family, std::move(tau), r.value});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universal chain and M(L)
// ---------------------------------------------------------------------------

/// True when every left endpoint of `chain` is a left endpoint of `universal`.
inline bool embeds_into(const GapChain& chain, const GapChain& universal) {
  auto lefts = universal.lefts();
  for (const auto& g : chain.gaps)
    if (!std::binary_search(lefts.begin(), lefts.end(), g.left, std::greater<>())) return false;
  return true;
}

/// The chain of all epsilon-admissible gaps, checked to absorb every admissible chain.
inline GapChain universal_chain(const PorousSet& set, std::size_t depth, const Rational& epsilon) {
  auto chains = admissible_chains(set, depth, epsilon);
  GapChain universal = chains.front();
  for (const auto& c : chains)
    require(embeds_into(c, universal), ErrorCode::invalid_argument, "admissible chain fails to embed");
  return universal;
}

struct MValue {
  Rational value;
  bool converged = false;
  Rational half_value;
  /// 0-based pair index i attaining lefts[i] / rights[i+1].
  std::size_t argmax = 0;
};

namespace detail {
inline std::pair<Rational, std::size_t> deep_pair_max(const std::vector<Gap>& g, std::size_t len) {
  const std::size_t pairs = len - 1;
  Rational best(0);
  std::size_t at = 0;
  bool have = false;
  for (std::size_t i = pairs / 2; i + 1 < len; ++i) {
    Rational r = g[i].left / g[i + 1].right;
    if (!have || best < r) {
      best = r;
      at = i;
      have = true;
    }
  }
  return {best, at};
}
}  // namespace detail

/// M(L) = limsup l_n / m_{n+1}, estimated as the deep-half maximum over consecutive
/// pairs; converged when the estimate on the first half of the chain agrees within tol.
inline MValue M_of(const GapChain& chain, const Rational& tol = default_tolerance()) {
  require(chain.size() >= 4, ErrorCode::chain_too_short,
          "M needs at least 4 gaps, chain has " + std::to_string(chain.size()));
  auto [full, at] = detail::deep_pair_max(chain.gaps, chain.size());
  auto [half, unused] = detail::deep_pair_max(chain.gaps, (chain.size() + 1) / 2);
  (void)unused;
  return {full, abs(full - half) < tol, half, at};
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

enum class Verdict { csp, not_csp, indeterminate };

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::csp: return "csp";
    case Verdict::not_csp: return "not-csp";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct CspWitness {
  TruncatedSequence tau;
  std::string tau_family;
  Rational k;
  /// Violations for k at every K with recurring deep violations, canonically sorted.
  std::vector<Violation> violations;
  /// Largest i with every k = 2^1..2^i defeated, at depth and at depth/2.
  std::size_t frontier = 0;
  std::size_t half_depth_frontier = 0;
};

struct PorosityCertificate {
  Verdict verdict = Verdict::indeterminate;
  bool trivial_branch = false;
  std::optional<GapChain> universal_chain;
  std::optional<Rational> M_value;
  bool M_converged = false;
  std::optional<Extended> C_E;
  /// C_E estimate equals M (only meaningful for csp).
  bool identity_holds = false;
  std::optional<CspWitness> witness;
  Rational epsilon;
  std::size_t depth = 0;
  std::string reason;
};

struct ClassifyOptions {
  Rational tol = default_tolerance();
  std::size_t tau_samples = 3;
  /// k = 2^1 .. 2^max_k_exponent, K = k * 2^1 .. k * 2^max_K_exponent.
  unsigned max_k_exponent = 10;
  unsigned max_K_exponent = 10;
};

namespace detail {

struct Frontier {
  std::size_t reached = 0;
  std::vector<Violation> base_violations;  // k = 2, recurring K only
};

inline Frontier k_frontier(const Window& w, const std::vector<Rational>& tau, const ClassifyOptions& opt) {
  Frontier f;
  for (unsigned i = 1; i <= opt.max_k_exponent; ++i) {
    const Rational k = Rational::pow2(static_cast<long>(i));
    bool defeated = false;
    for (unsigned j = 1; j <= opt.max_K_exponent; ++j) {
      auto r = scan_intervals(w, tau, k, k * Rational::pow2(static_cast<long>(j)));
      if (r.holds_eventually != Tri::no) continue;
      defeated = true;
      if (i != 1) break;
      f.base_violations.insert(f.base_violations.end(), r.violations.begin(), r.violations.end());
    }
    if (!defeated) break;
    f.reached = i;
  }
  std::sort(f.base_violations.begin(), f.base_violations.end(), canonical_less);
  return f;
}

}  // namespace detail

/// Certified-at-depth classification of complete strong porosity at 0.
///
/// 1. A finite set is trivially csp.
/// 2. csp when the universal chain reaches the deep half of the window, its relative
///    lengths there stay within epsilon/2 of 1, and M converges.
/// 3. not-csp when some sampled tau defeats k = 2, 4, ... with recurring (k, K) violations
///    and the defeated range grows from depth/2 to depth below the schedule cap; also
///    when p+ converges at least epsilon below 1.
/// 4. indeterminate otherwise, with the reason recorded.
inline PorosityCertificate classify_csp(const PorousSet& set, std::size_t depth, const Rational& epsilon,
                                        const ClassifyOptions& opt = {}) {
  require(depth >= 8, ErrorCode::invalid_argument, "classify_csp needs depth >= 8");
  require(epsilon.sign() > 0 && epsilon < Rational(1), ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
  PorosityCertificate cert;
  cert.epsilon = epsilon;
  cert.depth = depth;

  switch (accumulates_at_zero(set, depth)) {
    case Tri::no:
      cert.verdict = Verdict::csp;
      cert.trivial_branch = true;
      cert.reason = "0 is an isolated point of E";
      return cert;
    case Tri::unknown:
      cert.reason = "explicit point list longer than the analyzed depth and no declared tail rule";
      return cert;
    case Tri::yes:
      break;
  }

  Window w(enumerate(set, depth));
  std::string chain_reason;
  try {
    GapChain chain = universal_chain(set, depth, epsilon);
    const Rational& deep_point = w[depth / 2];
    std::size_t deep_gaps = 0;
    for (const auto& g : chain.gaps)
      if (g.right <= deep_point) ++deep_gaps;
    Rational deep_slack(0);
    for (std::size_t i = chain.size() / 2; i < chain.size(); ++i) deep_slack = max(deep_slack, chain.gaps[i].slack());

    if (chain.size() < 4) {
      chain_reason = "universal chain has fewer than 4 gaps";
    } else if (deep_gaps < 2) {
      chain_reason = "admissible gaps do not reach the deep half of the window";
    } else if (deep_slack > epsilon / Rational(2)) {
      chain_reason = "relative gap lengths do not approach 1 (deep slack " + deep_slack.str() + ")";
    } else {
      MValue m = M_of(chain, opt.tol);
      if (!m.converged) {
        chain_reason = "M not converged (" + m.half_value.str() + " at depth/2 vs " + m.value.str() + ")";
      } else {
        auto ce = C_E_estimate(set, depth, epsilon, opt.tau_samples);
        cert.verdict = Verdict::csp;
        cert.M_value = m.value;
        cert.M_converged = true;
        cert.C_E = ce.value;
        cert.identity_holds = ce.value == Extended(m.value);
        cert.universal_chain = std::move(chain);
        cert.reason = "universal chain with finite converged M";
        return cert;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_admissible_gaps) throw;
    chain_reason = "no admissible gaps";
  }

  const std::size_t half = depth / 2;
  std::vector<std::pair<std::string, std::vector<Rational>>> families;
  families.emplace_back("enumeration", w.points());
  for (std::size_t off = 0; off < 2; ++off) {
    std::vector<Rational> v;
    for (std::size_t i = off; i < depth; i += 2) v.push_back(w[i]);
    families.emplace_back("stride2+" + std::to_string(off), std::move(v));
  }
  std::size_t best_frontier = 0;
  for (auto& [family, tau] : families) {
    if (tau.size() < 8) continue;
    std::vector<Rational> tau_half(tau.begin(), tau.begin() + static_cast<std::ptrdiff_t>(tau.size() / 2));
    auto full = detail::k_frontier(w, tau, opt);
    auto coarse = detail::k_frontier(w, tau_half, opt);
    best_frontier = std::max(best_frontier, full.reached);
    // A saturated frontier says only that the K schedule reaches the shallow scales; it is not evidence.
    if (full.reached >= 1 && full.reached < opt.max_k_exponent && full.reached > coarse.reached) {
      cert.verdict = Verdict::not_csp;
      CspWitness wit;
      wit.tau.values = tau;
      wit.tau.source = SequenceSource::set_enumeration;
      wit.tau_family = family;
      wit.k = Rational(2);
      wit.violations = std::move(full.base_violations);
      wit.frontier = full.reached;
      wit.half_depth_frontier = coarse.reached;
      cert.witness = std::move(wit);
      cert.reason = chain_reason + "; recurring (k,K) violations up to k = 2^" + std::to_string(full.reached) +
                    " (2^" + std::to_string(coarse.reached) + " at depth " + std::to_string(half) + ")";
      return cert;
    }
  }
  std::string tail = "; tau criterion frontier 2^" + std::to_string(best_frontier) +
                     " did not grow with depth below the schedule cap";
  // csp forces strong porosity, so a p+ that settles at least epsilon below 1 rules it out.
  try {
    auto p = porosity_plus(set, depth, opt.tol);
    if (p.converged && !p.partial && Rational(1) - p.estimate >= epsilon) {
      cert.verdict = Verdict::not_csp;
      cert.reason = chain_reason + tail + "; not strongly porous (p+ converged to " + p.estimate.str() + ")";
      return cert;
    }
  } catch (const Error&) {
  }
  cert.reason = chain_reason + tail;
  return cert;
}

}  // namespace porosity
