#pragma once

// Executable identity checks over the constructed example sets. Each check yields one
// pass/fail record; `verify` in the CLI and the acceptance binary both run these.

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "porosity/constructions.hpp"
#include "porosity/gap_analysis.hpp"
#include "porosity/oracle.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/report.hpp"
#include "porosity/set_model.hpp"
#include "porosity/window.hpp"

namespace porosity::suites {

using Checks = std::vector<CheckRecord>;

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string opt_str(const std::optional<Rational>& r) { return r ? r->str() : "none"; }
inline std::string opt_str(const std::optional<Extended>& r) { return r ? r->str() : "none"; }

/// Runs `body` and turns library errors into a failed record.
inline CheckRecord guarded(std::string id, std::string name, const std::function<bool(std::string&)>& body) {
  CheckRecord rec{std::move(id), std::move(name), false, ""};
  try {
    rec.passed = body(rec.detail);
  } catch (const std::exception& e) {
    rec.passed = false;
    rec.detail += std::string(rec.detail.empty() ? "" : "; ") + "error: " + e.what();
  }
  return rec;
}

}  // namespace detail

/// Ratio-vanishing examples are csp with M = 1.
inline Checks ratio_vanishing_examples(std::size_t depth = 24) {
  Checks out;
  const std::vector<std::pair<std::string, SpecPtr>> rules{{"2^-n^2", super_geometric_spec()},
                                                          {"1/n!", factorial_spec()}};
  for (const auto& [label, rule] : rules) {
    out.push_back(detail::guarded("1", "ratio-vanishing " + label + " is csp with M = 1", [&](std::string& d) {
      auto t0 = std::chrono::steady_clock::now();
      auto w = example_ratio_vanishing(rule);
      auto cert = classify_csp(w.set, depth, default_epsilon());
      const double secs = detail::seconds_since(t0);
      d = "verdict " + std::string(to_string(cert.verdict)) + ", M " + detail::opt_str(cert.M_value) + ", depth " +
          std::to_string(depth);
      return cert.verdict == Verdict::csp && cert.M_value == Rational(1) && secs < 5.0;
    }));
  }
  return out;
}

/// Geometric sets: p+ = 1 - q exactly and converged, never csp, and the fast profile
/// agrees with an exhaustive subinterval scan.
inline Checks geometric_control(std::size_t depth = 32) {
  Checks out;
  for (const auto& q : {Rational(1, 2), Rational(1, 3), Rational(9, 10)}) {
    out.push_back(detail::guarded("2", "geometric q = " + q.str() + ": p+ = 1 - q, not csp", [&](std::string& d) {
      auto t0 = std::chrono::steady_clock::now();
      auto set = make_set(geometric_spec(q));
      auto p = porosity_plus(set, depth);
      auto cert = classify_csp(set, depth, default_epsilon());
      // Oracle: exhaustive scan at every deep candidate h.
      const std::size_t oracle_depth = std::min<std::size_t>(depth, 64);
      auto e = enumerate(set, oracle_depth);
      Rational oracle_max(0);
      for (std::size_t i = std::max<std::size_t>(1, oracle_depth / 2) - 1; i + 1 < oracle_depth; ++i)
        oracle_max = max(oracle_max, oracle::largest_gap(e.points, false, e.points[i]) / e.points[i]);
      const double secs = detail::seconds_since(t0);
      d = "p+ " + p.estimate.str() + (p.converged ? " (converged)" : " (not converged)") + ", oracle " +
          oracle_max.str() + ", verdict " + std::string(to_string(cert.verdict));
      return p.estimate == Rational(1) - q && p.converged && oracle_max == p.estimate && cert.verdict != Verdict::csp &&
             secs < 5.0;
    }));
  }
  return out;
}

/// doubled_gap_set(2^-n^2, c): M = c and C_E = M exactly.
inline Checks engineered_M(std::size_t depth = 24) {
  Checks out;
  for (long c : {2L, 3L}) {
    out.push_back(detail::guarded("3", "doubled c = " + std::to_string(c) + ": M = C_E = c", [&](std::string& d) {
      auto dbl = doubled_gap_set(super_geometric_spec(), Rational(c));
      auto chain = universal_chain(dbl.set, depth, default_epsilon());
      auto m = M_of(chain);
      auto ce = C_E_estimate(dbl.set, depth, default_epsilon());
      auto cert = classify_csp(dbl.set, depth, default_epsilon());
      d = "M " + m.value.str() + ", C_E " + ce.value.str() + " via " + ce.achieving_family + ", verdict " +
          std::string(to_string(cert.verdict));
      return m.value == Rational(c) && ce.value == Extended(Rational(c)) && cert.verdict == Verdict::csp &&
             cert.M_value == Rational(c);
    }));
  }
  return out;
}

/// The two-scale family: E1* is csp, E1 ∪ E1* is not, with at least three distinct
/// (k, K) pairs at k = 2 in the witness.
inline Checks prop28_suite(std::size_t depth = 24) {
  Checks out;
  auto t0 = std::chrono::steady_clock::now();
  auto fam = prop28_family();
  out.push_back(detail::guarded("4", "E1* is csp", [&](std::string& d) {
    auto cert = classify_csp(fam.E1_star, depth, default_epsilon());
    d = "verdict " + std::string(to_string(cert.verdict)) + ", M " + detail::opt_str(cert.M_value);
    return cert.verdict == Verdict::csp;
  }));
  out.push_back(detail::guarded("4", "E1 ∪ E1* is not csp with >= 3 (2, K) witnesses", [&](std::string& d) {
    auto cert = classify_csp(fam.E_union, depth, default_epsilon());
    std::set<Rational> Ks;
    bool members_ok = true;
    if (cert.witness) {
      Window w = Window::down_to(fam.E_union, cert.witness->tau.values.back());
      for (const auto& v : cert.witness->violations) {
        if (v.k == Rational(2)) Ks.insert(v.K);
        const Rational& t = cert.witness->tau[v.n - 1];
        members_ok = members_ok && w.contains(v.point) && v.k * t < v.point && v.point < v.K * t;
      }
    }
    // Which tau candidate witnesses failure at (2, 8): the tau_n or the tau*_n.
    std::string which;
    for (auto [label, member] : {std::pair{"tau", Prop28Member::tau}, std::pair{"tau*", Prop28Member::star}}) {
      auto tau_set = make_set(prop28_spec(member));
      TruncatedSequence tau;
      tau.values = enumerate(tau_set, depth).points;
      auto r = tau_porosity_test(fam.E_union, tau, Rational(2), Rational(8), depth);
      which += std::string(which.empty() ? "" : ", ") + label + ": " + std::string(to_string(r.holds_eventually));
    }
    const double secs = detail::seconds_since(t0);
    d = "verdict " + std::string(to_string(cert.verdict)) + ", distinct K at k = 2: " + std::to_string(Ks.size()) +
        ", (2,8)-criterion holds for " + which;
    return cert.verdict == Verdict::not_csp && Ks.size() >= 3 && members_ok && secs < 30.0;
  }));
  return out;
}

/// R* = C_E exactly via the proof-witness scaling, R* · R+ = 1, and rho* <= C_E on
/// every sampled space.
inline Checks boundedness_identity(std::size_t depth = 24) {
  Checks out;
  const std::vector<std::pair<std::string, SpecPtr>> sets{
      {"W = 2^-n^2", super_geometric_spec()}, {"doubled c = 2", doubled_spec(super_geometric_spec(), Rational(2))}};
  for (const auto& [label, s] : sets) {
    out.push_back(detail::guarded("5", label + ": R* = C_E and R* R+ = 1", [&](std::string& d) {
      auto set = make_set(s);
      auto r = sample_R_star(set, depth);
      bool bounded = true, witness_attains = false;
      for (const auto& sp : r.spaces) {
        bounded = bounded && Extended(sp.extremes.rho_star) <= r.C_E;
        witness_attains = witness_attains || (sp.proof_witness && Extended(sp.extremes.rho_star) == r.C_E);
      }
      const bool product = r.R_low.is_finite() && r.R_star * r.R_low.value() == Rational(1);
      d = "R* " + r.R_star.str() + ", R+ " + r.R_low.str() + ", C_E " + r.C_E.str() + ", spaces " +
          std::to_string(r.spaces.size());
      return Extended(r.R_star) == r.C_E && product && bounded && witness_attains;
    }));
  }
  return out;
}

namespace detail {

/// Restricted pair limits along two rule-selected subsequences of the family's indices.
inline std::size_t invariance_violations(const PretangentApprox& a, const Rational& tol) {
  std::vector<std::vector<std::size_t>> subs;
  const auto& idx = a.subsequence;
  subs.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(idx.size() / 2), idx.end());
  std::vector<std::size_t> even;
  for (std::size_t i = 0; i < idx.size(); i += 2) even.push_back(idx[i]);
  subs.push_back(std::move(even));
  std::size_t bad = 0;
  for (const auto& sub : subs) {
    if (sub.size() < 4) continue;
    ScalingSequence r{porosity::detail::restrict_to(a.scaling.values, sub), std::nullopt, a.scaling.family};
    for (std::size_t i = 0; i < a.members.size(); ++i)
      for (std::size_t j = i + 1; j < a.members.size(); ++j) {
        auto res = limit_ratio(porosity::detail::restrict_to(a.members[i], sub),
                               porosity::detail::restrict_to(a.members[j], sub), r, sub.size(), tol);
        if (res.status != Stability::stable || *res.limit != a.member_distances[i][j]) ++bad;
      }
  }
  return bad;
}

}  // namespace detail

/// Randomized candidate pools over doubled(c = 2): exact triangle inequality and
/// subsequence invariance of every stable limit.
inline Checks pretangent_validity(std::size_t depth = 24, std::size_t pools = 200, std::uint64_t seed = 20240601) {
  Checks out;
  out.push_back(detail::guarded("6", std::to_string(pools) + " random pools over doubled c = 2", [&](std::string& d) {
    auto set = make_set(doubled_spec(super_geometric_spec(), Rational(2)));
    const std::size_t total = depth * 3 + 2;
    auto pts = enumerate(set, total).points;
    auto scalings = porosity::detail::scaling_families(pts, depth, default_epsilon(), 3);
    const std::vector<Rational> multipliers{Rational(1, 2), Rational(1), Rational(3, 2), Rational(2), Rational(3)};
    std::mt19937_64 rng(seed);
    std::size_t triangle = 0, invariance = 0, exhausted = 0, classes = 0, spaces = 0;
    for (std::size_t t = 0; t < pools; ++t) {
      const auto& sc = scalings[rng() % scalings.size()];
      auto r = porosity::detail::scaling_of(pts, sc);
      std::vector<TruncatedSequence> pool;
      const std::size_t n = 1 + rng() % 6;
      for (std::size_t c = 0; c < n; ++c) {
        const Rational& m = multipliers[rng() % multipliers.size()];
        const long off = static_cast<long>(rng() % 5) - 2;
        TruncatedSequence s;
        bool ok = true;
        for (auto i : sc.index) {
          long j = static_cast<long>(i) + off;
          if (j < 0 || static_cast<std::size_t>(j) >= pts.size()) {
            ok = false;
            break;
          }
          s.values.push_back(m * pts[static_cast<std::size_t>(j)]);
        }
        if (ok) pool.push_back(std::move(s));
      }
      try {
        auto a = build_self_stable(r, pool, depth);
        triangle += a.triangle_violations;
        invariance += detail::invariance_violations(a, default_tolerance());
        classes += a.class_count();
        ++spaces;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_stable_subsequence) throw;
        ++exhausted;
      }
    }
    d = "spaces " + std::to_string(spaces) + ", classes " + std::to_string(classes) + ", triangle violations " +
        std::to_string(triangle) + ", invariance violations " + std::to_string(invariance) +
        ", extraction budget exhausted " + std::to_string(exhausted);
    return triangle == 0 && invariance == 0 && exhausted == 0;
  }));
  return out;
}

namespace detail {

struct Fingerprint {
  std::string p_plus;
  std::string verdict;
  std::string M;
  std::string C_E;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

inline Fingerprint fingerprint(const PorousSet& set, std::size_t depth) {
  Fingerprint f;
  try {
    auto p = porosity_plus(set, depth);
    f.p_plus = p.estimate.str() + (p.converged ? "" : "?");
  } catch (const Error& e) {
    f.p_plus = std::string(to_string(e.code()));
  }
  auto cert = classify_csp(set, depth, default_epsilon());
  f.verdict = std::string(to_string(cert.verdict));
  f.M = opt_str(cert.M_value);
  try {
    f.C_E = C_E_estimate(set, depth, default_epsilon()).value.str();
  } catch (const Error& e) {
    f.C_E = std::string(to_string(e.code()));
  }
  return f;
}

inline std::vector<std::pair<std::string, SpecPtr>> test_sets() {
  return {{"W", super_geometric_spec()},
          {"factorial", factorial_spec()},
          {"geometric 1/2", geometric_spec(Rational(1, 2))},
          {"geometric 1/3", geometric_spec(Rational(1, 3))},
          {"geometric 9/10", geometric_spec(Rational(9, 10))},
          {"doubled 2", doubled_spec(super_geometric_spec(), Rational(2))},
          {"doubled 3", doubled_spec(super_geometric_spec(), Rational(3))},
          {"E1*", prop28_spec(Prop28Member::star)},
          {"E1 u E1*", prop28_spec(Prop28Member::both)},
          {"finite", explicit_spec({Rational(1), Rational(1, 2), Rational(1, 4)})}};
}

}  // namespace detail

/// p+, verdict, M and C_E are unchanged by E -> tE.
inline Checks scale_invariance(std::size_t depth = 24) {
  Checks out;
  for (const auto& [label, s] : detail::test_sets()) {
    out.push_back(detail::guarded("7", label + " under t = 2, 1/3, 7/5", [&](std::string& d) {
      auto set = make_set(s);
      auto base = detail::fingerprint(set, depth);
      bool same = true;
      for (const auto& t : {Rational(2), Rational(1, 3), Rational(7, 5)}) {
        auto f = detail::fingerprint(rescale(set, t), depth);
        if (!(f == base)) {
          same = false;
          d += "t = " + t.str() + " gives p+ " + f.p_plus + ", " + f.verdict + ", M " + f.M + ", C_E " + f.C_E + "; ";
        }
      }
      d += "p+ " + base.p_plus + ", " + base.verdict + ", M " + base.M + ", C_E " + base.C_E;
      return same;
    }));
  }
  return out;
}

namespace detail {

/// Explicit set of 8..16 points from random ratios, continued by a decay tail.
inline SpecPtr random_explicit(std::mt19937_64& rng) {
  const std::vector<Rational> ratios{Rational(1, 2), Rational(1, 3), Rational(2, 3),
                                     Rational(1, 5), Rational(1, 8), Rational(1, 10)};
  const std::size_t n = 8 + rng() % 9;
  std::vector<Rational> pts;
  Rational x(1);
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(x);
    x *= ratios[rng() % ratios.size()];
  }
  SpecPtr tail;
  switch (rng() % 3) {
    case 0: tail = super_geometric_spec(Polynomial::monomial(2), Rational(1, 2), pts.back()); break;
    case 1: tail = factorial_spec(pts.back()); break;
    default: tail = geometric_spec(ratios[rng() % ratios.size()], pts.back()); break;
  }
  return explicit_spec(std::move(pts), std::move(tail));
}

}  // namespace detail

/// C_tau and largest_gap_length against exhaustive enumeration on random explicit sets.
inline Checks oracle_differential(std::size_t sets = 50, std::uint64_t seed = 7) {
  Checks out;
  out.push_back(detail::guarded("8", std::to_string(sets) + " explicit sets against brute force", [&](std::string& d) {
    std::mt19937_64 rng(seed);
    std::size_t gap_checks = 0, tau_checks = 0, mismatches = 0;
    std::string first_bad;
    for (std::size_t s = 0; s < sets; ++s) {
      auto spec = detail::random_explicit(rng);
      auto set = make_set(spec);
      const std::size_t depth = std::get<spec::Explicit>(spec->params).points.size() + 2;
      auto e = enumerate(set, depth);
      for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
        for (const auto& h : {e.points[i], (e.points[i] + e.points[i + 1]) / Rational(2)}) {
          auto fast = largest_gap_length(set, h, depth).value;
          auto slow = oracle::largest_gap(e.points, e.complete, h);
          ++gap_checks;
          if (fast != slow) {
            ++mismatches;
            if (first_bad.empty()) first_bad = "lambda at set " + std::to_string(s) + ", h " + h.str();
          }
        }
      }
      std::vector<std::vector<Rational>> taus{e.points};
      std::vector<Rational> odd;
      for (std::size_t i = 1; i < e.points.size(); i += 2) odd.push_back(e.points[i]);
      taus.push_back(std::move(odd));
      for (const auto& tv : taus) {
        TruncatedSequence tau;
        tau.values = tv;
        auto fast = C_tau(set, tau, tv.size(), default_epsilon()).value;
        Window w = Window::down_to(set, tv.back());
        auto slow = oracle::c_tau(w.points(), tv, default_epsilon());
        ++tau_checks;
        if (fast != slow) {
          ++mismatches;
          if (first_bad.empty()) first_bad = "C_tau at set " + std::to_string(s) + ": " + fast.str() + " vs " + slow.str();
        }
      }
    }
    d = std::to_string(gap_checks) + " lambda and " + std::to_string(tau_checks) + " C_tau comparisons, " +
        std::to_string(mismatches) + " mismatches" + (first_bad.empty() ? "" : " (first: " + first_bad + ")");
    return mismatches == 0;
  }));
  return out;
}

/// {{0,1,2},{0,1/2,1}}: weakly self-similar, Q = 2, min rho+ = 1/2 = 1/Q.
inline Checks self_similarity() {
  Checks out;
  out.push_back(detail::guarded("9", "family {{0,1,2},{0,1/2,1}}", [&](std::string& d) {
    auto q = family_Q({{Rational(0), Rational(1), Rational(2)}, {Rational(0), Rational(1, 2), Rational(1)}});
    d = "Q " + q.Q.str() + ", weakly self-similar " + (q.weakly_self_similar ? "true" : "false") + ", min rho+ " +
        q.R_low.str() + ", max rho* " + q.R_star.str();
    return q.weakly_self_similar && q.Q == Rational(2) && q.R_low == Extended(Rational(1, 2)) &&
           q.R_low == Extended(Rational(1) / q.Q) && q.spheres_nonempty;
  }));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"csp-identities", "geometric",       "prop28", "scale", "oracle",
                                              "pretangent",     "self-similarity", "all"};
  return names;
}

/// Runs a named suite. `depth` replaces each check's default depth when given.
inline Checks run_suite(const std::string& name, std::optional<std::size_t> depth = std::nullopt) {
  auto pick = [&](std::size_t fallback) { return depth.value_or(fallback); };
  Checks out;
  auto add = [&](Checks c) { out.insert(out.end(), c.begin(), c.end()); };
  const bool all = name == "all";
  bool known = all;
  if (all || name == "csp-identities") {
    known = true;
    add(ratio_vanishing_examples(pick(24)));
    if (all) add(geometric_control(pick(32)));
    add(engineered_M(pick(24)));
    if (all) add(prop28_suite(pick(24)));
    add(boundedness_identity(pick(24)));
  }
  if (name == "geometric") known = true, add(geometric_control(pick(32)));
  if (name == "prop28") known = true, add(prop28_suite(pick(24)));
  if (all || name == "pretangent") known = true, add(pretangent_validity(pick(24)));
  if (all || name == "scale") known = true, add(scale_invariance(pick(24)));
  if (all || name == "oracle") known = true, add(oracle_differential());
  if (all || name == "self-similarity") known = true, add(self_similarity());
  require(known, ErrorCode::invalid_argument, "unknown suite '" + name + "'");
  return out;
}

}  // namespace porosity::suites
