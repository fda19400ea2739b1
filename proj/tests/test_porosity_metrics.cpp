#include <gtest/gtest.h>

#include <random>

#include "porosity/constructions.hpp"
#include "porosity/oracle.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/report.hpp"

using namespace porosity;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::invalid_argument;
}

TruncatedSequence rule_seq(std::function<Rational(std::size_t)> r, std::size_t n) {
  return TruncatedSequence::from_rule(std::move(r), n);
}
Rational two_pow_neg(std::size_t e) { return Rational::pow2(-static_cast<long>(e)); }

TruncatedSequence points_of(const PorousSet& s, std::size_t depth) {
  TruncatedSequence t;
  t.values = enumerate(s, depth).points;
  t.source = SequenceSource::set_enumeration;
  return t;
}

PorousSet W() { return make_set(super_geometric_spec()); }
PorousSet doubled(long c) { return make_set(doubled_spec(super_geometric_spec(), Rational(c))); }

}  // namespace

TEST(IsAsymp, ConstantRatio) {
  auto a = rule_seq([](std::size_t n) { return two_pow_neg(n); }, 16);
  auto g = rule_seq([](std::size_t n) { return Rational(3, 4) * two_pow_neg(n); }, 16);
  auto r = is_asymp(a, g, 16);
  EXPECT_EQ(r.equivalent, Tri::yes);
  EXPECT_EQ(r.c1, Rational(1, 2));
  EXPECT_EQ(r.c2, Rational(1));
}

TEST(IsAsymp, VanishingRatioDiverges) {
  auto a = rule_seq([](std::size_t n) { return two_pow_neg(n); }, 16);
  auto g = rule_seq([](std::size_t n) { return two_pow_neg(n * n); }, 16);
  EXPECT_EQ(is_asymp(a, g, 16).equivalent, Tri::no);
}

TEST(IsAsymp, IdentityBracketsOne) {
  auto a = rule_seq([](std::size_t n) { return Rational(1, static_cast<long>(n)); }, 12);
  auto r = is_asymp(a, a, 12);
  EXPECT_EQ(r.equivalent, Tri::yes);
  EXPECT_LT(r.c1, Rational(1));
  EXPECT_GT(r.c2, Rational(1));
}

TEST(IsAsymp, ConstantsBracketTheWholePrefix) {
  auto a = rule_seq([](std::size_t n) { return Rational(1, static_cast<long>(n * n)); }, 20);
  auto g = rule_seq([](std::size_t n) { return Rational(static_cast<long>(n + 3), static_cast<long>(n * n * n)); }, 20);
  auto r = is_asymp(a, g, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_LT(r.c1 * a[i], g[i]);
    EXPECT_LT(g[i], r.c2 * a[i]);
  }
}

TEST(IsAsymp, LengthMismatch) {
  auto a = TruncatedSequence{std::vector<Rational>(9, Rational(1)), {}, SequenceSource::user_supplied};
  auto b = TruncatedSequence{std::vector<Rational>(10, Rational(1)), {}, SequenceSource::user_supplied};
  EXPECT_EQ(code_of([&] { (void)is_asymp(a, b, 9); }), ErrorCode::length_mismatch);
}

TEST(TauPorosity, SuperGeometricHoldsEventually) {
  auto tau = points_of(W(), 24);
  auto r = tau_porosity_test(W(), tau, Rational(2), Rational(1024), 24);
  EXPECT_EQ(r.holds_eventually, Tri::yes);
  // The next point up is 2^(2n-1) tau_n: inside (2 tau_n, 1024 tau_n) exactly for n = 2..5.
  std::vector<std::size_t> at;
  for (const auto& v : r.violations) at.push_back(v.n);
  EXPECT_EQ(at, (std::vector<std::size_t>{2, 3, 4, 5}));
  EXPECT_EQ(r.first_good_index, 6u);
}

TEST(TauPorosity, Prop28UnionRecursWhereMIsTwo) {
  auto fam = prop28_family();
  auto tau = points_of(fam.E1_star, 24);
  auto r = tau_porosity_test(fam.E_union, tau, Rational(2), Rational(8), 24);
  EXPECT_EQ(r.holds_eventually, Tri::no);
  ASSERT_FALSE(r.violations.empty());
  for (const auto& v : r.violations) {
    EXPECT_EQ(fam.m(v.n), 2u) << "n = " << v.n;
    EXPECT_EQ(v.point, fam.tau(v.n));
  }
}

TEST(TauPorosity, Preconditions) {
  auto tau = points_of(W(), 8);
  EXPECT_EQ(code_of([&] { (void)tau_porosity_test(W(), tau, Rational(2), Rational(2), 8); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { (void)tau_porosity_test(W(), tau, Rational(1), Rational(4), 8); }),
            ErrorCode::invalid_argument);
  auto outside = rule_seq([](std::size_t n) { return Rational(1, static_cast<long>(n + 2)); }, 8);
  EXPECT_EQ(code_of([&] { (void)tau_porosity_test(W(), outside, Rational(2), Rational(4), 8); }),
            ErrorCode::tau_not_in_set);
  EXPECT_NO_THROW((void)tau_porosity_test(W(), outside, Rational(2), Rational(4), 8, true));
}

TEST(TauPorosity, ViolationPointsAreMembersInsideTheInterval) {
  auto set = make_set(geometric_spec(Rational(2, 3)));
  auto tau = points_of(set, 20);
  auto r = tau_porosity_test(set, tau, Rational(2), Rational(16), 20);
  auto pts = enumerate(set, 40).points;
  for (const auto& v : r.violations) {
    EXPECT_TRUE(std::binary_search(pts.begin(), pts.end(), v.point, std::greater<>()));
    EXPECT_LT(v.k * tau[v.n - 1], v.point);
    EXPECT_LT(v.point, v.K * tau[v.n - 1]);
  }
}

TEST(CTau, Examples) {
  EXPECT_EQ(C_tau(W(), points_of(W(), 20), 20, default_epsilon()).value, Extended(Rational(1)));
  auto g = make_set(geometric_spec(Rational(1, 2)));
  EXPECT_TRUE(C_tau(g, points_of(g, 20), 20, default_epsilon()).value.is_infinite());
  auto base = points_of(W(), 12);
  auto r = C_tau(doubled(2), base, 12, default_epsilon());
  EXPECT_EQ(r.value, Extended(Rational(2)));
  ASSERT_TRUE(r.chain.has_value());
  EXPECT_TRUE(r.chain->valid());
}

TEST(CTau, AgreesWithSubsetOracle) {
  std::mt19937_64 rng(5);
  const std::vector<Rational> ratios{Rational(1, 2), Rational(1, 9), Rational(1, 5), Rational(1, 20), Rational(2, 3)};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Rational> pts;
    Rational x(1);
    for (int i = 0; i < 14; ++i) {
      pts.push_back(x);
      x *= ratios[rng() % ratios.size()];
    }
    auto set = make_set(explicit_spec(pts, super_geometric_spec(Polynomial::monomial(2), Rational(1, 2), x)));
    std::vector<Rational> tv;
    for (std::size_t i = rng() % 2; i < pts.size(); i += 1 + rng() % 2) tv.push_back(pts[i]);
    if (tv.size() < 2) continue;
    TruncatedSequence tau{tv, {}, SequenceSource::user_supplied};
    auto fast = C_tau(set, tau, tv.size(), default_epsilon()).value;
    auto w = enumerate_down_to(set, tv.back(), 100);
    EXPECT_EQ(fast, oracle::c_tau(w.points, tv, default_epsilon()));
  }
}

TEST(CE, Examples) {
  EXPECT_EQ(C_E_estimate(W(), 24, default_epsilon()).value, Extended(Rational(1)));
  auto d = C_E_estimate(doubled(2), 24, default_epsilon());
  EXPECT_EQ(d.value, Extended(Rational(2)));
  EXPECT_TRUE(d.lower_bound);
  EXPECT_TRUE(C_E_estimate(make_set(geometric_spec(Rational(1, 2))), 24, default_epsilon()).value.is_infinite());
  EXPECT_EQ(code_of([] { (void)C_E_estimate(make_set(explicit_spec({Rational(1)})), 8, default_epsilon()); }),
            ErrorCode::zero_isolated);
}

TEST(UniversalChain, Examples) {
  auto w = W();
  auto chain = universal_chain(w, 12, default_epsilon());
  auto p = enumerate(w, 12).points;
  ASSERT_EQ(chain.size(), 11u);
  for (std::size_t i = 0; i < chain.size(); ++i) EXPECT_EQ(chain.gaps[i], (Gap{p[i + 1], p[i]}));

  auto dc = universal_chain(doubled(2), 12, default_epsilon());
  for (const auto& g : dc.gaps) EXPECT_EQ(g.slack() * Rational(2) < Rational(1), true);
  EXPECT_EQ(code_of([] { (void)universal_chain(make_set(geometric_spec(Rational(1, 2))), 12, default_epsilon()); }),
            ErrorCode::no_admissible_gaps);
}

TEST(UniversalChain, EveryAdmissibleChainEmbeds) {
  for (auto spec : {super_geometric_spec(), factorial_spec(), doubled_spec(super_geometric_spec(), Rational(3)),
                    prop28_spec(Prop28Member::star)}) {
    auto set = make_set(spec);
    auto u = universal_chain(set, 16, default_epsilon());
    for (const auto& c : admissible_chains(set, 16, default_epsilon())) EXPECT_TRUE(embeds_into(c, u));
    GapChain sub{{u.gaps[1], u.gaps[3]}, default_epsilon(), 16};
    EXPECT_TRUE(embeds_into(sub, u));
  }
}

TEST(MOf, Examples) {
  EXPECT_EQ(M_of(universal_chain(W(), 24, default_epsilon())).value, Rational(1));
  EXPECT_EQ(M_of(universal_chain(doubled(2), 24, default_epsilon())).value, Rational(2));
  auto chain = universal_chain(W(), 3, default_epsilon());
  EXPECT_EQ(code_of([&] { (void)M_of(chain); }), ErrorCode::chain_too_short);
}

TEST(MOf, AtLeastOneOnValidChains) {
  for (auto spec : {super_geometric_spec(), factorial_spec(), doubled_spec(super_geometric_spec(), Rational(3)),
                    prop28_spec(Prop28Member::star), prop28_spec(Prop28Member::both),
                    make_spec(spec::PowerDecay{1, Rational(1)})}) {
    auto set = make_set(spec);
    try {
      auto chain = universal_chain(set, 24, default_epsilon());
      if (chain.size() < 4) continue;
      ASSERT_TRUE(chain.valid());
      EXPECT_GE(M_of(chain).value, Rational(1));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::no_admissible_gaps);
    }
  }
}

TEST(Classify, TrivialBranch) {
  auto c = classify_csp(make_set(explicit_spec({Rational(1)})), 16, default_epsilon());
  EXPECT_EQ(c.verdict, Verdict::csp);
  EXPECT_TRUE(c.trivial_branch);
}

TEST(Classify, LongExplicitListIsIndeterminate) {
  std::vector<Rational> pts;
  for (long i = 1; i <= 40; ++i) pts.push_back(Rational(1, i * i));
  EXPECT_EQ(classify_csp(make_set(explicit_spec(pts)), 16, default_epsilon()).verdict, Verdict::indeterminate);
}

TEST(Classify, RatioVanishingIsCspWithUnitM) {
  auto c = classify_csp(W(), 24, default_epsilon());
  EXPECT_EQ(c.verdict, Verdict::csp);
  EXPECT_EQ(c.M_value, Rational(1));
  ASSERT_TRUE(c.universal_chain.has_value());
}

TEST(Classify, Prop28UnionIsNotCsp) {
  auto fam = prop28_family();
  auto c = classify_csp(fam.E_union, 24, default_epsilon());
  ASSERT_EQ(c.verdict, Verdict::not_csp);
  ASSERT_TRUE(c.witness.has_value());
  auto pts = enumerate_down_to(fam.E_union, c.witness->tau.values.back(), 1000).points;
  for (const auto& v : c.witness->violations) {
    EXPECT_TRUE(std::binary_search(pts.begin(), pts.end(), v.point, std::greater<>()));
    const Rational& t = c.witness->tau[v.n - 1];
    EXPECT_LT(v.k * t, v.point);
    EXPECT_LT(v.point, v.K * t);
  }
  EXPECT_TRUE(std::is_sorted(c.witness->violations.begin(), c.witness->violations.end(), canonical_less));
}

TEST(Classify, CspCertificatesSatisfyTheIdentityAndInvariants) {
  for (auto spec : {super_geometric_spec(), factorial_spec(), doubled_spec(super_geometric_spec(), Rational(2)),
                    doubled_spec(super_geometric_spec(), Rational(3)), prop28_spec(Prop28Member::star),
                    super_geometric_spec(Polynomial::monomial(3), Rational(1, 3))}) {
    auto set = make_set(spec);
    auto c = classify_csp(set, 24, default_epsilon());
    ASSERT_EQ(c.verdict, Verdict::csp) << c.reason;
    ASSERT_TRUE(c.universal_chain && c.M_value);
    for (const auto& chain : admissible_chains(set, 24, default_epsilon()))
      EXPECT_TRUE(embeds_into(chain, *c.universal_chain));
    EXPECT_TRUE(c.identity_holds);
    EXPECT_EQ(*c.C_E, Extended(*c.M_value));
    // Strong porosity: the p+ estimate moves toward 1 as depth doubles.
    auto deep = porosity_plus(set, 24), shallow = porosity_plus(set, 12);
    EXPECT_LE(Rational(1) - deep.estimate, Rational(1) - shallow.estimate);
    EXPECT_LT(Rational(1) - deep.estimate, Rational(1, 16));
  }
}

TEST(Classify, ScaleInvariant) {
  for (auto spec : {super_geometric_spec(), doubled_spec(super_geometric_spec(), Rational(3)),
                    geometric_spec(Rational(1, 3)), prop28_spec(Prop28Member::both)}) {
    auto set = make_set(spec);
    auto base = classify_csp(set, 24, default_epsilon());
    for (const auto& t : {Rational(2), Rational(1, 3), Rational(7, 5)}) {
      auto c = classify_csp(rescale(set, t), 24, default_epsilon());
      EXPECT_EQ(c.verdict, base.verdict);
      EXPECT_EQ(c.M_value, base.M_value);
      EXPECT_EQ(c.C_E, base.C_E);
    }
  }
}

TEST(Classify, Deterministic) {
  auto fam = prop28_family();
  auto a = report_to_json({"classify", std::nullopt, {}, std::nullopt, std::nullopt,
                           certificate_record(classify_csp(fam.E_union, 24, default_epsilon())), {}, {}, {}, {}});
  auto b = report_to_json({"classify", std::nullopt, {}, std::nullopt, std::nullopt,
                           certificate_record(classify_csp(fam.E_union, 24, default_epsilon())), {}, {}, {}, {}});
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Classify, CoarseThresholdNeverRefutesDoubledSets) {
  // At epsilon = 1/4 the inner gaps (x, c x) of a c >= 4 doubled set count as admissible;
  // the verdict may be indeterminate but never a false refutation.
  for (long c : {4, 5}) {
    auto set = doubled(c);
    for (std::size_t d : {16, 24, 32}) EXPECT_NE(classify_csp(set, d, default_epsilon()).verdict, Verdict::not_csp);
  }
}

TEST(Classify, GeometricIsRefutedByPorosity) {
  for (auto q : {Rational(1, 2), Rational(1, 3), Rational(9, 10)}) {
    auto c = classify_csp(make_set(geometric_spec(q)), 24, default_epsilon());
    EXPECT_EQ(c.verdict, Verdict::not_csp) << c.reason;
  }
}

TEST(Classify, Prop28UnionStableAcrossDepths) {
  auto fam = prop28_family();
  for (std::size_t d : {12, 16, 24, 32})
    EXPECT_EQ(classify_csp(fam.E_union, d, default_epsilon()).verdict, Verdict::not_csp) << "depth " << d;
}
