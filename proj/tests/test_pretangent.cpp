#include <gtest/gtest.h>

#include "porosity/pretangent.hpp"

using namespace porosity;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::invalid_argument;
}

Rational x(std::size_t n) { return Rational::pow2(-static_cast<long>(n * n)); }

TruncatedSequence seq(std::function<Rational(std::size_t)> f, std::size_t depth = 16) {
  return TruncatedSequence::from_rule(std::move(f), depth);
}
ScalingSequence scaling(std::function<Rational(std::size_t)> f, std::size_t depth = 16) {
  return {seq(std::move(f), depth), std::nullopt, "test"};
}
TruncatedSequence zero(std::size_t depth = 16) {
  return seq([](std::size_t) { return Rational(0); }, depth);
}

}  // namespace

TEST(LimitRatio, ConstantRatioIsExact) {
  auto r = limit_ratio(seq([](std::size_t n) { return Rational(3) * x(n); }), zero(), scaling(x), 16);
  EXPECT_EQ(r.status, Stability::stable);
  EXPECT_EQ(r.limit, Rational(3));
  EXPECT_TRUE(r.oscillation.is_zero());
}

TEST(LimitRatio, VanishingRatioResolvesToZero) {
  auto r = limit_ratio(seq([](std::size_t n) { return x(n + 1); }), zero(), scaling(x), 16);
  EXPECT_EQ(r.status, Stability::stable);
  EXPECT_EQ(r.limit, Rational(0));
}

TEST(LimitRatio, AlternatingRatioIsUnstable) {
  auto alt = seq([](std::size_t n) { return n % 2 ? x(n) : Rational(2) * x(n); });
  auto r = limit_ratio(alt, zero(), scaling(x), 16);
  EXPECT_EQ(r.status, Stability::unstable);
  EXPECT_FALSE(r.limit.has_value());
}

TEST(LimitRatio, SymmetricInXAndY) {
  auto a = seq([](std::size_t n) { return Rational(5) * x(n); });
  auto b = seq([](std::size_t n) { return Rational(2) * x(n); });
  EXPECT_EQ(limit_ratio(a, b, scaling(x), 16).limit, limit_ratio(b, a, scaling(x), 16).limit);
  EXPECT_EQ(limit_ratio(a, b, scaling(x), 16).limit, Rational(3));
}

TEST(LimitRatio, Preconditions) {
  TruncatedSequence shorter{std::vector<Rational>(8, Rational(1)), {}, SequenceSource::user_supplied};
  TruncatedSequence longer{std::vector<Rational>(9, Rational(1)), {}, SequenceSource::user_supplied};
  ScalingSequence r{longer, std::nullopt, "test"};
  EXPECT_EQ(code_of([&] { (void)limit_ratio(shorter, longer, r, 8); }), ErrorCode::length_mismatch);
  EXPECT_EQ(code_of([&] { (void)limit_ratio(longer, longer, r, 8, Rational(0)); }), ErrorCode::invalid_argument);
}

TEST(NormalScaling, ExamplesOnW) {
  auto w = make_set(super_geometric_spec());
  EXPECT_EQ(is_normal_scaling(w, scaling(x), 16).normal, Tri::yes);
  auto off = is_normal_scaling(w, scaling([](std::size_t n) { return Rational(3, 2) * x(n); }), 16);
  EXPECT_EQ(off.normal, Tri::no);
  auto finite = make_set(explicit_spec({Rational(1), Rational(1, 2)}));
  EXPECT_EQ(code_of([&] { (void)is_normal_scaling(finite, scaling(x), 16); }), ErrorCode::zero_isolated);
}

TEST(NormalScaling, WitnessLiesInTheSet) {
  auto g = make_set(geometric_spec(Rational(1, 2)));
  auto res = is_normal_scaling(g, scaling([](std::size_t n) { return Rational::pow2(-static_cast<long>(n)); }), 16);
  ASSERT_EQ(res.normal, Tri::yes);
  ASSERT_TRUE(res.witness.has_value());
  auto pts = enumerate(g, 40).points;
  for (const auto& v : res.witness->values)
    EXPECT_TRUE(std::binary_search(pts.begin(), pts.end(), v, std::greater<>()));
}

TEST(MonotoneEnvelope, RunningMinimum) {
  TruncatedSequence y{{Rational(3), Rational(1), Rational(2), Rational(1, 2), Rational(4)}, {}, SequenceSource::user_supplied};
  auto e = monotone_envelope(y);
  EXPECT_EQ(e.values, (std::vector<Rational>{Rational(3), Rational(1), Rational(1), Rational(1, 2), Rational(1, 2)}));
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LE(e[i], y[i]);
  TruncatedSequence bad{{Rational(1), Rational(0)}, {}, SequenceSource::user_supplied};
  EXPECT_EQ(code_of([&] { (void)monotone_envelope(bad); }), ErrorCode::invalid_argument);
}

TEST(BuildSelfStable, DoubledGivesThreeClasses) {
  auto r = scaling([](std::size_t n) { return Rational(2) * x(n); });
  std::vector<TruncatedSequence> cands{
      seq(x),
      seq([](std::size_t n) { return Rational(2) * x(n); }),
      seq([](std::size_t n) { return x(n + 1); }),
      seq([](std::size_t n) { return Rational(2) * x(n + 1); }),
      seq([](std::size_t n) { return n % 2 ? x(n) : Rational(2) * x(n); }),
      seq([](std::size_t n) { return n == 1 ? Rational(1) : x(n - 1); }),
  };
  auto omega = build_self_stable(r, cands, 16);
  EXPECT_EQ(omega.class_count(), 3u);
  EXPECT_EQ(omega.distance_set(), (std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1)}));
  EXPECT_EQ(omega.member_class[3], 0u);
  EXPECT_EQ(omega.member_class[4], 0u);
  ASSERT_EQ(omega.rejected.size(), 2u);
  EXPECT_EQ(omega.rejected[0].first, 4u);
  EXPECT_EQ(omega.rejected[1].first, 5u);
  EXPECT_TRUE(omega.has_unit_sphere);
  EXPECT_EQ(omega.triangle_violations, 0u);
  auto ex = space_extremes(omega);
  EXPECT_EQ(ex.rho_star, Rational(1));
  EXPECT_EQ(ex.rho_low, Extended(Rational(1, 2)));
}

TEST(BuildSelfStable, OnlyVanishingCandidatesGiveOnePoint) {
  std::vector<TruncatedSequence> cands{seq([](std::size_t n) { return x(n + 1); }),
                                       seq([](std::size_t n) { return x(n + 2); })};
  auto omega = build_self_stable(scaling(x), cands, 16);
  EXPECT_EQ(omega.class_count(), 1u);
  EXPECT_EQ(omega.members.size(), 3u);
  EXPECT_TRUE(space_extremes(omega).rho_low.is_infinite());
  EXPECT_FALSE(omega.has_unit_sphere);
}

TEST(BuildSelfStable, DistancesAreSymmetricWithZeroDiagonal) {
  std::vector<TruncatedSequence> cands;
  for (long c = 1; c <= 4; ++c) cands.push_back(seq([c](std::size_t n) { return Rational(c) * x(n); }));
  auto omega = build_self_stable(scaling(x), cands, 16);
  ASSERT_EQ(omega.class_count(), 5u);
  for (std::size_t a = 0; a < 5; ++a) {
    EXPECT_TRUE(omega.distances[a][a].is_zero());
    for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(omega.distances[a][b], omega.distances[b][a]);
  }
  EXPECT_EQ(omega.triangle_violations, 0u);
}

TEST(SampleRStar, RatioVanishingAndDoubled) {
  auto w = sample_R_star(make_set(super_geometric_spec()), 24);
  EXPECT_EQ(w.R_star, Rational(1));
  EXPECT_EQ(w.R_low, Extended(Rational(1)));
  EXPECT_EQ(w.C_E, Extended(w.R_star));
  auto d = sample_R_star(make_set(doubled_spec(super_geometric_spec(), Rational(2))), 24);
  EXPECT_EQ(d.R_star, Rational(2));
  EXPECT_EQ(d.R_low, Extended(Rational(1, 2)));
  EXPECT_EQ(d.C_E, Extended(d.R_star));
  bool witness = false;
  for (const auto& s : d.spaces) witness = witness || s.proof_witness;
  EXPECT_TRUE(witness);
}

TEST(SampleRStar, Preconditions) {
  auto finite = make_set(explicit_spec({Rational(1)}));
  EXPECT_EQ(code_of([&] { (void)sample_R_star(finite, 16); }), ErrorCode::zero_isolated);
  EXPECT_EQ(code_of([] { (void)sample_R_star(make_set(super_geometric_spec()), 4); }), ErrorCode::invalid_argument);
}

TEST(FamilyQ, TwoPointSpacesClosedUnderRescaling) {
  auto q = family_Q({{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}});
  EXPECT_EQ(q.Q, Rational(2));
  EXPECT_TRUE(q.weakly_self_similar);
  EXPECT_TRUE(q.spheres_nonempty);
  EXPECT_EQ(q.R_star, Rational(2));
  EXPECT_EQ(q.R_low, Extended(Rational(1, 2)));
}

TEST(FamilyQ, NotClosedWithoutRescaledCopy) {
  auto q = family_Q({{Rational(1), Rational(3)}});
  EXPECT_EQ(q.Q, Rational(3));
  EXPECT_FALSE(q.weakly_self_similar);
}

TEST(FamilyQ, Errors) {
  EXPECT_EQ(code_of([] { (void)family_Q({}); }), ErrorCode::empty_family);
  EXPECT_EQ(code_of([] { (void)family_Q({{Rational(-1)}}); }), ErrorCode::invalid_argument);
}
