#include <gtest/gtest.h>

#include <random>

#include "porosity/gap_analysis.hpp"
#include "porosity/oracle.hpp"

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
}  // namespace

TEST(Gaps, ConsecutivePointsOfGeometric) {
  auto g = gaps(make_set(geometric_spec(Rational(1, 2))), 3);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], (Gap{Rational(1, 4), Rational(1, 2)}));
  EXPECT_EQ(g[1], (Gap{Rational(1, 8), Rational(1, 4)}));
}

TEST(Gaps, DoubledAlternatesSmallAndLarge) {
  auto g = gaps(make_set(doubled_spec(super_geometric_spec(), Rational(2))), 6);
  ASSERT_EQ(g.size(), 5u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i % 2 == 0) {
      EXPECT_EQ(g[i].relative_length(), Rational(1, 2));  // (x_n, 2 x_n)
    } else {
      EXPECT_EQ(g[i].left, Rational(2) * Rational::pow2(-static_cast<long>((i / 2 + 2) * (i / 2 + 2))));
    }
  }
}

TEST(Gaps, FiniteSetTooShallow) {
  EXPECT_EQ(code_of([] { (void)gaps(make_set(explicit_spec({Rational(1)})), 2); }), ErrorCode::depth_exceeds_finite_set);
}

TEST(Gaps, NoEnumeratedPointInsideAnyGap) {
  for (auto spec : {doubled_spec(super_geometric_spec(), Rational(3)), prop28_spec(Prop28Member::both),
                    union_spec({geometric_spec(Rational(1, 2)), geometric_spec(Rational(1, 3))})}) {
    auto set = make_set(spec);
    auto p = enumerate(set, 20).points;
    for (const auto& g : gaps(set, 20))
      for (const auto& x : p) EXPECT_FALSE(g.left < x && x < g.right);
  }
}

TEST(LargestGap, Examples) {
  auto g = make_set(geometric_spec(Rational(1, 2)));
  auto at1 = largest_gap_length(g, Rational(1), 10);
  EXPECT_EQ(at1.value, Rational(1, 2));
  EXPECT_EQ(at1.gap, (Gap{Rational(1, 2), Rational(1)}));
  EXPECT_EQ(largest_gap_length(make_set(explicit_spec({Rational(1)})), Rational(1, 2), 4).value, Rational(1, 2));
  auto at38 = largest_gap_length(g, Rational(3, 8), 10);
  EXPECT_EQ(at38.value, Rational(1, 8));
  EXPECT_EQ(at38.gap.left, Rational(1, 4));  // tie broken toward the larger left endpoint
}

TEST(LargestGap, WindowNotCovered) {
  EXPECT_EQ(code_of([] { (void)largest_gap_length(make_set(geometric_spec(Rational(1, 2))), Rational(1, 4096), 5); }),
            ErrorCode::window_not_covered);
}

TEST(LargestGap, PartialFlagWhenTailMightHoldLonger) {
  auto r = largest_gap_length(make_set(geometric_spec(Rational(1, 2))), Rational(1, 2), 2);
  EXPECT_EQ(r.value, Rational(1, 4));
  EXPECT_FALSE(r.partial);
  auto far = largest_gap_length(make_set(geometric_spec(Rational(9, 10))), Rational(1, 2), 10);
  EXPECT_TRUE(far.partial);
}

TEST(LargestGap, BoundedByH) {
  auto set = make_set(doubled_spec(super_geometric_spec(), Rational(2)));
  auto p = enumerate(set, 16).points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto v = largest_gap_length(set, p[i], 16).value;
    EXPECT_GE(v, Rational(0));
    EXPECT_LE(v, p[i]);
  }
}

TEST(LargestGap, MonotoneUnderInclusion) {
  auto e = make_set(super_geometric_spec());
  auto f = make_set(union_spec({super_geometric_spec(), geometric_spec(Rational(1, 3))}));
  for (const auto& h : {Rational(1, 3), Rational(1, 17), Rational(1, 100)}) {
    auto ep = enumerate_down_to(e, h / Rational(1000), 1000);
    auto fp = enumerate_down_to(f, h / Rational(1000), 1000);
    EXPECT_LE(largest_gap_in(fp.points, fp.complete, h).value, largest_gap_in(ep.points, ep.complete, h).value);
  }
}

TEST(LargestGap, DifferentialAgainstExhaustiveScan) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Rational> pts;
    Rational x(1);
    const std::size_t n = 2 + rng() % 63;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(x);
      x *= Rational(static_cast<long>(1 + rng() % 9), 10);
    }
    auto set = make_set(explicit_spec(pts));
    auto e = enumerate(set, 64);
    for (std::size_t i = 0; i < e.points.size(); ++i) {
      Rational h = e.points[i] * Rational(static_cast<long>(1 + rng() % 20), 10);
      EXPECT_EQ(largest_gap_length(set, h, 64).value, oracle::largest_gap(e.points, e.complete, h));
    }
  }
}

TEST(PorosityPlus, GeometricIsExactlyOneMinusQ) {
  for (const auto& q : {Rational(1, 2), Rational(1, 3), Rational(9, 10), Rational(5, 7)})
    for (std::size_t d : {3u, 8u, 33u}) {
      auto p = porosity_plus(make_set(geometric_spec(q)), d);
      EXPECT_EQ(p.estimate, Rational(1) - q);
      EXPECT_TRUE(p.converged);
    }
}

TEST(PorosityPlus, SuperGeometricApproachesOne) {
  auto w = make_set(super_geometric_spec());
  // Half-depth and full-depth maxima differ by 2^-(d-1) - 2^-(2d-1); below 2^-16 from depth 18 on.
  EXPECT_FALSE(porosity_plus(w, 16).converged);
  for (std::size_t d : {18u, 24u, 32u}) {
    auto p = porosity_plus(w, d);
    EXPECT_TRUE(p.converged);
    EXPECT_EQ(p.estimate, Rational(1) - Rational::pow2(-static_cast<long>(2 * (d - 1) + 1)));
  }
}

TEST(PorosityPlus, ZeroIsolatedIsAnError) {
  EXPECT_EQ(code_of([] { (void)porosity_plus(make_set(explicit_spec({Rational(1)})), 8); }), ErrorCode::zero_isolated);
}

TEST(PorosityPlus, ScaleInvariant) {
  for (auto spec : {super_geometric_spec(), factorial_spec(), geometric_spec(Rational(2, 3)),
                    doubled_spec(super_geometric_spec(), Rational(2))}) {
    auto set = make_set(spec);
    auto base = porosity_plus(set, 20);
    for (const auto& t : {Rational(2), Rational(1, 3), Rational(7, 5)}) {
      auto r = porosity_plus(rescale(set, t), 20);
      EXPECT_EQ(r.estimate, base.estimate);
      EXPECT_EQ(r.converged, base.converged);
    }
    EXPECT_LE(base.estimate, Rational(1));
  }
}

TEST(AdmissibleChains, Examples) {
  EXPECT_EQ(code_of([] { (void)admissible_chains(make_set(geometric_spec(Rational(1, 2))), 16, Rational(1, 4)); }),
            ErrorCode::no_admissible_gaps);

  auto chains = admissible_chains(make_set(super_geometric_spec()), 6, Rational(1, 4));
  ASSERT_EQ(chains.size(), 1u);
  // All five consecutive gaps pass: relative length 1 - 2^-(2n+1) >= 7/8 already at n = 1.
  EXPECT_EQ(chains[0].size(), 5u);
  EXPECT_TRUE(chains[0].valid());

  auto dbl = admissible_chains(make_set(doubled_spec(super_geometric_spec(), Rational(2))), 12, Rational(1, 4));
  auto base = enumerate(make_set(super_geometric_spec()), 12).points;
  for (const auto& g : dbl[0].gaps) {
    bool large = false;
    for (std::size_t i = 0; i + 1 < base.size(); ++i)
      large = large || (g.right == base[i] && g.left == Rational(2) * base[i + 1]);
    EXPECT_TRUE(large) << "(" << g.left << ", " << g.right << ")";
  }
}
