#pragma once

// Named example sets with the expectations the generic classifiers must reproduce.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/porosity_metrics.hpp"
#include "porosity/rational.hpp"
#include "porosity/set_model.hpp"

namespace porosity {

/// A built set plus what it is expected to satisfy. Expectations are never trusted;
/// tests re-derive them through classify_csp and the pretangent sampler.
struct Construction {
  std::string name;
  PorousSet set;
  std::optional<Verdict> expected_verdict;
  std::optional<Rational> expected_M;
  /// Expected inf of the smallest nonzero radii over pretangent spaces.
  std::optional<Rational> expected_R_low;
};

namespace detail {

/// Certifies x_{n+1}/x_n -> 0 from the rule itself.
inline bool ratio_vanishes(const SetSpec& s) {
  if (const auto* sg = std::get_if<spec::SuperGeometric>(&s.params)) return sg->exponent.superlinear();
  if (std::holds_alternative<spec::FactorialDecay>(s.params)) return true;
  if (const auto* r = std::get_if<spec::Rescaled>(&s.params)) return ratio_vanishes(*r->base);
  return false;
}

}  // namespace detail

/// W = {x_n} with x_{n+1}/x_n -> 0: csp with M = 1.
inline Construction example_ratio_vanishing(SpecPtr rule, SetOptions options = {}) {
  require(rule != nullptr, ErrorCode::invalid_spec, "null rule");
  require(detail::ratio_vanishes(*rule), ErrorCode::ratio_not_vanishing,
          std::string("cannot certify x_{n+1}/x_n -> 0 for kind ") + std::string(to_string(rule->kind())));
  return {"ratio-vanishing", make_set(rule, options), Verdict::csp, Rational(1), Rational(1)};
}

/// {x_n} ∪ {c x_n} over a ratio-vanishing base; the universal chain is {(c x_{n+1}, x_n)}, so M = c.
inline Construction doubled_gap_set(SpecPtr base, const Rational& factor, SetOptions options = {}) {
  require(base != nullptr, ErrorCode::invalid_spec, "null base");
  require(factor > Rational(1), ErrorCode::invalid_argument, "factor must exceed 1");
  auto b = make_set(base, options);
  auto e = enumerate(b, std::max<std::size_t>(2, options.probe + 1));
  require(e.points.size() >= 2, ErrorCode::invalid_spec, "base needs at least two points");
  // Only the probe's last pair matters: earlier collisions are finitely many.
  const std::size_t i = e.points.size() - 2;
  require(factor * e.points[i + 1] < e.points[i], ErrorCode::factor_too_large,
          "c x_{n+1} >= x_n at n = " + std::to_string(i + 1) + " (" + (factor * e.points[i + 1]).str() + " vs " +
              e.points[i].str() + ")");
  require(detail::ratio_vanishes(*base), ErrorCode::ratio_not_vanishing,
          "doubled_gap_set needs a base with x_{n+1}/x_n -> 0");
  return {"doubled", make_set(doubled_spec(base, factor), options), Verdict::csp, factor, Rational(1) / factor};
}

/// The two-scale family: E1 = {tau_n}, E1* = {2^-m(n) tau_n}.
struct Prop28Family {
  Polynomial tau_exponent;
  unsigned partition_base = 2;
  PorousSet E1;
  PorousSet E1_star;
  PorousSet E_union;

  Rational tau(std::uint64_t n) const { return Rational::pow2(-static_cast<long>(tau_exponent(n))); }
  std::uint64_t m(std::uint64_t n) const { return partition_index(n, partition_base); }
  Rational tau_star(std::uint64_t n) const { return tau(n) * Rational::pow2(-static_cast<long>(m(n))); }

  Construction star_construction() const { return {"prop28-star", E1_star, Verdict::csp, std::nullopt, std::nullopt}; }
  Construction union_construction() const { return {"prop28-union", E_union, Verdict::not_csp, std::nullopt, std::nullopt}; }
};

/// Builds the family without checking the separation or partition hypotheses.
inline Prop28Family prop28_family_unchecked(Polynomial tau_exponent, unsigned partition_base, SetOptions options = {}) {
  Prop28Family f{tau_exponent, partition_base,
                 make_set(prop28_spec(Prop28Member::tau, tau_exponent, partition_base), options),
                 make_set(prop28_spec(Prop28Member::star, tau_exponent, partition_base), options),
                 make_set(prop28_spec(Prop28Member::both, tau_exponent, partition_base), options)};
  return f;
}

/// Checked builder. Requires tau_{n+1} <= 2^{-n^2} tau_n and m(n) <= n on the probed
/// indices, and a partition with infinitely many classes.
inline Prop28Family prop28_family(Polynomial tau_exponent = Polynomial::monomial(3), unsigned partition_base = 2,
                                  std::size_t probe = 32, SetOptions options = {}) {
  require(tau_exponent.strictly_increasing(), ErrorCode::invalid_tau_rule, "tau exponent must increase");
  for (std::uint64_t n = 1; n <= probe; ++n)
    require(tau_exponent(n + 1) - tau_exponent(n) >= n * n, ErrorCode::invalid_tau_rule,
            "tau_{n+1} > 2^{-n^2} tau_n at n = " + std::to_string(n));
  require(partition_base >= 2, ErrorCode::invalid_partition,
          "partition base " + std::to_string(partition_base) + " yields finitely many classes");
  for (std::uint64_t n = 1; n <= probe; ++n)
    require(partition_index(n, partition_base) <= n, ErrorCode::invalid_partition,
            "m(n) > n at n = " + std::to_string(n));
  return prop28_family_unchecked(std::move(tau_exponent), partition_base, options);
}

/// min over the deep half of tau*_n / tau*_{n+1} for n = 1..depth.
inline Rational ratio_growth_check(const Prop28Family& family, std::size_t depth) {
  require(depth >= 4, ErrorCode::invalid_argument, "ratio_growth_check needs depth >= 4");
  std::optional<Rational> lo;
  for (std::uint64_t n = depth / 2; n <= depth; ++n) {
    Rational r = family.tau_star(n) / family.tau_star(n + 1);
    if (!lo || r < *lo) lo = r;
  }
  return *lo;
}

}  // namespace porosity
