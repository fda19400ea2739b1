#pragma once

// Exact-arithmetic subsets of R+ accumulating at (or isolated from) 0.
//
// A SetSpec is a declarative description; make_set() validates it and returns a
// PorousSet, which hands out restartable lazy streams of its points in strictly
// decreasing order. All kinds enumerate E ∩ (0, x1] where x1 is the largest point.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/rational.hpp"

namespace porosity {

/// Exponent rule n -> c0 + c1 n + c2 n^2 + ... with non-negative integer coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::uint64_t> coefficients) : c_(std::move(coefficients)) {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  static Polynomial monomial(std::size_t degree) {
    std::vector<std::uint64_t> c(degree + 1, 0);
    c[degree] = 1;
    return Polynomial(std::move(c));
  }

  const std::vector<std::uint64_t>& coefficients() const noexcept { return c_; }
  std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }

  std::uint64_t operator()(std::uint64_t n) const {
    constexpr auto lim = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      require(n == 0 || acc <= (lim - *it) / n, ErrorCode::bit_budget_exceeded,
              "exponent rule overflows 64 bits");
      acc = acc * n + *it;
    }
    return acc;
  }

  /// True when e(n+1) > e(n) for all n >= 1.
  bool strictly_increasing() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return true;
    return false;
  }
  /// True when e(n+1) - e(n) -> infinity (some coefficient of degree >= 2).
  bool superlinear() const {
    for (std::size_t i = 2; i < c_.size(); ++i)
      if (c_[i] != 0) return true;
    return false;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<std::uint64_t> c_;
};

struct SetSpec;
using SpecPtr = std::shared_ptr<const SetSpec>;

enum class Prop28Member { tau, star, both };

namespace spec {

/// Finite list of points, optionally continued below its last point by a decay rule.
struct Explicit {
  std::vector<Rational> points;
  SpecPtr tail;
  friend bool operator==(const Explicit& a, const Explicit& b);
};
/// scale / n^exponent.
struct PowerDecay {
  unsigned exponent = 1;
  Rational scale{1};
  friend bool operator==(const PowerDecay&, const PowerDecay&) = default;
};
/// scale * ratio^n with 0 < ratio < 1.
struct Geometric {
  Rational ratio{1, 2};
  Rational scale{1};
  friend bool operator==(const Geometric&, const Geometric&) = default;
};
/// scale * base^e(n) with an increasing exponent rule e.
struct SuperGeometric {
  Rational base{1, 2};
  Polynomial exponent = Polynomial::monomial(2);
  Rational scale{1};
  friend bool operator==(const SuperGeometric&, const SuperGeometric&) = default;
};
/// scale / n!.
struct FactorialDecay {
  Rational scale{1};
  friend bool operator==(const FactorialDecay&, const FactorialDecay&) = default;
};
/// base ∪ factor * base.
struct Doubled {
  SpecPtr base;
  Rational factor{2};
  friend bool operator==(const Doubled& a, const Doubled& b);
};
struct Union {
  std::vector<SpecPtr> members;
  friend bool operator==(const Union& a, const Union& b);
};
/// Pointwise factor * base.
struct Rescaled {
  SpecPtr base;
  Rational factor{1};
  friend bool operator==(const Rescaled& a, const Rescaled& b);
};
/// Members of the two-scale family tau_n = 2^-p(n), tau*_n = 2^-m(n) tau_n with
/// m(n) = 1 + (valuation of n in partition_base); partition_base == 0 means m ≡ 1.
struct Prop28 {
  Prop28Member member = Prop28Member::both;
  Polynomial tau_exponent = Polynomial::monomial(3);
  unsigned partition_base = 2;
  friend bool operator==(const Prop28&, const Prop28&) = default;
};

}  // namespace spec

enum class SetKind {
  explicit_points,
  power_decay,
  geometric,
  super_geometric,
  factorial_decay,
  doubled,
  union_of,
  rescaled,
  prop28,
};

constexpr std::string_view to_string(SetKind k) noexcept {
  switch (k) {
    case SetKind::explicit_points: return "explicit";
    case SetKind::power_decay: return "power-decay";
    case SetKind::geometric: return "geometric";
    case SetKind::super_geometric: return "super-geometric";
    case SetKind::factorial_decay: return "factorial-decay";
    case SetKind::doubled: return "doubled";
    case SetKind::union_of: return "union";
    case SetKind::rescaled: return "rescaled";
    case SetKind::prop28: return "prop28";
  }
  return "unknown";
}

struct SetSpec {
  using Params = std::variant<spec::Explicit, spec::PowerDecay, spec::Geometric, spec::SuperGeometric,
                              spec::FactorialDecay, spec::Doubled, spec::Union, spec::Rescaled, spec::Prop28>;
  Params params;

  SetKind kind() const noexcept { return static_cast<SetKind>(params.index()); }

  friend bool operator==(const SetSpec& a, const SetSpec& b) { return a.params == b.params; }
};

namespace detail {
inline bool same(const SpecPtr& a, const SpecPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}
}  // namespace detail

namespace spec {
inline bool operator==(const Explicit& a, const Explicit& b) {
  return a.points == b.points && detail::same(a.tail, b.tail);
}
inline bool operator==(const Doubled& a, const Doubled& b) {
  return a.factor == b.factor && detail::same(a.base, b.base);
}
inline bool operator==(const Union& a, const Union& b) {
  return std::equal(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(), detail::same);
}
inline bool operator==(const Rescaled& a, const Rescaled& b) {
  return a.factor == b.factor && detail::same(a.base, b.base);
}
}  // namespace spec

template <class P>
SpecPtr make_spec(P params) {
  return std::make_shared<const SetSpec>(SetSpec{std::move(params)});
}

// Shorthand builders used throughout tests and constructions.
inline SpecPtr geometric_spec(Rational q, Rational scale = 1) {
  return make_spec(spec::Geometric{std::move(q), std::move(scale)});
}
inline SpecPtr super_geometric_spec(Polynomial e = Polynomial::monomial(2), Rational base = Rational(1, 2),
                                    Rational scale = 1) {
  return make_spec(spec::SuperGeometric{std::move(base), std::move(e), std::move(scale)});
}
inline SpecPtr factorial_spec(Rational scale = 1) { return make_spec(spec::FactorialDecay{std::move(scale)}); }
inline SpecPtr explicit_spec(std::vector<Rational> points, SpecPtr tail = nullptr) {
  return make_spec(spec::Explicit{std::move(points), std::move(tail)});
}
inline SpecPtr doubled_spec(SpecPtr base, Rational factor) {
  return make_spec(spec::Doubled{std::move(base), std::move(factor)});
}
inline SpecPtr union_spec(std::vector<SpecPtr> members) { return make_spec(spec::Union{std::move(members)}); }
inline SpecPtr rescaled_spec(SpecPtr base, Rational factor) {
  return make_spec(spec::Rescaled{std::move(base), std::move(factor)});
}
inline SpecPtr prop28_spec(Prop28Member member, Polynomial tau = Polynomial::monomial(3), unsigned base = 2) {
  return make_spec(spec::Prop28{member, std::move(tau), base});
}

/// 1 + (multiplicity of `base` in n); constant 1 when base == 0.
inline std::uint64_t partition_index(std::uint64_t n, unsigned base) {
  if (base < 2) return 1;
  std::uint64_t m = 1;
  while (n % base == 0) {
    n /= base;
    ++m;
  }
  return m;
}

/// Lazy decreasing stream of points; std::nullopt marks the end of a finite set.
using PointStream = std::function<std::optional<Rational>()>;

struct SetOptions {
  /// Cap on the bit length of any numerator/denominator produced by enumeration.
  std::size_t bit_budget = std::size_t{1} << 20;
  /// Number of leading points checked by make_set for positivity and strict decrease.
  std::size_t probe = 8;
};

/// Result of enumerate(): `complete` means the set ran out before `depth` points.
struct Enumeration {
  std::vector<Rational> points;
  bool complete = false;
};

class PorousSet {
 public:
  const SetSpec& spec() const noexcept { return *spec_; }
  const SpecPtr& spec_ptr() const noexcept { return spec_; }
  const SetOptions& options() const noexcept { return options_; }

  /// yes: 0 is isolated (finite set); no: the set accumulates at 0.
  Tri zero_isolated() const noexcept { return zero_isolated_; }

  /// Fresh stream positioned at the largest point. Streams never share state.
  PointStream stream() const;

 private:
  friend PorousSet make_set(SpecPtr spec, SetOptions options);
  PorousSet(SpecPtr spec, SetOptions options, Tri zero_isolated)
      : spec_(std::move(spec)), options_(options), zero_isolated_(zero_isolated) {}

  SpecPtr spec_;
  SetOptions options_;
  Tri zero_isolated_;
};

namespace detail {

inline PointStream stream_for(const SetSpec& s);

/// Merge of decreasing streams with duplicate elimination.
inline PointStream merge_streams(std::vector<PointStream> inputs) {
  struct State {
    std::vector<PointStream> in;
    std::vector<std::optional<Rational>> head;
  };
  auto st = std::make_shared<State>();
  st->in = std::move(inputs);
  for (auto& s : st->in) st->head.push_back(s());
  return [st]() -> std::optional<Rational> {
    std::optional<Rational> best;
    for (auto& h : st->head)
      if (h && (!best || *best < *h)) best = h;
    if (!best) return std::nullopt;
    for (std::size_t i = 0; i < st->head.size(); ++i)
      if (st->head[i] && *st->head[i] == *best) st->head[i] = st->in[i]();
    return best;
  };
}

inline PointStream indexed_stream(std::function<Rational(std::uint64_t)> rule) {
  return [rule = std::move(rule), n = std::uint64_t{0}]() mutable -> std::optional<Rational> {
    return rule(++n);
  };
}

inline PointStream stream_for(const SetSpec& s) {
  return std::visit(
      [](const auto& p) -> PointStream {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          auto pts = std::make_shared<std::vector<Rational>>(p.points);
          std::sort(pts->begin(), pts->end(), std::greater<>());
          pts->erase(std::unique(pts->begin(), pts->end()), pts->end());
          PointStream tail = p.tail ? stream_for(*p.tail) : PointStream{};
          return [pts, tail, i = std::size_t{0}]() mutable -> std::optional<Rational> {
            if (i < pts->size()) return (*pts)[i++];
            if (!tail) return std::nullopt;
            // Tail points are only the ones strictly below the explicit part.
            while (true) {
              auto v = tail();
              if (!v) return std::nullopt;
              if (pts->empty() || *v < pts->back()) return v;
            }
          };
        } else if constexpr (std::is_same_v<T, spec::PowerDecay>) {
          return indexed_stream([p](std::uint64_t n) {
            return p.scale / Rational::pow(Rational(static_cast<long>(n)), p.exponent);
          });
        } else if constexpr (std::is_same_v<T, spec::Geometric>) {
          // Incremental product keeps each step O(size).
          return [q = p.ratio, cur = p.scale]() mutable -> std::optional<Rational> {
            cur *= q;
            return cur;
          };
        } else if constexpr (std::is_same_v<T, spec::SuperGeometric>) {
          return indexed_stream([p](std::uint64_t n) { return p.scale * Rational::pow(p.base, p.exponent(n)); });
        } else if constexpr (std::is_same_v<T, spec::FactorialDecay>) {
          return [cur = p.scale, n = 0L]() mutable -> std::optional<Rational> {
            ++n;
            cur /= Rational(n);
            return cur;
          };
        } else if constexpr (std::is_same_v<T, spec::Doubled>) {
          std::vector<PointStream> in;
          in.push_back(stream_for(*p.base));
          in.push_back([base = stream_for(*p.base), c = p.factor]() mutable -> std::optional<Rational> {
            auto v = base();
            if (!v) return std::nullopt;
            return *v * c;
          });
          return merge_streams(std::move(in));
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          std::vector<PointStream> in;
          for (const auto& m : p.members) in.push_back(stream_for(*m));
          return merge_streams(std::move(in));
        } else if constexpr (std::is_same_v<T, spec::Rescaled>) {
          return [base = stream_for(*p.base), t = p.factor]() mutable -> std::optional<Rational> {
            auto v = base();
            if (!v) return std::nullopt;
            return *v * t;
          };
        } else {
          static_assert(std::is_same_v<T, spec::Prop28>);
          auto tau = [p](std::uint64_t n) { return Rational::pow2(-static_cast<long>(p.tau_exponent(n))); };
          auto star = [p, tau](std::uint64_t n) {
            return tau(n) * Rational::pow2(-static_cast<long>(partition_index(n, p.partition_base)));
          };
          switch (p.member) {
            case Prop28Member::tau: return indexed_stream(tau);
            case Prop28Member::star: return indexed_stream(star);
            case Prop28Member::both: break;
          }
          std::vector<PointStream> in;
          in.push_back(indexed_stream(tau));
          in.push_back(indexed_stream(star));
          return merge_streams(std::move(in));
        }
      },
      s.params);
}

inline Tri zero_isolated_of(const SetSpec& s) {
  return std::visit(
      [](const auto& p) -> Tri {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          return p.tail ? zero_isolated_of(*p.tail) : Tri::yes;
        } else if constexpr (std::is_same_v<T, spec::Doubled> || std::is_same_v<T, spec::Rescaled>) {
          return zero_isolated_of(*p.base);
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          bool all_yes = true;
          for (const auto& m : p.members) {
            Tri t = zero_isolated_of(*m);
            if (t == Tri::no) return Tri::no;
            if (t != Tri::yes) all_yes = false;
          }
          return all_yes ? Tri::yes : Tri::unknown;
        } else {
          return Tri::no;
        }
      },
      s.params);
}

inline void validate(const SetSpec& s) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        const auto bad = [](const std::string& what) { fail(ErrorCode::invalid_spec, what); };
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          for (const auto& x : p.points)
            if (x.sign() <= 0) bad("explicit points must be positive, got " + x.str());
          if (p.tail) validate(*p.tail);
        } else if constexpr (std::is_same_v<T, spec::PowerDecay>) {
          if (p.exponent == 0) bad("power-decay exponent must be >= 1");
          if (p.scale.sign() <= 0) bad("scale must be positive");
        } else if constexpr (std::is_same_v<T, spec::Geometric>) {
          if (p.ratio.sign() <= 0 || p.ratio >= Rational(1)) bad("geometric requires 0 < q < 1, got " + p.ratio.str());
          if (p.scale.sign() <= 0) bad("scale must be positive");
        } else if constexpr (std::is_same_v<T, spec::SuperGeometric>) {
          if (p.base.sign() <= 0 || p.base >= Rational(1)) bad("super-geometric base must lie in (0,1)");
          if (!p.exponent.strictly_increasing()) bad("exponent rule must be strictly increasing");
          if (p.scale.sign() <= 0) bad("scale must be positive");
        } else if constexpr (std::is_same_v<T, spec::FactorialDecay>) {
          if (p.scale.sign() <= 0) bad("scale must be positive");
        } else if constexpr (std::is_same_v<T, spec::Doubled>) {
          if (!p.base) bad("doubled needs a base");
          if (p.factor <= Rational(1)) bad("doubling factor must exceed 1");
          validate(*p.base);
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          if (p.members.empty()) bad("union needs at least one member");
          for (const auto& m : p.members) {
            if (!m) bad("null union member");
            validate(*m);
          }
        } else if constexpr (std::is_same_v<T, spec::Rescaled>) {
          if (!p.base) bad("rescaled needs a base");
          if (p.factor.sign() <= 0) bad("rescale factor must be positive");
          validate(*p.base);
        } else {
          if (!p.tau_exponent.strictly_increasing()) bad("tau exponent rule must be strictly increasing");
          if (p.partition_base == 1) bad("partition base must be 0 (constant) or >= 2");
        }
      },
      s.params);
}

}  // namespace detail

inline PointStream PorousSet::stream() const {
  auto inner = detail::stream_for(*spec_);
  return [inner = std::move(inner), budget = options_.bit_budget]() mutable -> std::optional<Rational> {
    auto v = inner();
    if (v && v->bits() > budget)
      fail(ErrorCode::bit_budget_exceeded,
           "point needs " + std::to_string(v->bits()) + " bits, budget is " + std::to_string(budget));
    return v;
  };
}

/// Validates `spec` and probes its leading points for positivity and strict decrease.
inline PorousSet make_set(SpecPtr spec, SetOptions options = {}) {
  require(spec != nullptr, ErrorCode::invalid_spec, "null spec");
  detail::validate(*spec);
  PorousSet set(spec, options, detail::zero_isolated_of(*spec));
  auto s = set.stream();
  std::optional<Rational> prev;
  for (std::size_t i = 0; i < options.probe; ++i) {
    auto v = s();
    if (!v) break;
    require(v->sign() > 0, ErrorCode::invalid_spec, "non-positive point " + v->str());
    require(!prev || *v < *prev, ErrorCode::invalid_spec, "enumeration is not strictly decreasing at " + v->str());
    prev = v;
  }
  return set;
}

/// First `depth` points in strictly decreasing order.
inline Enumeration enumerate(const PorousSet& set, std::size_t depth) {
  require(depth >= 1, ErrorCode::invalid_argument, "depth must be >= 1");
  Enumeration out;
  out.points.reserve(depth);
  auto s = set.stream();
  while (out.points.size() < depth) {
    auto v = s();
    if (!v) {
      out.complete = true;
      break;
    }
    out.points.push_back(std::move(*v));
  }
  return out;
}

/// Points down to and including the first point <= floor, capped at `max_points`.
inline Enumeration enumerate_down_to(const PorousSet& set, const Rational& floor, std::size_t max_points) {
  Enumeration out;
  auto s = set.stream();
  while (out.points.size() < max_points) {
    auto v = s();
    if (!v) {
      out.complete = true;
      break;
    }
    bool done = *v <= floor;
    out.points.push_back(std::move(*v));
    if (done) break;
  }
  return out;
}

/// The pointwise-scaled set t·E.
inline PorousSet rescale(const PorousSet& set, const Rational& t) {
  require(t.sign() > 0, ErrorCode::invalid_argument, "rescale factor must be positive");
  if (t == Rational(1)) return set;
  return make_set(rescaled_spec(set.spec_ptr(), t), set.options());
}

/// Sorted-merge union with duplicate elimination.
inline PorousSet set_union(const PorousSet& a, const PorousSet& b) {
  if (a.spec() == b.spec()) return a;
  SetOptions opt = a.options();
  opt.bit_budget = std::max(a.options().bit_budget, b.options().bit_budget);
  return make_set(union_spec({a.spec_ptr(), b.spec_ptr()}), opt);
}

/// yes for certified decay rules, no for finite sets that are exhausted within
/// `depth`, unknown for explicit lists longer than the analyzed depth.
inline Tri accumulates_at_zero(const SetSpec& s, std::size_t depth) {
  return std::visit(
      [depth](const auto& p) -> Tri {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          if (p.tail) return accumulates_at_zero(*p.tail, depth);
          return p.points.size() <= depth ? Tri::no : Tri::unknown;
        } else if constexpr (std::is_same_v<T, spec::Doubled> || std::is_same_v<T, spec::Rescaled>) {
          return accumulates_at_zero(*p.base, depth);
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          bool all_no = true;
          for (const auto& m : p.members) {
            Tri t = accumulates_at_zero(*m, depth);
            if (t == Tri::yes) return Tri::yes;
            if (t != Tri::no) all_no = false;
          }
          return all_no ? Tri::no : Tri::unknown;
        } else {
          return Tri::yes;
        }
      },
      s.params);
}

inline Tri accumulates_at_zero(const PorousSet& set, std::size_t depth) {
  require(depth >= 1, ErrorCode::invalid_argument, "depth must be >= 1");
  return accumulates_at_zero(set.spec(), depth);
}

}  // namespace porosity
