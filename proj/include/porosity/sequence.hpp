#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "porosity/error.hpp"
#include "porosity/rational.hpp"

namespace porosity {

enum class SequenceSource { set_enumeration, user_supplied, chain_endpoints };

constexpr std::string_view to_string(SequenceSource s) noexcept {
  switch (s) {
    case SequenceSource::set_enumeration: return "from-set-enumeration";
    case SequenceSource::user_supplied: return "user-supplied";
    case SequenceSource::chain_endpoints: return "derived-chain-endpoints";
  }
  return "unknown";
}

/// Finite prefix of a sequence of positive rationals, optionally with the closed-form
/// rule (1-based index -> value) that extends it.
struct TruncatedSequence {
  using Rule = std::function<Rational(std::size_t)>;

  std::vector<Rational> values;
  Rule rule;
  SequenceSource source = SequenceSource::user_supplied;

  static TruncatedSequence from_rule(Rule r, std::size_t length, SequenceSource src = SequenceSource::user_supplied) {
    TruncatedSequence s;
    s.values.reserve(length);
    for (std::size_t n = 1; n <= length; ++n) s.values.push_back(r(n));
    s.rule = std::move(r);
    s.source = src;
    return s;
  }

  std::size_t size() const noexcept { return values.size(); }
  const Rational& operator[](std::size_t i) const { return values[i]; }

  /// The first `length` terms, computed from the rule where the stored prefix is short.
  TruncatedSequence prefix(std::size_t length) const {
    TruncatedSequence out;
    out.rule = rule;
    out.source = source;
    if (length <= values.size()) {
      out.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(length));
      return out;
    }
    require(static_cast<bool>(rule), ErrorCode::length_mismatch,
            "sequence has " + std::to_string(values.size()) + " terms and no rule to reach " + std::to_string(length));
    out.values = values;
    for (std::size_t n = values.size() + 1; n <= length; ++n) out.values.push_back(rule(n));
    return out;
  }

  bool strictly_positive() const {
    for (const auto& v : values)
      if (v.sign() <= 0) return false;
    return true;
  }

  /// Largest 1-based index n with values[n] > values[n-1] (an increase), if any.
  /// "Almost decreasing" on the prefix means no such index in the deep half.
  std::optional<std::size_t> last_increase() const {
    std::optional<std::size_t> at;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i - 1] < values[i]) at = i + 1;
    return at;
  }
};

/// Inclusive 0-based index range [first, last] of the deep half of a prefix of length n.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

inline IndexRange deep_half(std::size_t n) {
  require(n >= 1, ErrorCode::invalid_argument, "empty window");
  return {n / 2, n - 1};
}

}  // namespace porosity
