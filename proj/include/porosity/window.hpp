#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "porosity/rational.hpp"
#include "porosity/set_model.hpp"

namespace porosity {

/// Decreasing prefix of a set with order queries. `complete` means the set ends here.
class Window {
 public:
  Window() = default;
  Window(std::vector<Rational> points, bool complete) : points_(std::move(points)), complete_(complete) {}
  explicit Window(Enumeration e) : Window(std::move(e.points), e.complete) {}

  /// Enumerates until a point <= floor appears (or the set ends).
  static Window down_to(const PorousSet& set, const Rational& floor, std::size_t max_points = std::size_t{1} << 16) {
    return Window(enumerate_down_to(set, floor, max_points));
  }

  const std::vector<Rational>& points() const noexcept { return points_; }
  bool complete() const noexcept { return complete_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Rational& operator[](std::size_t i) const { return points_[i]; }

  /// True when every point of the set that is >= x is in the window.
  bool covers(const Rational& x) const { return complete_ || (!points_.empty() && points_.back() <= x); }

  bool contains(const Rational& x) const {
    return std::binary_search(points_.begin(), points_.end(), x, std::greater<>());
  }
  std::optional<std::size_t> index_of(const Rational& x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x, std::greater<>());
    if (it == points_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - points_.begin());
  }

  /// Smallest point strictly greater than x.
  std::optional<Rational> smallest_above(const Rational& x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x, std::greater<>());  // first <= x
    if (it == points_.begin()) return std::nullopt;
    return *(it - 1);
  }
  /// Largest point strictly less than x.
  std::optional<Rational> largest_below(const Rational& x) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), x, std::greater<>());  // first < x
    if (it == points_.end()) return std::nullopt;
    return *it;
  }
  /// Some point strictly inside (a, b), the smallest one if any.
  std::optional<Rational> point_in_open(const Rational& a, const Rational& b) const {
    auto p = smallest_above(a);
    if (p && *p < b) return p;
    return std::nullopt;
  }

 private:
  std::vector<Rational> points_;
  bool complete_ = false;
};

}  // namespace porosity
