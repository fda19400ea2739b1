#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "porosity/error.hpp"

namespace porosity {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value type over GMP's mpq_class. Every quantity in the library
/// (set points, gap endpoints, ratios, porosity estimates) is one of these;
/// nothing in the core is ever rounded.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : q_(static_cast<long>(value)) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den) {
    require(den != 0, ErrorCode::invalid_argument, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  Rational(mpz_class num, mpz_class den) {
    require(den != 0, ErrorCode::invalid_argument, "zero denominator");
    q_ = mpq_class(std::move(num), std::move(den));
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Parses "p", "p/q" or "-p/q" (decimal integers only).
  static Rational parse(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    auto valid_int = [](const std::string& part) {
      if (part.empty()) return false;
      std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
      if (i == part.size()) return false;
      for (; i < part.size(); ++i)
        if (part[i] < '0' || part[i] > '9') return false;
      return true;
    };
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!num.empty() && num[0] == '+') num.erase(0, 1);
    require(valid_int(num) && valid_int(den) && den[0] != '-', ErrorCode::invalid_argument,
            "malformed rational '" + s + "'");
    mpz_class n(num, 10), d(den, 10);
    require(d != 0, ErrorCode::invalid_argument, "zero denominator in '" + s + "'");
    return Rational(std::move(n), std::move(d));
  }

  /// 2^e for any signed exponent.
  static Rational pow2(long e) {
    mpz_class one = 1;
    mpz_class p;
    mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
    return e < 0 ? Rational(mpz_class(1), p) : Rational(p, mpz_class(1));
  }

  /// base^e for a non-negative integer exponent.
  static Rational pow(const Rational& base, unsigned long e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.q_.get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), base.q_.get_den_mpz_t(), e);
    return Rational(std::move(n), std::move(d));
  }

  const mpq_class& raw() const noexcept { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  /// Bit length of the larger of |numerator| and denominator.
  std::size_t bits() const {
    std::size_t n = q_.get_num() == 0 ? 0 : mpz_sizeinbase(q_.get_num_mpz_t(), 2);
    std::size_t d = mpz_sizeinbase(q_.get_den_mpz_t(), 2);
    return n > d ? n : d;
  }

  int sign() const noexcept { return sgn(q_); }
  bool is_zero() const noexcept { return sign() == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  /// Canonical text: "p" for integers, "p/q" otherwise.
  std::string str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  double to_double() const { return q_.get_d(); }

  /// Floor of log2 of a positive value.
  long floor_log2() const {
    require(sign() > 0, ErrorCode::invalid_argument, "log2 of non-positive value");
    long e = static_cast<long>(mpz_sizeinbase(q_.get_num_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(q_.get_den_mpz_t(), 2));
    // 2^(e-1) < num/den < 2^(e+1); settle which side of 2^e we are on.
    if (*this < pow2(e)) --e;
    return e;
  }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    require(!o.is_zero(), ErrorCode::invalid_argument, "division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Simplest rational (smallest denominator, then smallest numerator) in the
/// closed interval [lo, hi], 0 <= lo <= hi. Stern-Brocot descent via continued fractions.
inline Rational simplest_between(const Rational& lo, const Rational& hi) {
  require(lo.sign() >= 0 && lo <= hi, ErrorCode::invalid_argument, "bad interval");
  if (lo.is_zero()) return Rational(0);
  // Recursive continued-fraction construction on [lo, hi].
  struct Frac { mpz_class n, d; };
  auto rec = [](auto&& self, mpz_class ln, mpz_class ld, mpz_class hn, mpz_class hd) -> Frac {
    mpz_class fl = ln / ld;  // floor for positive values
    if (fl * ld == ln) return {fl, 1};  // lo itself is an integer
    if ((fl + 1) * hd <= hn) return {fl + 1, 1};  // an integer fits in (lo, hi]
    // Both in (fl, fl+1): recurse on reciprocals of fractional parts (order flips).
    mpz_class lrn = ln - fl * ld;  // lo - fl = lrn / ld
    mpz_class hrn = hn - fl * hd;  // hi - fl = hrn / hd
    Frac sub = self(self, hd, hrn, ld, lrn);
    return {fl * sub.n + sub.d, sub.n};
  };
  Frac f = rec(rec, lo.numerator(), lo.denominator(), hi.numerator(), hi.denominator());
  return Rational(f.n, f.d);
}

/// A rational that may also be +infinity (for quantities such as C(tau) or rho_low
/// that are infinite on degenerate inputs).
class Extended {
 public:
  Extended() : value_(Rational(0)) {}
  Extended(Rational v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  static Extended infinity() { Extended e; e.value_.reset(); return e; }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  bool is_finite() const noexcept { return value_.has_value(); }
  const Rational& value() const {
    require(is_finite(), ErrorCode::invalid_argument, "infinite value has no rational form");
    return *value_;
  }
  std::string str() const { return is_finite() ? value_->str() : "inf"; }
  static Extended parse(std::string_view s) {
    if (s == "inf") return infinity();
    return Extended(Rational::parse(s));
  }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
    return *a.value_ == *b.value_;
  }
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.is_infinite()) return b.is_infinite() ? std::strong_ordering::equal : std::strong_ordering::greater;
    if (b.is_infinite()) return std::strong_ordering::less;
    return *a.value_ <=> *b.value_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Extended& e) { return os << e.str(); }

 private:
  std::optional<Rational> value_;
};

}  // namespace porosity
