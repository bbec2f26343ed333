#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "specmorph/error.hpp"

namespace specmorph {

// Exact rational on 64-bit numerator/denominator, normalized (gcd 1, den > 0).
// Products and sums go through 128-bit intermediates; anything that cannot be
// renormalized back into 64 bits throws Overflow rather than wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator-(const Rational& a) {
    Rational r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    using W = __int128;
    return from_wide(W(a.num_) * b.den_ + W(b.num_) * a.den_,
                     W(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    using W = __int128;
    return from_wide(W(a.num_) * b.num_, W(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) fail(ErrorKind::domain_error, "rational division by zero");
    using W = __int128;
    return from_wide(W(a.num_) * b.den_, W(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    using W = __int128;
    W lhs = W(a.num_) * b.den_;
    W rhs = W(b.num_) * a.den_;
    return lhs < rhs ? std::strong_ordering::less
                     : (lhs > rhs ? std::strong_ordering::greater
                                  : std::strong_ordering::equal);
  }

  Rational pow(std::int64_t e) const {
    if (e == 0) {
      if (num_ == 0) fail(ErrorKind::domain_error, "0^0");
      return Rational(1);
    }
    Rational base = e > 0 ? *this : Rational(1) / *this;
    std::int64_t n = e > 0 ? e : -e;
    Rational acc(1);
    while (n > 0) {
      if (n & 1) acc *= base;
      base = (n >>= 1) ? base * base : base;
    }
    return acc;
  }

  // Exact k-th root when numerator and denominator are perfect k-th powers.
  std::optional<Rational> exact_root(std::int64_t k) const {
    if (k <= 0) return std::nullopt;
    if (k == 1) return *this;
    if (num_ < 0 && k % 2 == 0) return std::nullopt;
    auto iroot = [](std::int64_t v, std::int64_t k) -> std::optional<std::int64_t> {
      if (v < 0) {
        auto r = Rational(-v).exact_root(k);  // k odd here
        if (!r) return std::nullopt;
        return -r->num();
      }
      if (v <= 1) return v;
      std::int64_t lo = 1, hi = 1;
      while (true) {
        __int128 p = 1;
        for (std::int64_t i = 0; i < k && p <= v; ++i) p *= (hi + 1);
        if (p > v) break;
        hi = hi * 2 + 1;
        if (hi > 3037000499LL) { hi = 3037000499LL; break; }
      }
      while (lo <= hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        __int128 p = 1;
        bool over = false;
        for (std::int64_t i = 0; i < k; ++i) {
          p *= mid;
          if (p > v) { over = true; break; }
        }
        if (!over && p == v) return mid;
        if (over || p > v) hi = mid - 1;
        else lo = mid + 1;
      }
      return std::nullopt;
    };
    auto rn = iroot(num_, k);
    auto rd = iroot(den_, k);
    if (!rn || !rd) return std::nullopt;
    return Rational(*rn, *rd);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) fail(ErrorKind::domain_error, "rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    num_ = n;
    den_ = d;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) fail(ErrorKind::domain_error, "rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    constexpr __int128 lim = __int128(INT64_MAX);
    if (n > lim || n < -lim || d > lim)
      fail(ErrorKind::overflow, "rational exceeds 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_, den_;
};

// Gaussian rational: exact complex scalar re + i*im.
struct CRational {
  Rational re, im;

  CRational() = default;
  CRational(Rational r) : re(r) {}
  CRational(std::int64_t n) : re(n) {}
  CRational(Rational r, Rational i) : re(r), im(i) {}

  static CRational i() { return CRational(Rational(0), Rational(1)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_one() const { return re.is_one() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }

  CRational conj() const { return CRational(re, -im); }

  std::complex<double> to_complex() const {
    return {re.to_double(), im.to_double()};
  }

  friend CRational operator-(const CRational& a) {
    return CRational(-a.re, -a.im);
  }
  friend CRational operator+(const CRational& a, const CRational& b) {
    return CRational(a.re + b.re, a.im + b.im);
  }
  friend CRational operator-(const CRational& a, const CRational& b) {
    return CRational(a.re - b.re, a.im - b.im);
  }
  friend CRational operator*(const CRational& a, const CRational& b) {
    return CRational(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend CRational operator/(const CRational& a, const CRational& b) {
    Rational n2 = b.re * b.re + b.im * b.im;
    if (n2.is_zero()) fail(ErrorKind::domain_error, "complex division by zero");
    CRational num = a * b.conj();
    return CRational(num.re / n2, num.im / n2);
  }
  CRational& operator+=(const CRational& b) { return *this = *this + b; }
  CRational& operator-=(const CRational& b) { return *this = *this - b; }
  CRational& operator*=(const CRational& b) { return *this = *this * b; }

  friend bool operator==(const CRational& a, const CRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  CRational pow(std::int64_t e) const {
    if (e < 0) return CRational(1) / this->pow(-e);
    CRational acc(1), base = *this;
    std::int64_t n = e;
    while (n > 0) {
      if (n & 1) acc = acc * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return acc;
  }

  std::string str() const {
    if (im.is_zero()) return re.str();
    if (re.is_zero()) return im.str() + "*i";
    return re.str() + (im.sign() >= 0 ? "+" : "") + im.str() + "*i";
  }
};

}  // namespace specmorph
