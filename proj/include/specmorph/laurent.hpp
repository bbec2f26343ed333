#pragma once

#include <map>
#include <set>
#include <string>

#include "specmorph/expr.hpp"

namespace specmorph {

// Sparse multivariate Laurent polynomial over Gaussian rationals. Used by the
// exact-evaluation path: coefficients extracted from operator pipelines stay
// polynomial in the physical parameters (with negative powers of mu, a, ...),
// so equality claims can be settled in exact arithmetic.
class Laurent {
 public:
  using Monomial = std::map<Symbol, int>;  // exponent per indeterminate

  Laurent() = default;
  explicit Laurent(CRational c) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }
  static Laurent atom(const Symbol& s, int power = 1) {
    Laurent l;
    l.terms_.emplace(Monomial{{s, power}}, CRational(1));
    return l;
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  bool is_monomial() const { return terms_.size() == 1; }
  CRational constant_value() const {
    if (terms_.empty()) return CRational(0);
    return terms_.begin()->second;
  }
  const std::map<Monomial, CRational>& terms() const { return terms_; }

  friend Laurent operator-(const Laurent& a) {
    Laurent r;
    for (auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend Laurent operator+(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    for (auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Laurent operator-(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    for (auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent r;
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) {
        Monomial m = ma;
        for (auto& [s, e] : mb) {
          int& v = m[s];
          v += e;
          if (v == 0) m.erase(s);
        }
        r.add_term(m, ca * cb);
      }
    return r;
  }
  friend bool operator==(const Laurent& a, const Laurent& b) {
    return a.terms_ == b.terms_;
  }

  // Integer powers; negative powers require a single-monomial value.
  Laurent pow(std::int64_t e) const;
  // Rational powers; requires a monomial with divisible exponents and a
  // coefficient admitting an exact root.
  Laurent pow(const Rational& e) const;

  std::string str() const;

 private:
  void add_term(const Monomial& m, const CRational& c) {
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  std::map<Monomial, CRational> terms_;
};

Expr laurent_to_expr(const Laurent& l);

// Exact values of an angle presented through rational sine/cosine (or
// hyperbolic sine/cosine); the family of points with s^2 + c^2 = 1 exactly.
struct TrigAngleVal {
  Rational s, c;
};
struct HypAngleVal {
  Rational sh, ch;
};

TrigAngleVal pythagorean_point(int index);
HypAngleVal hyperbolic_point(int index);
TrigAngleVal trig_multiple(const TrigAngleVal& a, std::int64_t n);
HypAngleVal hyp_multiple(const HypAngleVal& a, std::int64_t n);

// Context for exact evaluation: every free symbol must be pinned to a
// rational, declared an indeterminate, or bound as an angle whose trig
// (resp. hyperbolic) values are rational. Function applications collapse to
// rationals through the angle bindings; anything outside the supported shape
// throws UnsupportedShape.
struct ExactContext {
  std::map<Symbol, Rational> pinned;
  std::set<Symbol> indeterminates;
  std::map<Symbol, TrigAngleVal> trig_angles;
  std::map<Symbol, HypAngleVal> hyp_angles;
};

Laurent exact_eval(const Expr& e, const ExactContext& ctx);

}  // namespace specmorph
