#include "specmorph/laurent.hpp"

#include <array>
#include <optional>
#include <variant>

#include "specmorph/error.hpp"

namespace specmorph {

Laurent Laurent::pow(std::int64_t e) const {
  if (e == 0) return Laurent(CRational(1));
  if (e < 0) {
    if (terms_.size() != 1)
      fail(ErrorKind::unsupported_shape,
           "negative power of a non-monomial polynomial");
    auto& [m, c] = *terms_.begin();
    Monomial inv;
    for (auto& [s, k] : m) inv[s] = -k;
    Laurent base;
    base.terms_.emplace(inv, CRational(1) / c);
    return base.pow(-e);
  }
  Laurent acc(CRational(1)), base = *this;
  std::int64_t n = e;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return acc;
}

Laurent Laurent::pow(const Rational& e) const {
  if (e.is_integer()) return pow(e.num());
  if (terms_.size() != 1)
    fail(ErrorKind::unsupported_shape,
         "fractional power of a non-monomial polynomial");
  auto& [m, c] = *terms_.begin();
  Monomial root;
  for (auto& [s, k] : m) {
    if (k % e.den() != 0)
      fail(ErrorKind::unsupported_shape,
           "fractional power with non-divisible exponent");
    root[s] = static_cast<int>(k / e.den() * e.num());
  }
  if (!c.is_real())
    fail(ErrorKind::unsupported_shape, "fractional power of complex coefficient");
  auto r = c.re.exact_root(e.den());
  if (!r)
    fail(ErrorKind::unsupported_shape,
         "fractional power without exact rational root");
  Laurent out;
  out.terms_.emplace(root, CRational(r->pow(e.num())));
  return out;
}

std::string Laurent::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) s += " + ";
    first = false;
    s += "(" + c.str() + ")";
    for (auto& [sym, e] : m) {
      s += "*" + sym.name;
      if (e != 1) s += "^" + std::to_string(e);
    }
  }
  return s;
}

Expr laurent_to_expr(const Laurent& l) {
  std::vector<Expr> terms;
  for (auto& [m, c] : l.terms()) {
    std::vector<Expr> fs;
    fs.push_back(Expr(c));
    for (auto& [s, e] : m) fs.push_back(Expr::pow(Expr(s), Rational(e)));
    terms.push_back(Expr::product(std::move(fs)));
  }
  return Expr::sum(std::move(terms));
}

TrigAngleVal pythagorean_point(int index) {
  static const std::pair<std::pair<int, int>, int> triples[] = {
      {{3, 4}, 5},    {{5, 12}, 13},  {{8, 15}, 17},  {{20, 21}, 29},
      {{7, 24}, 25},  {{9, 40}, 41},  {{12, 35}, 37}, {{11, 60}, 61},
      {{28, 45}, 53}, {{33, 56}, 65}, {{16, 63}, 65}, {{48, 55}, 73},
  };
  constexpr int n = sizeof(triples) / sizeof(triples[0]);
  auto& [legs, hyp] = triples[((index % n) + n) % n];
  return {Rational(legs.first, hyp), Rational(legs.second, hyp)};
}

HypAngleVal hyperbolic_point(int index) {
  // (sinh, cosh) = (p/r, q/r) with q^2 - p^2 = r^2.
  static const std::array<int, 3> triples[] = {
      {3, 5, 4},   {5, 13, 12},  {8, 17, 15},  {20, 29, 21},
      {7, 25, 24}, {9, 41, 40},  {12, 37, 35}, {28, 53, 45},
  };
  constexpr int n = sizeof(triples) / sizeof(triples[0]);
  auto& t = triples[((index % n) + n) % n];
  return {Rational(t[0], t[2]), Rational(t[1], t[2])};
}

TrigAngleVal trig_multiple(const TrigAngleVal& a, std::int64_t n) {
  if (n == 0) return {Rational(0), Rational(1)};
  if (n < 0) {
    TrigAngleVal p = trig_multiple(a, -n);
    return {-p.s, p.c};
  }
  TrigAngleVal acc{Rational(0), Rational(1)};
  for (std::int64_t i = 0; i < n; ++i)
    acc = {acc.s * a.c + acc.c * a.s, acc.c * a.c - acc.s * a.s};
  return acc;
}

HypAngleVal hyp_multiple(const HypAngleVal& a, std::int64_t n) {
  if (n == 0) return {Rational(0), Rational(1)};
  if (n < 0) {
    HypAngleVal p = hyp_multiple(a, -n);
    return {-p.sh, p.ch};
  }
  HypAngleVal acc{Rational(0), Rational(1)};
  for (std::int64_t i = 0; i < n; ++i)
    acc = {acc.sh * a.ch + acc.ch * a.sh, acc.ch * a.ch + acc.sh * a.sh};
  return acc;
}

namespace {

struct TrigVal {
  TrigAngleVal v;
};
struct HypVal {
  HypAngleVal v;
};
using EV = std::variant<Laurent, TrigVal, HypVal>;

Rational rational_of(const Laurent& l, const char* where) {
  if (!l.is_constant() || !l.constant_value().is_real())
    fail(ErrorKind::unsupported_shape,
         std::string("expected rational constant in ") + where);
  return l.constant_value().re;
}

EV ev(const Expr& e, const ExactContext& ctx);

EV ev_apply(Fn f, const EV& arg) {
  if (std::holds_alternative<TrigVal>(arg)) {
    auto& [s, c] = std::get<TrigVal>(arg).v;
    auto r = [&](Rational v) { return EV(Laurent(CRational(v))); };
    switch (f) {
      case Fn::sin: return r(s);
      case Fn::cos: return r(c);
      case Fn::tan: return r(s / c);
      case Fn::sec: return r(Rational(1) / c);
      case Fn::csc: return r(Rational(1) / s);
      case Fn::cot: return r(c / s);
      default:
        fail(ErrorKind::unsupported_shape,
             std::string(fn_name(f)) + " of a trigonometric angle binding");
    }
  }
  if (std::holds_alternative<HypVal>(arg)) {
    auto& [sh, ch] = std::get<HypVal>(arg).v;
    auto r = [&](Rational v) { return EV(Laurent(CRational(v))); };
    switch (f) {
      case Fn::sinh: return r(sh);
      case Fn::cosh: return r(ch);
      case Fn::tanh: return r(sh / ch);
      case Fn::sech: return r(Rational(1) / ch);
      case Fn::csch: return r(Rational(1) / sh);
      case Fn::coth: return r(ch / sh);
      default:
        fail(ErrorKind::unsupported_shape,
             std::string(fn_name(f)) + " of a hyperbolic angle binding");
    }
  }
  // Plain rational argument: only inverse-function results that stay within
  // the rational-angle families are representable.
  Rational u = rational_of(std::get<Laurent>(arg), fn_name(f));
  if (f == Fn::arctanh) {
    // arctanh u is the hyperbolic angle with tanh = u; rational iff
    // sqrt(1-u^2) is rational.
    Rational w = Rational(1) - u * u;
    if (w.sign() <= 0)
      fail(ErrorKind::domain_error, "arctanh out of (-1,1)");
    auto root = w.exact_root(2);
    if (!root)
      fail(ErrorKind::unsupported_shape, "arctanh without exact sqrt(1-u^2)");
    return EV(HypVal{{u / *root, Rational(1) / *root}});
  }
  if (f == Fn::arccos) {
    Rational w = Rational(1) - u * u;
    if (w.sign() < 0) fail(ErrorKind::domain_error, "arccos out of [-1,1]");
    auto root = w.exact_root(2);
    if (!root)
      fail(ErrorKind::unsupported_shape, "arccos without exact sqrt(1-u^2)");
    return EV(TrigVal{{*root, u}});  // principal branch: sin >= 0
  }
  fail(ErrorKind::unsupported_shape,
       std::string(fn_name(f)) + " of a non-angle rational argument");
}

EV ev(const Expr& e, const ExactContext& ctx) {
  using Kind = Expr::Kind;
  switch (e.kind()) {
    case Kind::constant:
      return Laurent(e.constant_value());
    case Kind::symbol: {
      const Symbol& s = e.node().sym;
      if (auto it = ctx.pinned.find(s); it != ctx.pinned.end())
        return Laurent(CRational(it->second));
      if (ctx.indeterminates.count(s)) return Laurent::atom(s);
      if (auto it = ctx.trig_angles.find(s); it != ctx.trig_angles.end())
        return TrigVal{it->second};
      if (auto it = ctx.hyp_angles.find(s); it != ctx.hyp_angles.end())
        return HypVal{it->second};
      fail(ErrorKind::unbound_symbol, s.name + " in exact evaluation");
    }
    case Kind::sum: {
      Laurent acc;
      for (const Expr& k : e.node().kids) {
        EV v = ev(k, ctx);
        if (!std::holds_alternative<Laurent>(v))
          fail(ErrorKind::unsupported_shape, "angle used additively");
        acc = acc + std::get<Laurent>(v);
      }
      return acc;
    }
    case Kind::product: {
      Laurent acc(CRational(1));
      std::optional<EV> angle;
      for (const Expr& k : e.node().kids) {
        EV v = ev(k, ctx);
        if (std::holds_alternative<Laurent>(v)) {
          acc = acc * std::get<Laurent>(v);
        } else if (!angle) {
          angle = v;
        } else {
          fail(ErrorKind::unsupported_shape, "product of two angle bindings");
        }
      }
      if (!angle) return acc;
      Rational k = rational_of(acc, "angle scaling");
      if (!k.is_integer())
        fail(ErrorKind::unsupported_shape,
             "non-integer multiple of an angle binding");
      if (std::holds_alternative<TrigVal>(*angle))
        return TrigVal{trig_multiple(std::get<TrigVal>(*angle).v, k.num())};
      return HypVal{hyp_multiple(std::get<HypVal>(*angle).v, k.num())};
    }
    case Kind::power: {
      EV b = ev(e.node().kids[0], ctx);
      if (!std::holds_alternative<Laurent>(b))
        fail(ErrorKind::unsupported_shape, "power of an angle binding");
      return std::get<Laurent>(b).pow(e.node().exponent);
    }
    case Kind::apply:
      return ev_apply(e.node().fn, ev(e.node().kids[0], ctx));
  }
  fail(ErrorKind::unsupported_shape, "malformed expression");
}

}  // namespace

Laurent exact_eval(const Expr& e, const ExactContext& ctx) {
  EV v = ev(e, ctx);
  if (!std::holds_alternative<Laurent>(v))
    fail(ErrorKind::unsupported_shape, "expression evaluates to a bare angle");
  return std::get<Laurent>(v);
}

}  // namespace specmorph
