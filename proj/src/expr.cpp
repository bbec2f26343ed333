#include "specmorph/expr.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "specmorph/error.hpp"

namespace specmorph {

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::tan: return "tan";
    case Fn::sec: return "sec";
    case Fn::csc: return "csc";
    case Fn::cot: return "cot";
    case Fn::sinh: return "sinh";
    case Fn::cosh: return "cosh";
    case Fn::tanh: return "tanh";
    case Fn::sech: return "sech";
    case Fn::csch: return "csch";
    case Fn::coth: return "coth";
    case Fn::exp: return "exp";
    case Fn::log: return "log";
    case Fn::arccos: return "arccos";
    case Fn::arctanh: return "arctanh";
  }
  return "?";
}

Expr Expr::make(Node n) {
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Expr(CRational c) {
  Node n;
  n.kind = Kind::constant;
  n.value = c;
  node_ = std::make_shared<const Node>(std::move(n));
}

Expr::Expr(Symbol s) {
  Node n;
  n.kind = Kind::symbol;
  n.sym = std::move(s);
  node_ = std::make_shared<const Node>(std::move(n));
}

namespace {

int kind_rank(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::constant: return 0;
    case Expr::Kind::symbol: return 1;
    case Expr::Kind::apply: return 2;
    case Expr::Kind::power: return 3;
    case Expr::Kind::product: return 4;
    case Expr::Kind::sum: return 5;
  }
  return 6;
}

int cmp_rational(const Rational& a, const Rational& b) {
  auto o = a <=> b;
  return o < 0 ? -1 : (o > 0 ? 1 : 0);
}

int cmp_crational(const CRational& a, const CRational& b) {
  if (int c = cmp_rational(a.re, b.re)) return c;
  return cmp_rational(a.im, b.im);
}

}  // namespace

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_.get() == b.node_.get()) return 0;
  const Node& x = a.node();
  const Node& y = b.node();
  if (int c = kind_rank(x.kind) - kind_rank(y.kind)) return c < 0 ? -1 : 1;
  switch (x.kind) {
    case Kind::constant:
      return cmp_crational(x.value, y.value);
    case Kind::symbol:
      return x.sym.name.compare(y.sym.name) < 0
                 ? -1
                 : (x.sym.name == y.sym.name ? 0 : 1);
    case Kind::apply: {
      if (x.fn != y.fn) return static_cast<int>(x.fn) < static_cast<int>(y.fn) ? -1 : 1;
      return compare(x.kids[0], y.kids[0]);
    }
    case Kind::power: {
      if (int c = compare(x.kids[0], y.kids[0])) return c;
      return cmp_rational(x.exponent, y.exponent);
    }
    case Kind::product:
    case Kind::sum: {
      size_t n = std::min(x.kids.size(), y.kids.size());
      for (size_t i = 0; i < n; ++i)
        if (int c = compare(x.kids[i], y.kids[i])) return c;
      if (x.kids.size() != y.kids.size())
        return x.kids.size() < y.kids.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Smart constructors

namespace {

// Split a normalized term into (constant coefficient, residual factor list).
void split_term(const Expr& t, CRational& coeff, std::vector<Expr>& rest) {
  if (t.kind() == Expr::Kind::constant) {
    coeff = t.constant_value();
    return;
  }
  if (t.kind() == Expr::Kind::product) {
    for (const Expr& f : t.node().kids) {
      if (f.kind() == Expr::Kind::constant)
        coeff = coeff * f.constant_value();
      else
        rest.push_back(f);
    }
    return;
  }
  rest.push_back(t);
}

Expr rebuild_term(const CRational& coeff, std::vector<Expr> rest) {
  if (coeff.is_zero()) return Expr(0);
  if (rest.empty()) return Expr(coeff);
  if (coeff.is_one() && rest.size() == 1) return rest[0];
  std::vector<Expr> fs;
  if (!coeff.is_one()) fs.push_back(Expr(coeff));
  for (auto& r : rest) fs.push_back(std::move(r));
  if (fs.size() == 1) return fs[0];
  // Factors are already normalized and sorted; assemble a raw product node.
  std::sort(fs.begin(), fs.end(),
            [](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; });
  return Expr::product(std::move(fs));
}

}  // namespace

Expr Expr::sum(std::vector<Expr> terms) {
  // Flatten.
  std::vector<Expr> flat;
  for (auto& t : terms) {
    if (t.kind() == Kind::sum)
      for (const Expr& k : t.node().kids) flat.push_back(k);
    else
      flat.push_back(std::move(t));
  }
  // Merge like terms by residual-product key.
  CRational cacc(0);
  std::map<Expr, CRational, ExprLess> groups;
  std::vector<Expr> order;  // residuals in first-seen order (sorted later)
  for (const Expr& t : flat) {
    CRational c(1);
    std::vector<Expr> rest;
    split_term(t, c, rest);
    if (rest.empty()) {
      cacc += c;
      continue;
    }
    Expr key = rest.size() == 1 ? rest[0] : rebuild_term(CRational(1), rest);
    auto [it, fresh] = groups.emplace(key, c);
    if (!fresh) it->second += c;
  }
  std::vector<Expr> out;
  for (auto& [key, c] : groups) {
    if (c.is_zero()) continue;
    if (c.is_one())
      out.push_back(key);
    else if (key.kind() == Kind::product) {
      std::vector<Expr> fs = key.node().kids;
      fs.push_back(Expr(c));
      std::sort(fs.begin(), fs.end(), [](const Expr& a, const Expr& b) {
        return compare(a, b) < 0;
      });
      Node n;
      n.kind = Kind::product;
      n.kids = std::move(fs);
      out.push_back(make(std::move(n)));
    } else {
      Node n;
      n.kind = Kind::product;
      n.kids = {Expr(c), key};
      out.push_back(make(std::move(n)));
    }
  }
  if (!cacc.is_zero()) out.insert(out.begin(), Expr(cacc));
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  Node n;
  n.kind = Kind::sum;
  n.kids = std::move(out);
  return make(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  // Flatten, including integer powers of products.
  std::vector<std::pair<Expr, Rational>> flat;  // (base, exponent)
  CRational cacc(1);
  auto push = [&](const Expr& f, Rational e, auto&& self) -> void {
    if (f.kind() == Kind::constant) {
      const CRational& v = f.constant_value();
      if (e.is_integer()) {
        cacc = cacc * v.pow(e.num());
        return;
      }
      if (v.is_real()) {
        // Try an exact rational root; otherwise keep symbolic.
        if (v.re.sign() >= 0) {
          if (auto root = v.re.exact_root(e.den())) {
            cacc = cacc * CRational(root->pow(e.num()));
            return;
          }
        }
      }
      flat.emplace_back(f, e);
      return;
    }
    if (f.kind() == Kind::product) {
      if (e.is_integer()) {
        for (const Expr& k : f.node().kids) self(k, e, self);
        return;
      }
      flat.emplace_back(f, e);
      return;
    }
    if (f.kind() == Kind::power) {
      self(f.node().kids[0], f.node().exponent * e, self);
      return;
    }
    flat.emplace_back(f, e);
  };
  for (const Expr& f : factors) push(f, Rational(1), push);
  if (cacc.is_zero()) return Expr(0);
  // Merge equal bases.
  std::map<Expr, Rational, ExprLess> bases;
  for (auto& [b, e] : flat) {
    auto [it, fresh] = bases.emplace(b, e);
    if (!fresh) it->second += e;
  }
  std::vector<Expr> out;
  for (auto& [b, e] : bases) {
    if (e.is_zero()) continue;
    if (e.is_one()) {
      out.push_back(b);
      continue;
    }
    if (b.kind() == Kind::constant && e.is_integer()) {
      cacc = cacc * b.constant_value().pow(e.num());
      continue;
    }
    Node n;
    n.kind = Kind::power;
    n.kids = {b};
    n.exponent = e;
    out.push_back(make(std::move(n)));
  }
  if (out.empty()) return Expr(cacc);
  if (!cacc.is_one()) out.push_back(Expr(cacc));
  if (out.size() == 1) return out[0];
  std::sort(out.begin(), out.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  Node n;
  n.kind = Kind::product;
  n.kids = std::move(out);
  return make(std::move(n));
}

Expr Expr::pow(Expr base, Rational exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  return product({make([&] {
    Node n;
    n.kind = Kind::power;
    n.kids = {std::move(base)};
    n.exponent = exponent;
    return n;
  }())});
}

Expr Expr::apply_fn(Fn f, Expr arg) {
  if (arg.is_constant() && arg.constant_value().is_real()) {
    const Rational& v = arg.constant_value().re;
    if (v.is_zero()) {
      switch (f) {
        case Fn::sin: case Fn::tan: case Fn::sinh: case Fn::tanh:
        case Fn::arctanh:
          return Expr(0);
        case Fn::cos: case Fn::sec: case Fn::cosh: case Fn::sech:
        case Fn::exp:
          return Expr(1);
        default:
          break;
      }
    }
    if (v.is_one()) {
      if (f == Fn::log || f == Fn::arccos) return Expr(0);
    }
  }
  Node n;
  n.kind = Kind::apply;
  n.fn = f;
  n.kids = {std::move(arg)};
  return make(std::move(n));
}

Expr sqrt_of(const Expr& e) { return Expr::pow(e, Rational(1, 2)); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

constexpr double kImagTol = 1e-9;

double require_real(const std::complex<double>& z, const char* where) {
  if (std::abs(z.imag()) > kImagTol * (1.0 + std::abs(z.real())))
    fail(ErrorKind::domain_error,
         std::string("complex argument to real ") + where);
  return z.real();
}

double checked(double v, const char* where) {
  if (!std::isfinite(v))
    fail(ErrorKind::domain_error, std::string("singular value in ") + where);
  return v;
}

double eval_fn(Fn f, double x) {
  switch (f) {
    case Fn::sin: return std::sin(x);
    case Fn::cos: return std::cos(x);
    case Fn::tan: return checked(std::tan(x), "tan");
    case Fn::sec: return checked(1.0 / std::cos(x), "sec");
    case Fn::csc: return checked(1.0 / std::sin(x), "csc");
    case Fn::cot: return checked(std::cos(x) / std::sin(x), "cot");
    case Fn::sinh: return checked(std::sinh(x), "sinh");
    case Fn::cosh: return checked(std::cosh(x), "cosh");
    case Fn::tanh: return std::tanh(x);
    case Fn::sech: return 1.0 / std::cosh(x);
    case Fn::csch: return checked(1.0 / std::sinh(x), "csch");
    case Fn::coth: return checked(std::cosh(x) / std::sinh(x), "coth");
    case Fn::exp: return checked(std::exp(x), "exp");
    case Fn::log:
      if (x <= 0) fail(ErrorKind::domain_error, "log of nonpositive value");
      return std::log(x);
    case Fn::arccos:
      if (x < -1 || x > 1) fail(ErrorKind::domain_error, "arccos out of [-1,1]");
      return std::acos(x);
    case Fn::arctanh:
      if (x <= -1 || x >= 1)
        fail(ErrorKind::domain_error, "arctanh out of (-1,1)");
      return std::atanh(x);
  }
  fail(ErrorKind::domain_error, "unknown function");
}

std::complex<double> eval_pow(const std::complex<double>& b, const Rational& e) {
  if (e.is_integer()) {
    std::int64_t n = e.num();
    if (b == std::complex<double>(0, 0)) {
      if (n > 0) return {0, 0};
      fail(ErrorKind::domain_error, "zero base with nonpositive exponent");
    }
    std::complex<double> acc(1, 0), base = b;
    std::int64_t k = n < 0 ? -n : n;
    while (k > 0) {
      if (k & 1) acc *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return n < 0 ? 1.0 / acc : acc;
  }
  double x = e.to_double();
  if (std::abs(b.imag()) <= kImagTol * (1.0 + std::abs(b.real()))) {
    double r = b.real();
    if (r > 0) return {std::pow(r, x), 0};
    if (r == 0) {
      if (x > 0) return {0, 0};
      fail(ErrorKind::domain_error, "zero base with negative exponent");
    }
    // Negative real base: exact only for odd denominators.
    if (e.den() % 2 == 1) {
      double mag = std::pow(-r, x);
      return {(e.num() % 2 == 0) ? mag : -mag, 0};
    }
    fail(ErrorKind::domain_error, "negative base with even-root exponent");
  }
  return std::pow(b, std::complex<double>(x, 0));
}

}  // namespace

std::complex<double> Expr::eval(const Bindings& bindings) const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::constant:
      return n.value.to_complex();
    case Kind::symbol: {
      auto it = bindings.find(n.sym);
      if (it == bindings.end())
        fail(ErrorKind::unbound_symbol, n.sym.name);
      return {it->second, 0};
    }
    case Kind::sum: {
      std::complex<double> acc(0, 0);
      for (const Expr& k : n.kids) acc += k.eval(bindings);
      return acc;
    }
    case Kind::product: {
      std::complex<double> acc(1, 0);
      for (const Expr& k : n.kids) acc *= k.eval(bindings);
      return acc;
    }
    case Kind::power:
      return eval_pow(n.kids[0].eval(bindings), n.exponent);
    case Kind::apply: {
      double x = require_real(n.kids[0].eval(bindings), fn_name(n.fn));
      return {eval_fn(n.fn, x), 0};
    }
  }
  fail(ErrorKind::domain_error, "malformed expression");
}

double Expr::eval_real(const Bindings& bindings) const {
  return require_real(eval(bindings), "expression");
}

// ---------------------------------------------------------------------------
// Differentiation

Expr Expr::derivative(const Symbol& var) const {
  if (var.kind != SymbolKind::variable)
    fail(ErrorKind::domain_error,
         "derivative with respect to non-variable symbol " + var.name);
  const Node& n = node();
  switch (n.kind) {
    case Kind::constant:
      return Expr(0);
    case Kind::symbol:
      return n.sym == var ? Expr(1) : Expr(0);
    case Kind::sum: {
      std::vector<Expr> parts;
      for (const Expr& k : n.kids) parts.push_back(k.derivative(var));
      return sum(std::move(parts));
    }
    case Kind::product: {
      std::vector<Expr> parts;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        std::vector<Expr> fs = n.kids;
        fs[i] = n.kids[i].derivative(var);
        parts.push_back(product(std::move(fs)));
      }
      return sum(std::move(parts));
    }
    case Kind::power: {
      const Expr& b = n.kids[0];
      return product({Expr(n.exponent), pow(b, n.exponent - Rational(1)),
                      b.derivative(var)});
    }
    case Kind::apply: {
      const Expr& u = n.kids[0];
      Expr du = u.derivative(var);
      if (du.is_zero()) return Expr(0);
      Expr g = [&]() -> Expr {
        switch (n.fn) {
          case Fn::sin: return apply_fn(Fn::cos, u);
          case Fn::cos: return -apply_fn(Fn::sin, u);
          case Fn::tan: return pow(apply_fn(Fn::sec, u), Rational(2));
          case Fn::sec:
            return apply_fn(Fn::sec, u) * apply_fn(Fn::tan, u);
          case Fn::csc:
            return -(apply_fn(Fn::csc, u) * apply_fn(Fn::cot, u));
          case Fn::cot: return -pow(apply_fn(Fn::csc, u), Rational(2));
          case Fn::sinh: return apply_fn(Fn::cosh, u);
          case Fn::cosh: return apply_fn(Fn::sinh, u);
          case Fn::tanh: return pow(apply_fn(Fn::sech, u), Rational(2));
          case Fn::sech:
            return -(apply_fn(Fn::sech, u) * apply_fn(Fn::tanh, u));
          case Fn::csch:
            return -(apply_fn(Fn::csch, u) * apply_fn(Fn::coth, u));
          case Fn::coth: return -pow(apply_fn(Fn::csch, u), Rational(2));
          case Fn::exp: return apply_fn(Fn::exp, u);
          case Fn::log: return pow(u, Rational(-1));
          case Fn::arccos:
            return -pow(Expr(1) - u * u, Rational(-1, 2));
          case Fn::arctanh:
            return pow(Expr(1) - u * u, Rational(-1));
        }
        fail(ErrorKind::domain_error, "unknown function");
      }();
      return g * du;
    }
  }
  fail(ErrorKind::domain_error, "malformed expression");
}

// ---------------------------------------------------------------------------
// Substitution and related traversals

Expr Expr::substitute(const Symbol& s, const Expr& replacement) const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::constant:
      return *this;
    case Kind::symbol:
      return n.sym == s ? replacement : *this;
    case Kind::sum:
    case Kind::product: {
      std::vector<Expr> kids;
      bool changed = false;
      for (const Expr& k : n.kids) {
        kids.push_back(k.substitute(s, replacement));
        changed = changed || compare(kids.back(), k) != 0;
      }
      if (!changed) return *this;
      return n.kind == Kind::sum ? sum(std::move(kids))
                                 : product(std::move(kids));
    }
    case Kind::power: {
      Expr b = n.kids[0].substitute(s, replacement);
      if (compare(b, n.kids[0]) == 0) return *this;
      return pow(std::move(b), n.exponent);
    }
    case Kind::apply: {
      Expr a = n.kids[0].substitute(s, replacement);
      if (compare(a, n.kids[0]) == 0) return *this;
      return apply_fn(n.fn, std::move(a));
    }
  }
  return *this;
}

Expr Expr::conj() const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::constant:
      return Expr(n.value.conj());
    case Kind::symbol:
      return *this;  // symbols are real-valued
    case Kind::sum:
    case Kind::product: {
      std::vector<Expr> kids;
      for (const Expr& k : n.kids) kids.push_back(k.conj());
      return n.kind == Kind::sum ? sum(std::move(kids))
                                 : product(std::move(kids));
    }
    case Kind::power:
      return pow(n.kids[0].conj(), n.exponent);
    case Kind::apply:
      return apply_fn(n.fn, n.kids[0].conj());
  }
  return *this;
}

void Expr::collect_symbols(std::set<Symbol>& out) const {
  const Node& n = node();
  if (n.kind == Kind::symbol) {
    out.insert(n.sym);
    return;
  }
  for (const Expr& k : n.kids) k.collect_symbols(out);
}

std::set<Symbol> Expr::free_symbols() const {
  std::set<Symbol> out;
  collect_symbols(out);
  return out;
}

bool Expr::depends_on(const Symbol& s) const {
  const Node& n = node();
  if (n.kind == Kind::symbol) return n.sym == s;
  for (const Expr& k : n.kids)
    if (k.depends_on(s)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Serialization (fully parenthesized prefix form)

namespace {

std::string rat_str(const Rational& r) {
  if (r.is_integer()) return std::to_string(r.num());
  return "(rat " + std::to_string(r.num()) + " " + std::to_string(r.den()) + ")";
}

std::string crat_str(const CRational& c) {
  if (c.is_real()) return rat_str(c.re);
  if (c.re.is_zero() && c.im.is_one()) return "i";
  return "(cplx " + rat_str(c.re) + " " + rat_str(c.im) + ")";
}

}  // namespace

std::string Expr::str() const {
  const Node& n = node();
  switch (n.kind) {
    case Kind::constant:
      return crat_str(n.value);
    case Kind::symbol:
      return n.sym.name;
    case Kind::sum:
    case Kind::product: {
      std::string s = n.kind == Kind::sum ? "(add" : "(mul";
      for (const Expr& k : n.kids) s += " " + k.str();
      return s + ")";
    }
    case Kind::power:
      return "(pow " + n.kids[0].str() + " " + rat_str(n.exponent) + ")";
    case Kind::apply:
      return "(" + std::string(fn_name(n.fn)) + " " + n.kids[0].str() + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Randomized equality oracle

EqReport numerically_equal(const Expr& e1, const Expr& e2, const Box& box,
                           const EqOptions& opts) {
  EqReport rep;
  rep.seed = opts.seed;
  std::mt19937_64 rng(opts.seed);
  std::vector<std::uniform_real_distribution<double>> dists;
  dists.reserve(box.size());
  for (const auto& [s, iv] : box) {
    double m = iv.effective_margin();
    double lo = iv.lo + m, hi = iv.hi - m;
    if (!(lo < hi))
      fail(ErrorKind::domain_error,
           "empty sampling interval for " + s.name);
    dists.emplace_back(lo, hi);
  }
  int attempts = 0, max_attempts = opts.samples * 8;
  rep.equal = true;
  while (rep.valid_samples < opts.samples && attempts < max_attempts) {
    ++attempts;
    Expr::Bindings pt;
    for (size_t i = 0; i < box.size(); ++i)
      pt[box[i].first] = dists[i](rng);
    std::complex<double> a, b;
    try {
      a = e1.eval(pt);
      b = e2.eval(pt);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::domain_error) continue;  // singular point
      throw;
    }
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) ||
        !std::isfinite(b.real()) || !std::isfinite(b.imag()))
      continue;
    ++rep.valid_samples;
    double resid = std::abs(a - b);
    double tol = opts.atol + opts.rtol * std::max(std::abs(a), std::abs(b));
    if (resid > rep.max_residual) {
      rep.max_residual = resid;
      rep.worst_point = pt;
      rep.worst_lhs = a;
      rep.worst_rhs = b;
    }
    if (resid > tol) rep.equal = false;
  }
  if (rep.valid_samples == 0)
    fail(ErrorKind::domain_error, "no valid sample points in domain");
  return rep;
}

}  // namespace specmorph
