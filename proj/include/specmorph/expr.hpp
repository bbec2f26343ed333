#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specmorph/rational.hpp"

namespace specmorph {

enum class SymbolKind { variable, parameter };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::parameter;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.name == b.name;
  }
  friend auto operator<=>(const Symbol& a, const Symbol& b) {
    return a.name <=> b.name;
  }
};

inline Symbol variable(std::string name) {
  return Symbol{std::move(name), SymbolKind::variable};
}
inline Symbol parameter(std::string name) {
  return Symbol{std::move(name), SymbolKind::parameter};
}

// Function family closed under differentiation; sqrt enters as pow(e, 1/2).
enum class Fn {
  sin, cos, tan, sec, csc, cot,
  sinh, cosh, tanh, sech, csch, coth,
  exp, log, arccos, arctanh,
};

const char* fn_name(Fn f);

// Immutable symbolic expression over exact Gaussian-rational constants.
// Construction runs light local simplification: constant folding, flattening
// of nested sums/products, like-term and like-factor merging, x^0 -> 1,
// 1*e -> e, 0+e -> e. No distribution, no trig rewriting.
class Expr {
 public:
  enum class Kind { constant, symbol, sum, product, power, apply };

  struct Node {
    Kind kind;
    CRational value;          // constant
    Symbol sym;               // symbol
    std::vector<Expr> kids;   // sum/product members; power/apply argument
    Rational exponent;        // power
    Fn fn = Fn::sin;          // apply
  };

  Expr() : Expr(CRational(0)) {}
  explicit Expr(CRational c);
  Expr(std::int64_t n) : Expr(CRational(n)) {}
  explicit Expr(const Rational& r) : Expr(CRational(r)) {}
  explicit Expr(Symbol s);

  static Expr imaginary_unit() { return Expr(CRational::i()); }

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  bool is_constant() const { return node_->kind == Kind::constant; }
  bool is_zero() const { return is_constant() && node_->value.is_zero(); }
  bool is_one() const { return is_constant() && node_->value.is_one(); }
  const CRational& constant_value() const { return node_->value; }

  // Smart constructors (normalizing).
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr pow(Expr base, Rational exponent);
  static Expr apply_fn(Fn f, Expr arg);

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) {
    return sum({a, product({Expr(-1), b})});
  }
  friend Expr operator-(const Expr& a) { return product({Expr(-1), a}); }
  friend Expr operator*(const Expr& a, const Expr& b) {
    return product({a, b});
  }
  friend Expr operator/(const Expr& a, const Expr& b) {
    return product({a, pow(b, Rational(-1))});
  }

  // Total structural order after normalization; 0 means structurally equal.
  static int compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) {
    return compare(a, b) == 0;
  }

  using Bindings = std::map<Symbol, double>;

  // Numeric evaluation; throws UnboundSymbol / DomainError.
  std::complex<double> eval(const Bindings& bindings) const;
  // Real evaluation; DomainError if the value has a nonvanishing imaginary part.
  double eval_real(const Bindings& bindings) const;

  Expr derivative(const Symbol& var) const;
  Expr substitute(const Symbol& s, const Expr& replacement) const;
  Expr conj() const;

  void collect_symbols(std::set<Symbol>& out) const;
  std::set<Symbol> free_symbols() const;
  bool depends_on(const Symbol& s) const;

  std::string str() const;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Node n);

  std::shared_ptr<const Node> node_;
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const {
    return Expr::compare(a, b) < 0;
  }
};

// Convenience builders.
inline Expr sym(const Symbol& s) { return Expr(s); }
inline Expr rat(std::int64_t n, std::int64_t d) { return Expr(Rational(n, d)); }
Expr sqrt_of(const Expr& e);

struct Interval {
  double lo = 0, hi = 1;
  double margin = -1;  // <0: default 0.02*(hi-lo)
  double effective_margin() const {
    return margin >= 0 ? margin : 0.02 * (hi - lo);
  }
};

using Box = std::vector<std::pair<Symbol, Interval>>;

struct EqOptions {
  std::uint64_t seed = 1;
  int samples = 32;
  double atol = 1e-10;
  double rtol = 1e-9;
};

struct EqReport {
  bool equal = false;
  double max_residual = 0;
  Expr::Bindings worst_point;
  std::complex<double> worst_lhs{0, 0}, worst_rhs{0, 0};
  int valid_samples = 0;
  std::uint64_t seed = 0;
};

// Seeded randomized point-sampling equality oracle. Samples the box
// uniformly (skipping points where either side is singular) and accepts iff
// |e1-e2| <= atol + rtol*max(|e1|,|e2|) everywhere. DomainError when no
// valid sample points exist.
EqReport numerically_equal(const Expr& e1, const Expr& e2, const Box& box,
                           const EqOptions& opts = {});

}  // namespace specmorph
