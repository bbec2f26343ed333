#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "specmorph/expr.hpp"
#include "specmorph/laurent.hpp"
#include "specmorph/parse.hpp"

using namespace specmorph;

namespace {

const Symbol x = variable("x");
const Symbol th = variable("theta");
const Symbol a = parameter("a");
const Symbol c = parameter("c");

Expr fn(Fn f, const Expr& e) { return Expr::apply_fn(f, e); }

// f(r) = (1/a) arctanh(cos 2ar), the point-canonical transformation function
// used throughout the pipeline tests.
Expr arctanh_cos(const Symbol& var) {
  return Expr::pow(Expr(a), Rational(-1)) *
         fn(Fn::arctanh, fn(Fn::cos, Expr(2) * Expr(a) * Expr(var)));
}

// Fourth-order central difference; the independent oracle for derivatives.
double central_diff(const Expr& e, const Symbol& var, Expr::Bindings pt,
                    double h) {
  auto at = [&](double v) {
    pt[var] = v;
    return e.eval_real(pt);
  };
  double x0 = pt.at(var);
  return (-at(x0 + 2 * h) + 8 * at(x0 + h) - 8 * at(x0 - h) + at(x0 - 2 * h)) /
         (12 * h);
}

}  // namespace

TEST_CASE("eval basics") {
  Expr e = fn(Fn::cos, Expr(2) * Expr(a) * Expr(x));
  CHECK(e.eval_real({{a, 1.0}, {x, 0.0}}) == doctest::Approx(1.0));

  Expr f = arctanh_cos(x);
  CHECK(f.eval_real({{a, 1.0}, {x, M_PI / 4}}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Expr pole = fn(Fn::csc, Expr(2) * Expr(a) * Expr(x));
  CHECK_THROWS_AS(pole.eval({{a, 1.0}, {x, 0.0}}), Error);

  CHECK_THROWS_AS(e.eval({{a, 1.0}}), Error);  // x unbound
}

TEST_CASE("derivative of the pipeline transformation function is -2 csc 2ar") {
  Expr fp = arctanh_cos(x).derivative(x);
  Expr expected = Expr(-2) * fn(Fn::csc, Expr(2) * Expr(a) * Expr(x));
  Box box = {{x, {0.05, M_PI / 2 - 0.05}}, {a, {0.8, 1.2}}};
  auto rep = numerically_equal(fp, expected, box, {.seed = 11});
  CHECK(rep.equal);
}

TEST_CASE("trivial derivatives") {
  CHECK(Expr(x).derivative(x) == Expr(1));
  CHECK(Expr(a).derivative(x) == Expr(0));
  CHECK_THROWS_AS(Expr(x).derivative(a), Error);  // a is a parameter
}

TEST_CASE("derivative of sech(a theta) against finite differences") {
  Expr e = fn(Fn::sech, Expr(a) * Expr(th));
  Expr de = e.derivative(th);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    Expr::Bindings pt{{a, 1.3}, {th, dist(rng)}};
    double sym = de.eval_real(pt);
    double num = central_diff(e, th, pt, 1e-3);
    CHECK(std::abs(sym - num) <= 1e-8 * std::max(1.0, std::abs(num)));
  }
}

TEST_CASE("every elementary function derivative matches finite differences") {
  struct Probe {
    Fn f;
    double lo, hi;
  };
  const Probe probes[] = {
      {Fn::sin, -1.2, 1.2},   {Fn::cos, -1.2, 1.2},   {Fn::tan, -0.6, 0.6},
      {Fn::sec, -0.6, 0.6},   {Fn::csc, 0.4, 1.2},    {Fn::cot, 0.4, 1.2},
      {Fn::sinh, -1.2, 1.2},  {Fn::cosh, -1.2, 1.2},  {Fn::tanh, -1.2, 1.2},
      {Fn::sech, -1.2, 1.2},  {Fn::csch, 0.4, 1.2},   {Fn::coth, 0.4, 1.2},
      {Fn::exp, -1.0, 1.0},   {Fn::log, 0.5, 2.0},    {Fn::arccos, -0.8, 0.8},
      {Fn::arctanh, -0.8, 0.8}};
  std::mt19937_64 rng(42);
  for (const auto& p : probes) {
    Expr e = fn(p.f, Expr(x));
    Expr de = e.derivative(x);
    std::uniform_real_distribution<double> dist(p.lo, p.hi);
    for (int i = 0; i < 5; ++i) {
      Expr::Bindings pt{{x, dist(rng)}};
      double sym = de.eval_real(pt);
      double num = central_diff(e, x, pt, 1e-4);
      CHECK(std::abs(sym - num) <=
            1e-6 * std::max(1.0, std::abs(num)));
    }
  }
}

TEST_CASE("substitution") {
  // Composition defining the first transformed operator's coefficients.
  Symbol r = variable("r");
  Expr body = Expr::pow(fn(Fn::csch, Expr(a) * Expr(r)), Rational(2));
  Expr composed = body.substitute(r, arctanh_cos(th));
  CHECK(composed.depends_on(th));
  CHECK(!composed.depends_on(r));
  // csch^2(arctanh(cos 2a theta)) = (1 - cos^2)/cos^2 = tan^2(2a theta).
  Expr expected = Expr::pow(fn(Fn::tan, Expr(2) * Expr(a) * Expr(th)), Rational(2));
  Box box = {{th, {0.05, M_PI / 4 - 0.05}}, {a, {0.9, 1.1}}};
  CHECK(numerically_equal(composed, expected, box, {.seed = 3}).equal);

  CHECK(Expr(x).substitute(x, Expr(x)) == Expr(x));
  Expr s = fn(Fn::sin, Expr(x)) + Expr(c);
  CHECK(s.substitute(x, Expr(0)) == Expr(c));  // sin 0 folds to 0
}

TEST_CASE("substitute(e, s, s) is the structural identity") {
  std::vector<Expr> samples = {
      arctanh_cos(x),
      Expr::pow(Expr(1) - Expr(x) * Expr(x), Rational(-1, 2)),
      fn(Fn::exp, Expr(x)) * fn(Fn::cot, Expr(a) * Expr(x)) + Expr(5),
  };
  for (const Expr& e : samples) CHECK(e.substitute(x, Expr(x)) == e);
}

TEST_CASE("numerically_equal identities") {
  Expr u = fn(Fn::cos, Expr(2) * Expr(th));  // a = 1 variant
  Expr lhs = Expr::pow(fn(Fn::csch, fn(Fn::arctanh, u)), Rational(2));
  Expr rhs = (Expr(1) - u * u) * Expr::pow(u * u, Rational(-1));
  Box box = {{th, {0.05, M_PI / 4 - 0.05}}};
  CHECK(numerically_equal(lhs, rhs, box, {.seed = 5}).equal);

  Expr pyth = Expr::pow(fn(Fn::sin, Expr(x)), Rational(2)) +
              Expr::pow(fn(Fn::cos, Expr(x)), Rational(2));
  CHECK(numerically_equal(pyth, Expr(1), {{x, {0.0, 6.0}}}, {.seed = 5}).equal);

  auto rep = numerically_equal(fn(Fn::sin, Expr(x)), fn(Fn::cos, Expr(x)),
                               {{x, {0.0, 1.0}}}, {.seed = 5});
  CHECK(!rep.equal);
  CHECK(rep.max_residual > 0.01);
}

TEST_CASE("numerically_equal is symmetric and reflexive for a fixed seed") {
  Expr e1 = fn(Fn::tanh, Expr(x)) * fn(Fn::exp, Expr(x));
  Expr e2 = fn(Fn::sinh, Expr(x)) / fn(Fn::cosh, Expr(x)) * fn(Fn::exp, Expr(x));
  Box box = {{x, {-2.0, 2.0}}};
  EqOptions o{.seed = 17};
  CHECK(numerically_equal(e1, e1, box, o).equal);
  auto ab = numerically_equal(e1, e2, box, o);
  auto ba = numerically_equal(e2, e1, box, o);
  CHECK(ab.equal == ba.equal);
  CHECK(ab.max_residual == doctest::Approx(ba.max_residual));
}

TEST_CASE("simplification keeps canonical forms") {
  CHECK(Expr(x) + Expr(x) == Expr(2) * Expr(x));
  CHECK(Expr(x) - Expr(x) == Expr(0));
  CHECK(Expr(x) * Expr::pow(Expr(x), Rational(-1)) == Expr(1));
  CHECK(Expr::pow(Expr(x), Rational(0)) == Expr(1));
  CHECK(Expr(1) * Expr(x) == Expr(x));
  CHECK(Expr(0) + Expr(x) == Expr(x));
  CHECK(Expr::pow(Expr::pow(Expr(x), Rational(1, 2)), Rational(2)) == Expr(x));
  CHECK(Expr::pow(Expr(4), Rational(1, 2)) == Expr(2));
  CHECK(sqrt_of(Expr(2)) * sqrt_of(Expr(2)) == Expr(2));
  // Like-factor merging across a product.
  Expr s = fn(Fn::sin, Expr(x));
  CHECK(Expr::pow(s, Rational(-1, 2)) * s * Expr::pow(s, Rational(-1, 2)) ==
        Expr(1));
}

TEST_CASE("parser round trips") {
  SymbolTable tab;
  tab.declare_variable("x");
  tab.declare_variable("theta");
  std::vector<Expr> samples = {
      arctanh_cos(x),
      Expr::imaginary_unit() * Expr(a) + rat(3, 7),
      Expr::pow(fn(Fn::sin, Expr(2) * Expr(a) * Expr(th)), Rational(-1, 2)),
      Expr(CRational(Rational(2, 3), Rational(-1, 5))),
  };
  for (const Expr& e : samples) {
    Expr back = parse_expr(e.str(), tab);
    CHECK(back == e);
  }
  CHECK(parse_expr("(mul 2 a x)", tab) == Expr(2) * Expr(a) * Expr(x));
  CHECK(parse_expr("(sqrt (mul x x))", tab) ==
        Expr::pow(Expr(x) * Expr(x), Rational(1, 2)));
  CHECK_THROWS_AS(parse_expr("(bogus 1)", tab), Error);
  CHECK_THROWS_AS(parse_expr("(add", tab), Error);
}

TEST_CASE("exact evaluation at rational trig points") {
  for (int i = 0; i < 6; ++i) {
    auto p = pythagorean_point(i);
    CHECK(p.s * p.s + p.c * p.c == Rational(1));
    auto d = trig_multiple(p, 2);
    CHECK(d.s == Rational(2) * p.s * p.c);
    CHECK(d.c == p.c * p.c - p.s * p.s);
    auto h = hyperbolic_point(i);
    CHECK(h.ch * h.ch - h.sh * h.sh == Rational(1));
  }

  Symbol t = variable("t");
  ExactContext ctx;
  ctx.trig_angles[t] = pythagorean_point(0);
  ctx.indeterminates.insert(a);

  // csc^2(2t) - cot^2(2t) = 1, exactly.
  Expr e = Expr::pow(fn(Fn::csc, Expr(2) * Expr(t)), Rational(2)) -
           Expr::pow(fn(Fn::cot, Expr(2) * Expr(t)), Rational(2));
  CHECK(exact_eval(e, ctx) == Laurent(CRational(1)));

  // A parameter-dependent combination stays a Laurent polynomial in a.
  Expr f = Expr(a) * fn(Fn::sin, Expr(t)) +
           Expr::pow(Expr(a), Rational(-1)) * fn(Fn::cos, Expr(t));
  Laurent l = exact_eval(f, ctx);
  CHECK(l.terms().size() == 2);

  // tanh(arctanh(cos 2t)) collapses to cos 2t.
  Expr g = fn(Fn::tanh, fn(Fn::arctanh, fn(Fn::cos, Expr(2) * Expr(t))));
  auto d2 = trig_multiple(pythagorean_point(0), 2);
  CHECK(exact_eval(g, ctx) == Laurent(CRational(d2.c)));

  // sech(arctanh(cos 2t)) = sin 2t via the exact hyperbolic-angle binding.
  Expr h = fn(Fn::sech, fn(Fn::arctanh, fn(Fn::cos, Expr(2) * Expr(t))));
  CHECK(exact_eval(h, ctx) == Laurent(CRational(d2.s)));
}

TEST_CASE("laurent arithmetic") {
  Symbol m = parameter("mu");
  Laurent mu = Laurent::atom(m);
  Laurent inv = mu.pow(-1);
  CHECK(mu * inv == Laurent(CRational(1)));
  CHECK((mu + Laurent(CRational(1))) * (mu - Laurent(CRational(1))) ==
        mu * mu - Laurent(CRational(1)));
  CHECK((mu * mu).pow(Rational(1, 2)) == mu);
  CHECK_THROWS_AS((mu + Laurent(CRational(1))).pow(-1), Error);
  Expr back = laurent_to_expr(mu * mu + Laurent(CRational(Rational(1, 2))));
  CHECK(back == Expr(m) * Expr(m) + rat(1, 2));
}
