#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "specmorph/diffop.hpp"

using namespace specmorph;

namespace {

const Symbol x = variable("x");
const Symbol th = variable("theta");
const Symbol phi = variable("phi");
const Symbol psi = variable("psi");
const Symbol hb = parameter("hbar");
const Symbol l = parameter("l");
const Symbol m = parameter("m");

Expr fn(Fn f, const Expr& e) { return Expr::apply_fn(f, e); }
const Expr I = Expr::imaginary_unit();

// Pool of smooth coefficient expressions for randomized operator checks.
Expr random_coeff(std::mt19937_64& rng, const Symbol& v) {
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_int_distribution<int> small(1, 3);
  switch (pick(rng)) {
    case 0: return Expr(small(rng));
    case 1: return Expr(v);
    case 2: return Expr(v) * Expr(v) + Expr(small(rng));
    case 3: return fn(Fn::sin, Expr(small(rng)) * Expr(v));
    default: return fn(Fn::exp, Expr(v) * rat(1, 2));
  }
}

DiffOp random_first_order(std::mt19937_64& rng, const Symbol& v) {
  DiffOp op({v});
  op.add_term({1}, random_coeff(rng, v));
  op.add_term({0}, random_coeff(rng, v));
  return op;
}

// Simpson quadrature for complex-valued integrands.
template <typename F>
std::complex<double> simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  std::complex<double> acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

}  // namespace

TEST_CASE("apply basics") {
  DiffOp d = DiffOp::partial(th, {th});
  CHECK(d.apply(fn(Fn::sin, Expr(th))) == fn(Fn::cos, Expr(th)));

  // Momentum acting on the separable phase e^{i(l phi + m psi)}.
  DiffOp p = DiffOp::momentum(psi, {phi, psi}, Expr(hb));
  Expr phase = fn(Fn::exp, I * (Expr(l) * Expr(phi) + Expr(m) * Expr(psi)));
  CHECK(p.apply(phase) == Expr(hb) * Expr(m) * phase);

  DiffOp id = DiffOp::identity({th});
  Expr f = fn(Fn::tanh, Expr(th)) + Expr(2);
  CHECK(id.apply(f) == f);
}

TEST_CASE("compose basics") {
  DiffOp d = DiffOp::partial(x, {x});
  DiffOp mx = DiffOp::multiplication(Expr(x), {x});
  DiffOp c = compose(d, mx);
  CHECK(c.coefficient({1}) == Expr(x));
  CHECK(c.coefficient({0}) == Expr(1));

  CHECK(compose(c, DiffOp::identity({x})).terms() == c.terms());

  // g d(1/g) = d - g'/g, cross-checked through apply on test functions.
  Expr g = fn(Fn::exp, Expr(x));
  DiffOp sim = compose(DiffOp::multiplication(g, {x}),
                       compose(d, DiffOp::multiplication(Expr(1) / g, {x})));
  DiffOp expected = d + DiffOp::multiplication(Expr(-1), {x});
  std::mt19937_64 rng(9);
  for (int i = 0; i < 5; ++i) {
    Expr f = random_coeff(rng, x) * fn(Fn::sin, Expr(x));
    Box box = {{x, {-1.0, 1.0}}};
    CHECK(numerically_equal(sim.apply(f), expected.apply(f), box, {.seed = 21})
              .equal);
  }
}

TEST_CASE("composition is associative and compatible with apply") {
  std::mt19937_64 rng(31);
  Box box = {{x, {0.2, 1.4}}};
  for (int i = 0; i < 6; ++i) {
    DiffOp A = random_first_order(rng, x);
    DiffOp B = random_first_order(rng, x);
    DiffOp C = random_first_order(rng, x);
    Expr f = fn(Fn::sin, Expr(2) * Expr(x)) + Expr(x) * Expr(x);
    CHECK(numerically_equal(compose(A, B).apply(f), A.apply(B.apply(f)), box,
                            {.seed = 77 + static_cast<std::uint64_t>(i)})
              .equal);
    auto r = op_equal(compose(compose(A, B), C), compose(A, compose(B, C)),
                      box, {.seed = 99 + static_cast<std::uint64_t>(i)});
    CHECK(r.equal);
  }
}

TEST_CASE("commutator basics") {
  DiffOp d = DiffOp::partial(th, {th});
  DiffOp mth = DiffOp::multiplication(Expr(th), {th});
  DiffOp c = commutator(d, mth);
  CHECK(c.terms().size() == 1);
  CHECK(c.coefficient({0}) == Expr(1));
}

TEST_CASE("commutator antisymmetry and Jacobi identity") {
  std::mt19937_64 rng(5);
  Box box = {{x, {0.3, 1.2}}};
  for (int i = 0; i < 6; ++i) {
    DiffOp A = random_first_order(rng, x);
    DiffOp B = random_first_order(rng, x);
    DiffOp C = random_first_order(rng, x);
    CHECK(op_equal(commutator(A, B), commutator(B, A).scaled(Expr(-1)), box,
                   {.seed = 13 + static_cast<std::uint64_t>(i)})
              .equal);
    DiffOp jac = commutator(A, commutator(B, C)) +
                 commutator(B, commutator(C, A)) +
                 commutator(C, commutator(A, B));
    auto rep = op_equal(jac, DiffOp::zero({x}), box, {.seed = 17 + static_cast<std::uint64_t>(i)});
    CHECK(rep.equal);
  }
}

TEST_CASE("adjoint basics") {
  Measure flat{x, Expr(1), 1.0};
  DiffOp d = DiffOp::partial(x, {x});
  DiffOp dd = adjoint(d, flat);
  CHECK(dd.coefficient({1}) == Expr(-1));
  CHECK(dd.coefficient({0}) == Expr(0));

  DiffOp idx = DiffOp::partial(x, {x}, 1, I);
  DiffOp idxd = adjoint(idx, flat);
  CHECK(idxd.coefficient({1}) == I);

  Expr V = fn(Fn::sech, Expr(x));
  DiffOp mV = DiffOp::multiplication(V, {x});
  CHECK(adjoint(mV, flat).coefficient({0}) == V);
}

TEST_CASE("adjoint is an involution, including non-flat measures") {
  Measure mu{x, fn(Fn::cosh, Expr(x)), 1.0};
  std::mt19937_64 rng(23);
  Box box = {{x, {0.2, 1.5}}};
  for (int i = 0; i < 4; ++i) {
    DiffOp A = random_first_order(rng, x);
    auto rep = op_equal(adjoint(adjoint(A, mu), mu), A, box, {.seed = 41 + static_cast<std::uint64_t>(i)});
    CHECK(rep.equal);
  }
}

TEST_CASE("momentum is symmetric on compactly supported functions") {
  // <phi,(i d)psi> = <(i d)phi,psi> with windows vanishing at the endpoints.
  DiffOp op = DiffOp::partial(x, {x}, 1, I);
  Expr window = Expr::pow(Expr(1) - Expr(x) * Expr(x), Rational(2));
  Expr phi_fn = window * fn(Fn::sin, Expr(3) * Expr(x));
  Expr psi_fn = window * (Expr(x) + rat(1, 3));
  Expr op_psi = op.apply(psi_fn);
  Expr op_phi = op.apply(phi_fn);
  auto lhs = simpson(
      [&](double v) {
        Expr::Bindings pt{{x, v}};
        return std::conj(phi_fn.eval(pt)) * op_psi.eval(pt);
      },
      -1.0, 1.0, 400);
  auto rhs = simpson(
      [&](double v) {
        Expr::Bindings pt{{x, v}};
        return std::conj(op_phi.eval(pt)) * psi_fn.eval(pt);
      },
      -1.0, 1.0, 400);
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs));
}

TEST_CASE("op_equal distinguishes operators") {
  DiffOp d1 = DiffOp::partial(x, {x});
  DiffOp d2 = DiffOp::partial(x, {x}, 2);
  Box box = {{x, {0.0, 1.0}}};
  CHECK(op_equal(d1, d1, box).equal);
  auto rep = op_equal(d2, d1, box);
  CHECK(!rep.equal);

  // Numerically equal but structurally different coefficients.
  Expr g = fn(Fn::exp, Expr(x));
  DiffOp a = DiffOp::multiplication(g * (Expr(1) / g), {x});
  CHECK(op_equal(a, DiffOp::identity({x}), box).equal);
}

TEST_CASE("multi-variable embedding and mixed partials") {
  DiffOp dphi = DiffOp::partial(phi, {phi});
  DiffOp dpsi = DiffOp::partial(psi, {psi});
  DiffOp mixed = compose(dphi, dpsi);
  Expr f = fn(Fn::sin, Expr(phi)) * fn(Fn::cos, Expr(psi));
  CHECK(mixed.apply(f) ==
        fn(Fn::cos, Expr(phi)) * (Expr(-1) * fn(Fn::sin, Expr(psi))));
  CHECK(commutator(dphi, dpsi).is_zero());
}

TEST_CASE("operator serialization is stable") {
  DiffOp p = DiffOp::momentum(x, {x}, Expr(hb));
  std::string s = to_string(p);
  CHECK(s.find("(vars x)") != std::string::npos);
  CHECK(s.find("(term (1)") != std::string::npos);
}
