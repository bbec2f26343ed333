#include "specmorph/potentials.hpp"

#include <cmath>

#include "specmorph/error.hpp"

namespace specmorph {

namespace syms {
#define SPECMORPH_SYM(fn, name, kind)            \
  const Symbol& fn() {                           \
    static const Symbol s{name, SymbolKind::kind}; \
    return s;                                    \
  }
SPECMORPH_SYM(x, "x", variable)
SPECMORPH_SYM(r, "r", variable)
SPECMORPH_SYM(theta, "theta", variable)
SPECMORPH_SYM(phi, "phi", variable)
SPECMORPH_SYM(psi, "psi", variable)
SPECMORPH_SYM(a, "a", parameter)
SPECMORPH_SYM(hbar, "hbar", parameter)
SPECMORPH_SYM(mu, "mu", parameter)
SPECMORPH_SYM(A, "A", parameter)
SPECMORPH_SYM(B, "B", parameter)
SPECMORPH_SYM(E, "E", parameter)
SPECMORPH_SYM(omega, "omega", parameter)
SPECMORPH_SYM(pi, "pi", parameter)
#undef SPECMORPH_SYM
}  // namespace syms

Expr::Bindings standard_bindings(const PhysConsts& consts) {
  return {{syms::hbar(), consts.hbar},
          {syms::mu(), consts.mu},
          {syms::a(), consts.a},
          {syms::pi(), M_PI}};
}

double Endpoint::value(const PhysConsts& consts) const {
  if (type == EndpointType::infinite)
    fail(ErrorKind::domain_error, "infinite endpoint has no finite value");
  return where.eval_real(standard_bindings(consts));
}

namespace {

Expr fn(Fn f, const Expr& e) { return Expr::apply_fn(f, e); }

Expr ax(const Symbol& v) { return Expr(syms::a()) * Expr(v); }

PotentialSpec make_free() {
  PotentialSpec s;
  s.id = "free";
  s.var = syms::x();
  s.lo = {EndpointType::infinite, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential = Expr(0);
  s.notes = "flat reference entry; box spectra are used for oracle calibration";
  return s;
}

PotentialSpec make_harmonic() {
  PotentialSpec s;
  s.id = "harmonic";
  s.var = syms::x();
  s.lo = {EndpointType::infinite, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential = rat(1, 2) * Expr(syms::mu()) * Expr(syms::omega()) *
                Expr(syms::omega()) * Expr(syms::x()) * Expr(syms::x());
  s.params = {{syms::omega(), 1e-12, 1e300, "omega > 0"}};
  s.has_closed_form = true;
  s.notes = "oracle calibration entry";
  return s;
}

PotentialSpec make_rm_hyp_source() {
  PotentialSpec s;
  s.id = "rosen-morse-hyp-source";
  s.aliases = {"rosen-morse-I"};
  s.var = syms::x();
  s.lo = {EndpointType::singular, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential = Expr(syms::A()) * Expr::pow(fn(Fn::csch, ax(syms::x())), Rational(2)) +
                Expr(syms::B()) * fn(Fn::coth, ax(syms::x())) *
                    fn(Fn::csch, ax(syms::x()));
  s.params = {{syms::A(), -1e300, 1e300, "csch^2 coupling"},
              {syms::B(), -1e300, 1e300, "coth*csch coupling"}};
  s.notes =
      "kept exactly as published; the rm-to-pt pipeline report flags that "
      "this form is not the operator the published end result follows from";
  return s;
}

PotentialSpec make_pt_trig() {
  PotentialSpec s;
  s.id = "poschl-teller-trig";
  s.aliases = {"poschl-teller"};
  s.var = syms::theta();
  s.lo = {EndpointType::singular, Expr(0)};
  s.hi = {EndpointType::singular,
          rat(1, 2) * Expr(syms::pi()) * Expr::pow(Expr(syms::a()), Rational(-1))};
  s.potential = Expr(syms::A()) * Expr::pow(fn(Fn::csc, ax(syms::theta())), Rational(2)) +
                Expr(syms::B()) * Expr::pow(fn(Fn::sec, ax(syms::theta())), Rational(2));
  s.params = {{syms::A(), -0.125, 1e300,
               "A >= -a^2 hbar^2/(8 mu); bound quoted for hbar=mu=a=1"},
              {syms::B(), -0.125, 1e300,
               "B >= -a^2 hbar^2/(8 mu); bound quoted for hbar=mu=a=1"}};
  s.has_closed_form = true;
  s.notes =
      "couplings A=(a^2 hbar^2/2mu)gamma(gamma-1), B likewise with delta";
  return s;
}

PotentialSpec make_rm_tanh() {
  PotentialSpec s;
  s.id = "rosen-morse-tanh";
  s.aliases = {"rosen-morse"};
  s.var = syms::theta();
  s.lo = {EndpointType::infinite, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential = Expr(syms::A()) * fn(Fn::tanh, ax(syms::theta())) -
                Expr(syms::B()) * Expr::pow(fn(Fn::sech, ax(syms::theta())), Rational(2));
  s.params = {{syms::A(), -1e300, 1e300,
               "normalize A >= 0 via theta -> -theta, A -> -A"},
              {syms::B(), -1e300, 1e300, "bound states require B > 0"}};
  s.has_closed_form = true;
  return s;
}

PotentialSpec make_morse() {
  PotentialSpec s;
  s.id = "morse";
  s.var = syms::x();
  s.lo = {EndpointType::infinite, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential =
      Expr(syms::A()) * (fn(Fn::exp, Expr(-2) * ax(syms::x())) -
                         Expr(2) * fn(Fn::exp, Expr(-1) * ax(syms::x())));
  s.params = {{syms::A(), 0.0, 1e300, "well depth"}};
  s.stub = true;
  s.notes =
      "stub: transformation function not shipped as ground truth; activate "
      "only after it passes the pipeline residual check";
  return s;
}

PotentialSpec make_eckart() {
  PotentialSpec s;
  s.id = "eckart";
  s.var = syms::r();
  s.lo = {EndpointType::singular, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential = Expr(syms::A()) * Expr::pow(fn(Fn::csch, ax(syms::r())), Rational(2)) -
                Expr(syms::B()) * fn(Fn::coth, ax(syms::r()));
  s.params = {{syms::A(), -1e300, 1e300, ""}, {syms::B(), -1e300, 1e300, ""}};
  s.stub = true;
  s.notes = "stub: see morse";
  return s;
}

PotentialSpec make_rm2() {
  PotentialSpec s;
  s.id = "rosen-morse-II";
  s.var = syms::theta();
  s.lo = {EndpointType::singular, Expr(0)};
  s.hi = {EndpointType::singular,
          Expr(syms::pi()) * Expr::pow(Expr(syms::a()), Rational(-1))};
  s.potential = Expr(syms::A()) * Expr::pow(fn(Fn::csc, ax(syms::theta())), Rational(2)) +
                Expr(syms::B()) * fn(Fn::cot, ax(syms::theta()));
  s.params = {{syms::A(), -0.125, 1e300, ""}, {syms::B(), -1e300, 1e300, ""}};
  s.stub = true;
  s.notes = "stub: see morse";
  return s;
}

PotentialSpec make_radial_oscillator() {
  PotentialSpec s;
  s.id = "radial-oscillator";
  s.var = syms::r();
  s.lo = {EndpointType::singular, Expr(0)};
  s.hi = {EndpointType::infinite, Expr(0)};
  s.potential =
      rat(1, 2) * Expr(syms::mu()) * Expr(syms::omega()) * Expr(syms::omega()) *
          Expr(syms::r()) * Expr(syms::r()) +
      Expr(syms::A()) * Expr::pow(Expr(syms::r()), Rational(-2));
  s.params = {{syms::omega(), 1e-12, 1e300, "omega > 0"},
              {syms::A(), 0.0, 1e300, "centrifugal strength l(l+1)hbar^2/(2mu)"}};
  s.stub = true;
  s.notes = "stub: see morse";
  return s;
}

}  // namespace

Catalog::Catalog() {
  entries_ = {make_free(),   make_harmonic(), make_rm_hyp_source(),
              make_pt_trig(), make_rm_tanh(),  make_morse(),
              make_eckart(), make_rm2(),      make_radial_oscillator()};
}

const PotentialSpec& Catalog::get(const std::string& id_or_alias) const {
  for (const auto& e : entries_) {
    if (e.id == id_or_alias) return e;
    for (const auto& al : e.aliases)
      if (al == id_or_alias) return e;
  }
  fail(ErrorKind::not_found, "no catalog entry '" + id_or_alias + "'");
}

const Catalog& catalog() {
  static const Catalog c;
  return c;
}

DiffOp build_schrodinger_op(const PotentialSpec& spec,
                            const std::map<Symbol, Expr>& params,
                            const Expr& energy) {
  for (const auto& p : spec.params) {
    auto it = params.find(p.sym);
    if (it == params.end()) continue;
    if (it->second.is_constant() && it->second.constant_value().is_real()) {
      double v = it->second.constant_value().re.to_double();
      if (v < p.min || v > p.max)
        fail(ErrorKind::parameter_out_of_range,
             p.sym.name + " = " + std::to_string(v) + " outside [" +
                 std::to_string(p.min) + ", " + std::to_string(p.max) + "]" +
                 (p.note.empty() ? "" : " (" + p.note + ")"));
    }
  }
  Expr V = spec.potential;
  for (const auto& [s, e] : params) V = V.substitute(s, e);
  DiffOp op({spec.var});
  Expr kinetic = Expr(-1) * rat(1, 2) *
                 Expr::pow(Expr(syms::hbar()), Rational(2)) *
                 Expr::pow(Expr(syms::mu()), Rational(-1));
  op.add_term({2}, kinetic);
  op.add_term({0}, V - energy);
  return op;
}

double pt_gamma_from_coupling(double A, const PhysConsts& c) {
  double rad = 1.0 + 8.0 * c.mu * A / (c.a * c.a * c.hbar * c.hbar);
  if (rad < 0)
    fail(ErrorKind::invalid_coupling,
         "Poschl-Teller coupling below the -a^2 hbar^2/(8 mu) limit");
  return 0.5 * (1.0 + std::sqrt(rad));
}

namespace {

SpectrumResult harmonic_spectrum(const std::map<Symbol, double>& params,
                                 const PhysConsts& c, int count) {
  auto it = params.find(syms::omega());
  if (it == params.end() || it->second <= 0)
    fail(ErrorKind::parameter_out_of_range, "harmonic spectrum needs omega > 0");
  double w = it->second;
  SpectrumResult out;
  out.consts = c;
  out.convention_note = "E_n = hbar omega (n + 1/2)";
  for (int n = 0; n < count; ++n)
    out.levels.push_back({{{"n", double(n)}}, c.hbar * w * (n + 0.5)});
  out.truncation_note = "first " + std::to_string(count) + " of infinitely many";
  return out;
}

SpectrumResult pt_spectrum(const std::map<Symbol, double>& params,
                           const PhysConsts& c, int count) {
  double A = params.count(syms::A()) ? params.at(syms::A()) : 0.0;
  double B = params.count(syms::B()) ? params.at(syms::B()) : 0.0;
  double gamma = pt_gamma_from_coupling(A, c);
  double delta = pt_gamma_from_coupling(B, c);
  double scale = c.a * c.a * c.hbar * c.hbar / (2.0 * c.mu);
  SpectrumResult out;
  out.consts = c;
  out.convention_note =
      "E_j = (a^2 hbar^2 / 2 mu)(gamma + delta + 2j)^2; gamma, delta from "
      "A = (a^2 hbar^2/2mu) gamma(gamma-1), B likewise; j >= (1-gamma-delta)/2";
  int j0 = std::max(0, (int)std::ceil((1.0 - gamma - delta) / 2.0 - 1e-12));
  for (int i = 0; i < count; ++i) {
    int j = j0 + i;
    double s = gamma + delta + 2.0 * j;
    double k = 0.5 * s - 0.5;
    out.levels.push_back({{{"j", double(j)}, {"k", k}, {"l", k - j}},
                          scale * s * s});
  }
  out.truncation_note = "first " + std::to_string(count) + " of infinitely many";
  return out;
}

SpectrumResult rm_spectrum(const std::map<Symbol, double>& params,
                           const PhysConsts& c, int count) {
  double A = params.count(syms::A()) ? params.at(syms::A()) : 0.0;
  double B = params.count(syms::B()) ? params.at(syms::B()) : 0.0;
  SpectrumResult out;
  out.consts = c;
  out.convention_note =
      "E_j = -(a^2 hbar^2/2mu)(l^2 + n^2), n = k - j, l = (mu A / a^2 hbar^2)/n; "
      "A normalized to |A| via theta -> -theta; J3 eigenvalue convention "
      "phase e^{i(l phi - m psi)}";
  double Aeff = std::abs(A);
  if (A < 0)
    out.convention_note += "; input A < 0 reflected";
  double h2 = c.hbar * c.hbar;
  if (B <= 0)
    fail(ErrorKind::no_bound_states, "sech^2 well absent (B <= 0)");
  double k = -0.5 + 0.5 * std::sqrt(1.0 + 8.0 * c.mu * B / (c.a * c.a * h2));
  double lm = c.mu * Aeff / (c.a * c.a * h2);
  if (!(lm < k * k))
    fail(ErrorKind::no_bound_states,
         "existence bound violated: mu A/(a^2 hbar^2) = " + std::to_string(lm) +
             " >= k^2 = " + std::to_string(k * k));
  double scale = c.a * c.a * h2 / (2.0 * c.mu);
  for (int j = 0; out.levels.size() < static_cast<std::size_t>(count); ++j) {
    double n = k - j;
    if (!(n > 0)) break;
    if (!(lm < n * n)) break;  // level at or above the asymptotic threshold
    double l = n > 0 ? lm / n : 0.0;
    out.levels.push_back({{{"j", double(j)}, {"n", n}, {"l", l}, {"k", k}},
                          -scale * (l * l + n * n)});
  }
  if (out.levels.empty())
    fail(ErrorKind::no_bound_states, "no levels satisfy n > 0 and lm < n^2");
  out.truncation_note =
      out.levels.size() < static_cast<std::size_t>(count)
          ? "all bound levels listed"
          : "truncated to " + std::to_string(count) + " levels";
  return out;
}

}  // namespace

SpectrumResult closed_form_spectrum(const PotentialSpec& spec,
                                    const std::map<Symbol, double>& params,
                                    const PhysConsts& consts, int count) {
  if (!spec.has_closed_form)
    fail(ErrorKind::no_closed_form, spec.id + " has no closed-form spectrum");
  if (count <= 0) fail(ErrorKind::parameter_out_of_range, "count must be > 0");
  if (spec.id == "harmonic") return harmonic_spectrum(params, consts, count);
  if (spec.id == "poschl-teller-trig") return pt_spectrum(params, consts, count);
  if (spec.id == "rosen-morse-tanh") return rm_spectrum(params, consts, count);
  fail(ErrorKind::no_closed_form, spec.id + " has no closed-form spectrum");
}

}  // namespace specmorph
