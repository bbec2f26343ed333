#include "specmorph/xform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "specmorph/error.hpp"
#include "specmorph/laurent.hpp"
#include "specmorph/parse.hpp"

namespace specmorph {

namespace {

// Sample an expression over the interval; returns values at valid points.
std::vector<double> sample_values(const Expr& e, const Symbol& var,
                                  const Interval& iv, const ValidationCtx& ctx) {
  std::mt19937_64 rng(ctx.seed);
  double m = iv.effective_margin();
  std::uniform_real_distribution<double> dist(iv.lo + m, iv.hi - m);
  std::vector<double> vals;
  int attempts = 0;
  while (static_cast<int>(vals.size()) < ctx.samples &&
         attempts < 8 * ctx.samples) {
    ++attempts;
    Expr::Bindings pt = ctx.params;
    pt[var] = dist(rng);
    try {
      vals.push_back(e.eval_real(pt));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::domain_error) throw;
    }
  }
  if (vals.empty())
    fail(ErrorKind::singular_transform,
         "no finite samples of transformation data on the interval");
  return vals;
}

// Requires every sample nonzero with a common sign; returns that sign.
int check_nonvanishing(const Expr& e, const Symbol& var, const Interval& iv,
                       const ValidationCtx& ctx, const char* what) {
  auto vals = sample_values(e, var, iv, ctx);
  int sign = 0;
  for (double v : vals) {
    if (!std::isfinite(v) || std::abs(v) < 1e-12)
      fail(ErrorKind::singular_transform,
           std::string(what) + " vanishes on the working interval");
    int s = v > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign)
      fail(ErrorKind::singular_transform,
           std::string(what) + " changes sign on the working interval");
  }
  return sign;
}

}  // namespace

DiffOp pct(const DiffOp& op, const Expr& f, const Symbol& from_var,
           const Symbol& to_var, const Interval& interval,
           const ValidationCtx& ctx) {
  Expr fp = f.derivative(to_var);
  check_nonvanishing(fp, to_var, interval, ctx, "f'");

  // Result variable list: from_var replaced by to_var.
  std::vector<Symbol> vars;
  size_t slot = op.variables().size();
  for (size_t i = 0; i < op.variables().size(); ++i) {
    const Symbol& v = op.variables()[i];
    if (v == from_var) {
      slot = i;
      vars.push_back(to_var);
    } else {
      vars.push_back(v);
    }
  }
  if (slot == op.variables().size())
    fail(ErrorKind::unsupported_shape,
         "operator does not involve " + from_var.name);

  DiffOp deriv = DiffOp::partial(to_var, vars, 1,
                                 Expr::pow(fp, Rational(-1)));
  DiffOp out(vars);
  for (auto& [idx, c] : op.terms()) {
    int k = idx[slot];
    DiffOp term = DiffOp::multiplication(c.substitute(from_var, f), vars);
    for (int i = 0; i < k; ++i) term = compose(term, deriv);
    DiffOp::MultiIndex rest = idx;
    rest[slot] = 0;
    bool pure = std::all_of(rest.begin(), rest.end(),
                            [](int v) { return v == 0; });
    if (!pure) {
      DiffOp other(vars);
      other.add_term(rest, Expr(1));
      term = compose(term, other);
    }
    out = out + term;
  }
  return out;
}

DiffOp similarity(const DiffOp& op, const Expr& g, const Symbol& var,
                  const Interval& interval, const ValidationCtx& ctx) {
  check_nonvanishing(g, var, interval, ctx, "similarity function");
  const auto& vars = op.variables();
  DiffOp mg = DiffOp::multiplication(g, vars);
  DiffOp mginv = DiffOp::multiplication(Expr::pow(g, Rational(-1)), vars);
  return compose(mg, compose(op, mginv));
}

DiffOp conjugate(const DiffOp& op, const Expr& g, const Symbol& var,
                 const Interval& interval, const ValidationCtx& ctx) {
  check_nonvanishing(g, var, interval, ctx, "conjugation function");
  const auto& vars = op.variables();
  DiffOp mg = DiffOp::multiplication(g, vars);
  return compose(mg, compose(op, mg));
}

Measure transform_measure(const Measure& mu, const TransformStep& step,
                          const ValidationCtx& ctx) {
  Measure out = mu;
  if (const auto* p = std::get_if<PctStep>(&step)) {
    Expr fp = p->f.derivative(p->to_var);
    out.var = p->to_var;
    out.density = mu.density.substitute(p->from_var, p->f) * fp;
  } else if (const auto* s = std::get_if<SimilarityStep>(&step)) {
    out.density = Expr::pow(s->g, Rational(-2)) * mu.density;
  } else if (std::get_if<ConjugationStep>(&step)) {
    // unchanged
  } else if (const auto* r = std::get_if<RescaleStep>(&step)) {
    double c = r->c.eval_real(ctx.params);
    if (!(c > 0))
      fail(ErrorKind::singular_transform, "rescale constant must be positive");
    out.constant = mu.constant / (c * c);
  }
  return out;
}

double solve_kinetic_constant(const DiffOp& op, const Expr& g,
                              const Symbol& var, const Interval& interval,
                              const ValidationCtx& ctx) {
  if (op.variables().size() != 1)
    fail(ErrorKind::unsupported_shape,
         "kinetic normalization expects a single-variable operator");
  Expr lead = op.coefficient({2});
  if (lead.is_zero())
    fail(ErrorKind::not_proportional, "no second-derivative term");
  Expr target = Expr(-1) * rat(1, 2) *
                Expr::pow(Expr(syms::hbar()), Rational(2)) *
                Expr::pow(Expr(syms::mu()), Rational(-1));
  Expr candidate = target * Expr::pow(g * g * lead, Rational(-1));
  auto vals = sample_values(candidate, var, interval, ctx);
  double c0 = vals.front();
  for (double v : vals)
    if (std::abs(v - c0) > 1e-8 * std::max(1.0, std::abs(c0)))
      fail(ErrorKind::not_proportional,
           "second-derivative coefficient is not a constant multiple of the "
           "canonical kinetic term");
  return c0;
}

PipelineResult run_pipeline(const DiffOp& S0, const Measure& mu0,
                            const Symbol& var0, const TransformPlan& plan,
                            const ValidationCtx& ctx) {
  PipelineResult res;
  DiffOp cur = S0;
  Measure mu = mu0;
  Symbol var = var0;
  Expr M = Expr(var0);     // argument map, Expr in var0
  Expr L(1), R(1);         // endpoint factor accumulators, in current var
  Expr W(1), Wiso(1);      // wavefunction weights, in current var
  double overall = 1.0;
  std::optional<Interval> last_iv;
  std::vector<std::string> flags;

  for (const TransformStep& step : plan.steps) {
    if (const auto* p = std::get_if<PctStep>(&step)) {
      if (!(p->from_var == var))
        fail(ErrorKind::singular_transform,
             "plan step chains from " + p->from_var.name +
                 " but the current variable is " + var.name);
      Expr fp = p->f.derivative(p->to_var);
      int fsign = check_nonvanishing(fp, p->to_var, p->interval, ctx, "f'");
      // Verify the declared inverse on the interval.
      {
        std::mt19937_64 rng(ctx.seed + 91);
        double m = p->interval.effective_margin();
        std::uniform_real_distribution<double> dist(p->interval.lo + m,
                                                    p->interval.hi - m);
        for (int i = 0; i < 16; ++i) {
          Expr::Bindings pt = ctx.params;
          double s = dist(rng);
          pt[p->to_var] = s;
          double old_coord = p->f.eval_real(pt);
          Expr::Bindings pt2 = ctx.params;
          pt2[p->from_var] = old_coord;
          double back = p->inverse.eval_real(pt2);
          if (std::abs(back - s) > 1e-7 * std::max(1.0, std::abs(s)))
            fail(ErrorKind::singular_transform,
                 "declared inverse does not invert f on the interval");
        }
      }
      cur = pct(cur, p->f, p->from_var, p->to_var, p->interval, ctx);
      mu = transform_measure(mu, step, ctx);
      L = L.substitute(p->from_var, p->f);
      R = R.substitute(p->from_var, p->f);
      W = W.substitute(p->from_var, p->f);
      Wiso = Wiso.substitute(p->from_var, p->f);
      Expr jac = Expr::pow(fp, Rational(-1));  // delta-function Jacobian, |1/f'|
      if (fsign < 0) jac = Expr(-1) * jac;
      R = R * jac;
      M = p->inverse.substitute(p->from_var, M);
      var = p->to_var;
      last_iv = p->interval;
    } else if (const auto* s = std::get_if<SimilarityStep>(&step)) {
      cur = similarity(cur, s->g, var, s->interval, ctx);
      mu = transform_measure(mu, step, ctx);
      L = L * Expr::pow(s->g, Rational(-1));
      R = R * s->g;
      W = W * s->g;
      Wiso = Wiso * s->g;
      last_iv = s->interval;
    } else if (const auto* c = std::get_if<ConjugationStep>(&step)) {
      cur = conjugate(cur, c->g, var, c->interval, ctx);
      mu = transform_measure(mu, step, ctx);
      L = L * c->g;
      R = R * c->g;
      W = W * Expr::pow(c->g, Rational(-1));
      last_iv = c->interval;
    } else if (const auto* r = std::get_if<RescaleStep>(&step)) {
      double cv = r->c.eval_real(ctx.params);
      if (!(cv > 0))
        fail(ErrorKind::singular_transform, "rescale constant must be positive");
      overall /= cv * cv;
      mu = transform_measure(mu, step, ctx);
      W = W * r->c;
      Wiso = Wiso * r->c;
    }
    res.intermediates.push_back(cur);
    res.measures.push_back(mu);
    res.weights.push_back(W);
    res.isometry_weights.push_back(Wiso);
  }

  res.transformed = cur;
  res.final_var = var;

  PropagatorRelation rel;
  rel.source_id = plan.source_id;
  rel.target_id = plan.target_id;
  rel.endpoint_var = var0;
  rel.argument_map = M;
  rel.measure_out = mu;
  rel.final_var = var;
  rel.kernel_weight = W;
  rel.isometry_weight = Wiso;
  {
    // Accumulated forward map old = F(new).
    Expr F = Expr(var);
    for (auto it = plan.steps.rbegin(); it != plan.steps.rend(); ++it)
      if (const auto* p = std::get_if<PctStep>(&*it))
        F = p->f.substitute(p->to_var, F);
    rel.inverse_argument_map = F;
  }
  Expr P = L * R;
  if (last_iv) {
    // The symmetric endpoint split h = sqrt(L R) needs L/R constant.
    Expr ratio = L * Expr::pow(R, Rational(-1));
    auto vals = sample_values(ratio, var, *last_iv, ctx);
    for (double v : vals)
      if (std::abs(v - vals.front()) >
          1e-8 * std::max(1.0, std::abs(vals.front())))
        fail(ErrorKind::unsupported_shape,
             "endpoint factors do not factorize symmetrically");
    int psign = check_nonvanishing(P, var, *last_iv, ctx, "endpoint factor");
    if (psign < 0) {
      P = Expr(-1) * P;
      overall = -overall;
    }
  }
  Expr h_cur = Expr::pow(P, Rational(1, 2));
  rel.endpoint_prefactor = h_cur.substitute(var, M);
  rel.overall_constant = overall;
  rel.flags = std::move(flags);
  res.relation = std::move(rel);
  return res;
}

// ---------------------------------------------------------------------------
// Parameter matching

namespace {

// Rename a target parameter to its primed twin so source and target symbol
// sets stay disjoint in the relation map.
Symbol primed(const Symbol& s) { return Symbol{s.name + "'", s.kind}; }

struct AffineTarget {
  std::vector<Symbol> params;   // primed target parameters
  std::vector<Expr> basis;      // d V / d param
  Expr fixed;                   // V with all params zero
};

AffineTarget decompose_target(const PotentialSpec& target) {
  AffineTarget t;
  Expr V = target.potential;
  for (const auto& p : target.params) {
    Symbol ps = primed(p.sym);
    V = V.substitute(p.sym, Expr(ps));
    t.params.push_back(ps);
  }
  Expr fixed = V;
  for (const auto& ps : t.params) fixed = fixed.substitute(ps, Expr(0));
  t.fixed = fixed;
  for (const auto& ps : t.params) {
    Expr on = V;
    for (const auto& qs : t.params)
      on = on.substitute(qs, Expr(qs == ps ? 1 : 0));
    Expr b = on - fixed;
    // Linearity check: doubling the parameter must double the contribution.
    Expr twice = V;
    for (const auto& qs : t.params)
      twice = twice.substitute(qs, Expr(qs == ps ? 2 : 0));
    if (!(twice - fixed == Expr(2) * b))
      fail(ErrorKind::no_match,
           "target potential is not affine in " + ps.name);
    t.basis.push_back(b);
  }
  return t;
}

// Rectangular rational-coefficient solve with Laurent right-hand sides.
std::vector<Laurent> solve_exact(std::vector<std::vector<Rational>> Mrows,
                                 std::vector<Laurent> rhs, size_t ncols) {
  size_t nrows = Mrows.size();
  size_t prow = 0;
  for (size_t col = 0; col < ncols; ++col) {
    size_t sel = nrows;
    for (size_t r = prow; r < nrows; ++r)
      if (!Mrows[r][col].is_zero()) {
        sel = r;
        break;
      }
    if (sel == nrows)
      fail(ErrorKind::no_match, "degenerate sample matrix");
    std::swap(Mrows[prow], Mrows[sel]);
    std::swap(rhs[prow], rhs[sel]);
    Rational piv = Mrows[prow][col];
    for (size_t r = 0; r < nrows; ++r) {
      if (r == prow || Mrows[r][col].is_zero()) continue;
      Rational m = Mrows[r][col] / piv;
      for (size_t cc = col; cc < ncols; ++cc)
        Mrows[r][cc] = Mrows[r][cc] - m * Mrows[prow][cc];
      rhs[r] = rhs[r] - Laurent(CRational(m)) * rhs[prow];
    }
    ++prow;
  }
  std::vector<Laurent> sol(ncols);
  for (size_t col = 0, r = 0; col < ncols; ++col, ++r)
    sol[col] = rhs[r] * Laurent(CRational(Rational(1) / Mrows[r][col]));
  // Consistency of the leftover rows is the caller's residual check.
  return sol;
}

MatchResult match_exact(const Expr& c0, const Symbol& var,
                        const AffineTarget& target) {
  Symbol t = variable("t#angle");
  Expr sub_arg = Expr(t) * Expr::pow(Expr(syms::a()), Rational(-1));
  Expr c0s = c0.substitute(var, sub_arg);
  Expr fixed_s = target.fixed.substitute(var, sub_arg);
  std::vector<Expr> basis_s;
  for (const Expr& b : target.basis)
    basis_s.push_back(b.substitute(var, sub_arg));

  std::set<Symbol> inds;
  c0s.collect_symbols(inds);
  fixed_s.collect_symbols(inds);
  for (const Expr& b : basis_s) b.collect_symbols(inds);
  inds.erase(t);

  const size_t nunk = target.params.size() + 1;  // params and E'
  const size_t npts = nunk + 4;

  auto eval_at = [&](const Expr& e, int point, bool hyp) {
    ExactContext ctx;
    ctx.indeterminates = inds;
    if (hyp)
      ctx.hyp_angles[t] = hyperbolic_point(point);
    else
      ctx.trig_angles[t] = pythagorean_point(point);
    return exact_eval(e, ctx);
  };

  MatchResult out;
  for (int use_hyp = 0; use_hyp < 2; ++use_hyp) {
    try {
      std::vector<std::vector<Rational>> rows;
      std::vector<Laurent> rhs;
      for (size_t i = 0; i < npts; ++i) {
        std::vector<Rational> row;
        for (const Expr& b : basis_s) {
          Laurent lb = eval_at(b, static_cast<int>(i), use_hyp);
          if (!lb.is_constant() || !lb.constant_value().is_real())
            fail(ErrorKind::unsupported_shape, "basis not rational at point");
          row.push_back(lb.constant_value().re);
        }
        row.push_back(Rational(-1));  // -E'
        rows.push_back(std::move(row));
        rhs.push_back(eval_at(c0s, static_cast<int>(i), use_hyp) -
                      eval_at(fixed_s, static_cast<int>(i), use_hyp));
      }
      auto sol = solve_exact(rows, rhs, nunk);
      // Exact residual on the spare points.
      double residual = 0;
      for (size_t i = 0; i < npts; ++i) {
        Laurent fit;
        for (size_t jcol = 0; jcol < nunk; ++jcol) {
          Laurent term = sol[jcol];
          Rational coeff = jcol + 1 == nunk ? Rational(-1) : Rational(0);
          if (jcol + 1 == nunk)
            term = term * Laurent(CRational(coeff));
          else {
            Laurent lb = eval_at(basis_s[jcol], static_cast<int>(i), use_hyp);
            term = term * lb;
          }
          fit = fit + term;
        }
        Laurent diff = (eval_at(c0s, static_cast<int>(i), use_hyp) -
                        eval_at(fixed_s, static_cast<int>(i), use_hyp)) -
                       fit;
        for (auto& [mono, cc] : diff.terms())
          residual = std::max(residual, std::abs(cc.to_complex()));
      }
      out.residual = residual;
      out.exact = residual == 0;
      for (size_t jcol = 0; jcol + 1 < nunk; ++jcol)
        out.parameter_map.emplace_back(target.params[jcol],
                                       laurent_to_expr(sol[jcol]));
      out.parameter_map.emplace_back(primed(syms::E()),
                                     laurent_to_expr(sol[nunk - 1]));
      return out;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::unsupported_shape &&
          err.kind() != ErrorKind::unbound_symbol &&
          err.kind() != ErrorKind::domain_error)
        throw;
      if (use_hyp == 1) throw;
    }
  }
  fail(ErrorKind::no_match, "exact matching unavailable");
}

MatchResult match_numeric(const Expr& c0, const Symbol& var,
                          const AffineTarget& target, const Interval& iv,
                          const ValidationCtx& ctx, double tol) {
  const size_t nunk = target.params.size() + 1;
  const size_t npts = nunk + 4;
  std::mt19937_64 rng(ctx.seed + 7);
  double m = iv.effective_margin();
  std::uniform_real_distribution<double> dist(iv.lo + m, iv.hi - m);

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  int attempts = 0;
  while (rows.size() < npts && attempts < 200) {
    ++attempts;
    Expr::Bindings pt = ctx.params;
    pt[var] = dist(rng);
    try {
      std::vector<double> row;
      for (const Expr& b : target.basis) row.push_back(b.eval_real(pt));
      row.push_back(-1.0);
      double v = c0.eval_real(pt) - target.fixed.eval_real(pt);
      rows.push_back(std::move(row));
      rhs.push_back(v);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::domain_error) throw;
    }
  }
  if (rows.size() < npts)
    fail(ErrorKind::no_match, "not enough regular sample points");

  // Normal equations (tiny system).
  std::vector<std::vector<double>> N(nunk, std::vector<double>(nunk, 0.0));
  std::vector<double> y(nunk, 0.0);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t p = 0; p < nunk; ++p) {
      y[p] += rows[i][p] * rhs[i];
      for (size_t q = 0; q < nunk; ++q) N[p][q] += rows[i][p] * rows[i][q];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> sol(nunk, 0.0);
  for (size_t col = 0; col < nunk; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < nunk; ++r)
      if (std::abs(N[r][col]) > std::abs(N[piv][col])) piv = r;
    if (std::abs(N[piv][col]) < 1e-14)
      fail(ErrorKind::no_match, "degenerate sample matrix");
    std::swap(N[col], N[piv]);
    std::swap(y[col], y[piv]);
    for (size_t r = 0; r < nunk; ++r) {
      if (r == col) continue;
      double f = N[r][col] / N[col][col];
      for (size_t c = col; c < nunk; ++c) N[r][c] -= f * N[col][c];
      y[r] -= f * y[col];
    }
  }
  for (size_t p = 0; p < nunk; ++p) sol[p] = y[p] / N[p][p];

  double scale = 1.0;
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  double residual = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double fit = 0;
    for (size_t p = 0; p < nunk; ++p) fit += rows[i][p] * sol[p];
    residual = std::max(residual, std::abs(fit - rhs[i]) / scale);
  }
  if (residual > tol)
    fail(ErrorKind::no_match,
         "potential does not match the target basis (residual " +
             std::to_string(residual) + ")");

  auto to_expr = [](double v) {
    // Best-effort exact snap for clean rationals; otherwise a fine rational.
    for (std::int64_t den : {1, 2, 3, 4, 6, 8, 12, 16, 24}) {
      double num = v * den;
      if (std::abs(num - std::round(num)) < 1e-9 * std::max(1.0, std::abs(num)))
        return Expr(Rational(std::llround(num), den));
    }
    return Expr(Rational(std::llround(v * 1e9), 1000000000LL));
  };
  MatchResult out;
  out.residual = residual;
  out.exact = false;
  for (size_t p = 0; p + 1 < nunk; ++p)
    out.parameter_map.emplace_back(target.params[p], to_expr(sol[p]));
  out.parameter_map.emplace_back(primed(syms::E()), to_expr(sol[nunk - 1]));
  return out;
}

}  // namespace

MatchResult match_parameters(const DiffOp& Sf, const Symbol& var,
                             const PotentialSpec& target,
                             const Interval& interval, const ValidationCtx& ctx,
                             double tolerance) {
  DiffOp::MultiIndex zero(Sf.variables().size(), 0);
  Expr c0 = Sf.coefficient(zero);
  AffineTarget t = decompose_target(target);
  // Target potentials are written in the target's own variable; rebase.
  if (!(target.var == var)) {
    t.fixed = t.fixed.substitute(target.var, Expr(var));
    for (Expr& b : t.basis) b = b.substitute(target.var, Expr(var));
  }
  try {
    MatchResult exact = match_exact(c0, var, t);
    if (exact.residual <= tolerance) return exact;
    fail(ErrorKind::no_match,
         "exact matching residual " + std::to_string(exact.residual));
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::no_match &&
        err.kind() != ErrorKind::unsupported_shape &&
        err.kind() != ErrorKind::unbound_symbol)
      throw;
    if (err.kind() == ErrorKind::no_match) {
      // Exact path ran but did not fit: retry numerically only when numeric
      // bindings are available for every free symbol.
      std::set<Symbol> free = c0.free_symbols();
      bool bound = true;
      for (const Symbol& s : free)
        if (!(s == var) && !ctx.params.count(s)) bound = false;
      if (!bound) throw;
    }
  }
  return match_numeric(c0, var, t, interval, ctx, tolerance);
}

// ---------------------------------------------------------------------------
// Plan serialization

namespace {

SymbolTable plan_symbols() {
  SymbolTable tab;
  for (const Symbol& v : {syms::x(), syms::r(), syms::theta(), syms::phi(),
                          syms::psi()})
    tab.declare_variable(v.name);
  tab.declare_parameter("t#angle");
  return tab;
}

Interval interval_from(const nlohmann::json& j) {
  Interval iv;
  iv.lo = j.at(0).get<double>();
  iv.hi = j.at(1).get<double>();
  if (j.size() > 2) iv.margin = j.at(2).get<double>();
  return iv;
}

}  // namespace

TransformPlan load_plan_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  TransformPlan plan;
  plan.source_id = j.value("source", "");
  plan.target_id = j.value("target", "");
  SymbolTable tab = plan_symbols();
  for (const auto& js : j.at("steps")) {
    std::string kind = js.at("step").get<std::string>();
    if (kind == "pct") {
      PctStep s;
      s.f = parse_expr(js.at("fn").get<std::string>(), tab);
      if (!js.contains("inverse"))
        fail(ErrorKind::parse_error,
             "pct steps require an explicit `inverse` expression");
      s.inverse = parse_expr(js.at("inverse").get<std::string>(), tab);
      std::string fv = js.value("from_var", "x");
      std::string tv = js.value("new_var", fv);
      auto fvs = tab.lookup(fv), tvs = tab.lookup(tv);
      if (!fvs || !tvs)
        fail(ErrorKind::parse_error, "unknown plan variable name");
      s.from_var = *fvs;
      s.to_var = *tvs;
      s.interval = interval_from(js.at("interval"));
      plan.steps.push_back(s);
    } else if (kind == "similarity" || kind == "conjugation") {
      Expr g = parse_expr(js.at("fn").get<std::string>(), tab);
      Interval iv = interval_from(js.at("interval"));
      if (kind == "similarity")
        plan.steps.push_back(SimilarityStep{g, iv});
      else
        plan.steps.push_back(ConjugationStep{g, iv});
    } else if (kind == "rescale") {
      RescaleStep s;
      s.c = parse_expr(js.at("fn").get<std::string>(), tab);
      plan.steps.push_back(s);
    } else {
      fail(ErrorKind::parse_error, "unknown plan step '" + kind + "'");
    }
  }
  return plan;
}

std::string plan_to_json(const TransformPlan& plan) {
  nlohmann::json j;
  j["source"] = plan.source_id;
  j["target"] = plan.target_id;
  j["steps"] = nlohmann::json::array();
  for (const TransformStep& step : plan.steps) {
    nlohmann::json js;
    if (const auto* p = std::get_if<PctStep>(&step)) {
      js["step"] = "pct";
      js["fn"] = p->f.str();
      js["inverse"] = p->inverse.str();
      js["from_var"] = p->from_var.name;
      js["new_var"] = p->to_var.name;
      js["interval"] = {p->interval.lo, p->interval.hi};
    } else if (const auto* s = std::get_if<SimilarityStep>(&step)) {
      js["step"] = "similarity";
      js["fn"] = s->g.str();
      js["interval"] = {s->interval.lo, s->interval.hi};
    } else if (const auto* c = std::get_if<ConjugationStep>(&step)) {
      js["step"] = "conjugation";
      js["fn"] = c->g.str();
      js["interval"] = {c->interval.lo, c->interval.hi};
    } else if (const auto* r = std::get_if<RescaleStep>(&step)) {
      js["step"] = "rescale";
      js["fn"] = r->c.str();
    }
    j["steps"].push_back(js);
  }
  return j.dump(2);
}

TransformPlan builtin_plan_rm_to_pt() {
  // Mirrors plans/rm-to-pt.json; a test keeps the two in sync.
  static const char* text = R"JSON({
  "source": "rosen-morse-tanh",
  "target": "poschl-teller-trig",
  "interval_convention": "working intervals quoted for a = 1",
  "steps": [
    {"step": "pct",
     "fn": "(mul (pow a -1) (arctanh (cos (mul 2 a theta))))",
     "inverse": "(mul (rat 1 2) (pow a -1) (arccos (tanh (mul a theta))))",
     "from_var": "theta", "new_var": "theta",
     "interval": [0.0, 1.5707963267948966]},
    {"step": "similarity",
     "fn": "(pow (sin (mul 2 a theta)) (rat -1 2))",
     "interval": [0.0, 1.5707963267948966]},
    {"step": "conjugation",
     "fn": "(mul 2 (pow (sin (mul 2 a theta)) -1))",
     "interval": [0.0, 1.5707963267948966]},
    {"step": "rescale", "fn": "(pow 2 (rat 1 2))"}
  ]
})JSON";
  return load_plan_json(text);
}

}  // namespace specmorph
