#include "specmorph/diffop.hpp"

#include <algorithm>

#include "specmorph/error.hpp"

namespace specmorph {

namespace {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Iterate all gamma with 0 <= gamma_i <= alpha_i.
template <typename F>
void for_each_below(const DiffOp::MultiIndex& alpha, F&& f) {
  DiffOp::MultiIndex gamma(alpha.size(), 0);
  while (true) {
    f(gamma);
    size_t i = 0;
    for (; i < alpha.size(); ++i) {
      if (gamma[i] < alpha[i]) {
        ++gamma[i];
        break;
      }
      gamma[i] = 0;
    }
    if (i == alpha.size()) return;
  }
}

}  // namespace

DiffOp DiffOp::identity(std::vector<Symbol> vars) {
  DiffOp op(std::move(vars));
  op.add_term(MultiIndex(op.vars_.size(), 0), Expr(1));
  return op;
}

DiffOp DiffOp::multiplication(const Expr& coeff, std::vector<Symbol> vars) {
  DiffOp op(std::move(vars));
  op.add_term(MultiIndex(op.vars_.size(), 0), coeff);
  return op;
}

DiffOp DiffOp::partial(const Symbol& var, std::vector<Symbol> vars, int order,
                       const Expr& coeff) {
  DiffOp op(std::move(vars));
  MultiIndex idx(op.vars_.size(), 0);
  auto it = std::find(op.vars_.begin(), op.vars_.end(), var);
  if (it == op.vars_.end())
    fail(ErrorKind::unsupported_shape,
         "partial with respect to undeclared variable " + var.name);
  idx[static_cast<size_t>(it - op.vars_.begin())] = order;
  op.add_term(idx, coeff);
  return op;
}

DiffOp DiffOp::momentum(const Symbol& var, std::vector<Symbol> vars,
                        const Expr& hbar) {
  return partial(var, std::move(vars), 1,
                 Expr(-1) * Expr::imaginary_unit() * hbar);
}

int DiffOp::total_order() const {
  int m = 0;
  for (auto& [idx, c] : terms_) {
    int t = 0;
    for (int k : idx) t += k;
    m = std::max(m, t);
  }
  return m;
}

void DiffOp::add_term(const MultiIndex& index, const Expr& coeff) {
  if (index.size() != vars_.size())
    fail(ErrorKind::unsupported_shape, "multi-index arity mismatch");
  if (coeff.is_zero()) return;
  auto [it, fresh] = terms_.emplace(index, coeff);
  if (!fresh) {
    it->second = it->second + coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr DiffOp::coefficient(const MultiIndex& index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? Expr(0) : it->second;
}

DiffOp DiffOp::embedded(const std::vector<Symbol>& vars) const {
  std::vector<size_t> where(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), vars_[i]);
    if (it == vars.end())
      fail(ErrorKind::unsupported_shape,
           "embedding drops variable " + vars_[i].name);
    where[i] = static_cast<size_t>(it - vars.begin());
  }
  DiffOp out(vars);
  for (auto& [idx, c] : terms_) {
    MultiIndex nidx(vars.size(), 0);
    for (size_t i = 0; i < idx.size(); ++i) nidx[where[i]] = idx[i];
    out.add_term(nidx, c);
  }
  return out;
}

Expr DiffOp::apply(const Expr& f) const {
  std::vector<Expr> parts;
  for (auto& [idx, c] : terms_) {
    Expr g = f;
    for (size_t i = 0; i < idx.size(); ++i)
      for (int k = 0; k < idx[i]; ++k) g = g.derivative(vars_[i]);
    parts.push_back(c * g);
  }
  return Expr::sum(std::move(parts));
}

DiffOp DiffOp::scaled(const Expr& factor) const {
  DiffOp out(vars_);
  for (auto& [idx, c] : terms_) out.add_term(idx, factor * c);
  return out;
}

DiffOp DiffOp::conj() const {
  DiffOp out(vars_);
  for (auto& [idx, c] : terms_) out.add_term(idx, c.conj());
  return out;
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
  std::vector<Symbol> vars = a.vars_;
  for (const Symbol& v : b.vars_)
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  DiffOp ea = a.embedded(vars), eb = b.embedded(vars);
  for (auto& [idx, c] : eb.terms_) ea.add_term(idx, c);
  return ea;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) {
  return a + b.scaled(Expr(-1));
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  std::vector<Symbol> vars = a.variables();
  for (const Symbol& v : b.variables())
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  DiffOp ea = a.embedded(vars), eb = b.embedded(vars);
  DiffOp out(vars);
  for (auto& [alpha, ca] : ea.terms()) {
    for (auto& [beta, cb] : eb.terms()) {
      // d^alpha (cb d^beta .) = sum_{gamma<=alpha} C(alpha,gamma)
      //   (d^gamma cb) d^{alpha-gamma+beta}
      for_each_below(alpha, [&](const DiffOp::MultiIndex& gamma) {
        std::int64_t binom = 1;
        for (size_t i = 0; i < alpha.size(); ++i)
          binom *= binomial(alpha[i], gamma[i]);
        Expr dcb = cb;
        for (size_t i = 0; i < gamma.size(); ++i)
          for (int k = 0; k < gamma[i]; ++k) dcb = dcb.derivative(vars[i]);
        if (dcb.is_zero()) return;
        DiffOp::MultiIndex idx(alpha.size());
        for (size_t i = 0; i < alpha.size(); ++i)
          idx[i] = alpha[i] - gamma[i] + beta[i];
        out.add_term(idx, Expr(binom) * ca * dcb);
      });
    }
  }
  return out;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) {
  return compose(a, b) - compose(b, a);
}

DiffOp adjoint(const DiffOp& op, const Measure& mu) {
  const auto& vars = op.variables();
  auto it = std::find(vars.begin(), vars.end(), mu.var);
  size_t vi = static_cast<size_t>(it - vars.begin());
  if (it == vars.end())
    fail(ErrorKind::unsupported_shape,
         "measure variable " + mu.var.name + " not in operator");
  for (auto& [idx, c] : op.terms()) {
    for (size_t i = 0; i < idx.size(); ++i)
      if (i != vi && idx[i] != 0)
        fail(ErrorKind::unsupported_shape,
             "adjoint of derivative in non-measure variable " +
                 vars[i].name);
  }
  // (c d^n)^dagger = (-1)^n g^{-1} d^n g conj(c), expanded by Leibniz.
  DiffOp out(vars);
  Expr ginv = Expr::pow(mu.density, Rational(-1));
  for (auto& [idx, c] : op.terms()) {
    int n = idx[vi];
    DiffOp dn = DiffOp::partial(mu.var, vars, n,
                                Expr(n % 2 == 0 ? 1 : -1) * ginv);
    DiffOp mult = DiffOp::multiplication(mu.density * c.conj(), vars);
    out = out + compose(dn, mult);
  }
  return out;
}

OpEqReport op_equal(const DiffOp& a, const DiffOp& b, const Box& box,
                    const EqOptions& opts) {
  std::vector<Symbol> vars = a.variables();
  for (const Symbol& v : b.variables())
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  DiffOp ea = a.embedded(vars), eb = b.embedded(vars);

  std::map<DiffOp::MultiIndex, std::pair<Expr, Expr>> indices;
  for (auto& [idx, c] : ea.terms()) indices[idx].first = c;
  for (auto& [idx, c] : eb.terms()) indices[idx].second = c;

  OpEqReport rep;
  rep.equal = true;
  for (auto& [idx, pair] : indices) {
    EqReport r = numerically_equal(pair.first, pair.second, box, opts);
    if (r.max_residual >= rep.max_residual) {
      rep.max_residual = r.max_residual;
      rep.worst_index = idx;
      rep.worst_term = r;
    }
    if (!r.equal) rep.equal = false;
  }
  return rep;
}

std::string to_string(const DiffOp& op) {
  std::string s = "(op (vars";
  for (const Symbol& v : op.variables()) s += " " + v.name;
  s += ")";
  for (auto& [idx, c] : op.terms()) {
    s += " (term (";
    for (size_t i = 0; i < idx.size(); ++i)
      s += (i ? " " : "") + std::to_string(idx[i]);
    s += ") " + c.str() + ")";
  }
  return s + ")";
}

}  // namespace specmorph
