#pragma once

#include <map>
#include <vector>

#include "specmorph/expr.hpp"

namespace specmorph {

// Linear differential operator: finitely many terms coeff * d^alpha over an
// ordered variable list. Coefficients are Exprs over the variables and any
// parameter symbols; structurally zero coefficients are pruned.
class DiffOp {
 public:
  using MultiIndex = std::vector<int>;

  DiffOp() = default;
  explicit DiffOp(std::vector<Symbol> vars) : vars_(std::move(vars)) {}

  static DiffOp zero(std::vector<Symbol> vars) { return DiffOp(std::move(vars)); }
  static DiffOp identity(std::vector<Symbol> vars);
  static DiffOp multiplication(const Expr& coeff, std::vector<Symbol> vars);
  static DiffOp partial(const Symbol& var, std::vector<Symbol> vars,
                        int order = 1, const Expr& coeff = Expr(1));
  // Momentum convention: p = -i*hbar*d/dvar.
  static DiffOp momentum(const Symbol& var, std::vector<Symbol> vars,
                         const Expr& hbar);

  const std::vector<Symbol>& variables() const { return vars_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_order() const;

  void add_term(const MultiIndex& index, const Expr& coeff);
  Expr coefficient(const MultiIndex& index) const;

  // Same operator over a superset variable list.
  DiffOp embedded(const std::vector<Symbol>& vars) const;

  Expr apply(const Expr& f) const;

  DiffOp scaled(const Expr& factor) const;  // left multiplication
  DiffOp conj() const;                      // conjugate coefficients

  friend DiffOp operator+(const DiffOp& a, const DiffOp& b);
  friend DiffOp operator-(const DiffOp& a, const DiffOp& b);
  friend DiffOp operator*(const Expr& e, const DiffOp& op) {
    return op.scaled(e);
  }

 private:
  std::vector<Symbol> vars_;
  std::map<MultiIndex, Expr> terms_;
};

// Operator product a∘b with exact Leibniz expansion of derivatives acting on
// b's coefficients. Variable lists are merged.
DiffOp compose(const DiffOp& a, const DiffOp& b);
DiffOp commutator(const DiffOp& a, const DiffOp& b);

// Normalization measure: |constant * density(var)| weights inner products;
// the sign of `constant` is retained for auditing only.
struct Measure {
  Symbol var;
  Expr density = Expr(1);
  double constant = 1.0;
};

// Formal adjoint with respect to the measure density via integration by
// parts. Boundary terms are dropped; Hermiticity claims are checked against
// compactly supported test functions elsewhere.
DiffOp adjoint(const DiffOp& op, const Measure& mu);

struct OpEqReport {
  bool equal = false;
  double max_residual = 0;
  DiffOp::MultiIndex worst_index;
  EqReport worst_term;
};

// Coefficient-wise randomized equality over a sampling box. The box must
// bind every variable and parameter appearing in either operator.
OpEqReport op_equal(const DiffOp& a, const DiffOp& b, const Box& box,
                    const EqOptions& opts = {});

std::string to_string(const DiffOp& op);

}  // namespace specmorph
