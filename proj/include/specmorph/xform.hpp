#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specmorph/diffop.hpp"
#include "specmorph/potentials.hpp"

namespace specmorph {

// One step of the resolvent transformation sequence. For a point canonical
// transformation the function f maps the new coordinate to the old one
// (old = f(new)); `inverse` is its inverse and supplies the endpoint
// argument map, which is not derivable symbolically within the function
// family.
struct PctStep {
  Expr f;
  Expr inverse;
  Symbol from_var;
  Symbol to_var;
  Interval interval;  // working interval in the new coordinate
};
struct SimilarityStep {
  Expr g;  // in the current coordinate
  Interval interval;
};
struct ConjugationStep {
  Expr g;
  Interval interval;
};
struct RescaleStep {
  Expr c;  // positive constant, e.g. sqrt 2
};

using TransformStep =
    std::variant<PctStep, SimilarityStep, ConjugationStep, RescaleStep>;

struct TransformPlan {
  std::string source_id, target_id;
  std::vector<TransformStep> steps;
};

// Relation between the source and target energy-domain Green functions:
//   G_src(x0, xf, E) = overall_constant * h(xf) h(x0)
//                      * G_tgt(M(x0), M(xf); mapped parameters)
// with h the endpoint prefactor and M the argument map, both Exprs in the
// source variable.
struct PropagatorRelation {
  std::string source_id, target_id;
  Symbol endpoint_var;
  Expr argument_map = Expr(0);
  Expr endpoint_prefactor = Expr(1);
  double overall_constant = 1.0;
  std::vector<std::pair<Symbol, Expr>> parameter_map;
  Measure measure_out;
  std::vector<std::string> flags;
  // Wavefunction-mapping data, all in the final coordinate: the accumulated
  // forward map old = F(new), the weight turning a source kernel solution
  // into one of the transformed operator, and the weight of the
  // measure-isometric stage (conjugation divisions skipped).
  Symbol final_var;
  Expr inverse_argument_map = Expr(0);
  Expr kernel_weight = Expr(1);
  Expr isometry_weight = Expr(1);
};

// Numeric context for validating steps (monotonicity, nonvanishing factors).
struct ValidationCtx {
  Expr::Bindings params;  // bindings for every parameter symbol
  std::uint64_t seed = 1;
  int samples = 64;
};

// Point canonical transformation: old = f(new). Coefficients are composed
// with f; each d/d(old) becomes (1/f') d/d(new), expanded exactly. Errors:
// SingularTransform when f' vanishes or blows up on the interval.
DiffOp pct(const DiffOp& op, const Expr& f, const Symbol& from_var,
           const Symbol& to_var, const Interval& interval,
           const ValidationCtx& ctx);

// g (op) g^{-1}, Leibniz-expanded. SingularTransform if g has a zero.
DiffOp similarity(const DiffOp& op, const Expr& g, const Symbol& var,
                  const Interval& interval, const ValidationCtx& ctx);

// g (op) g.
DiffOp conjugate(const DiffOp& op, const Expr& g, const Symbol& var,
                 const Interval& interval, const ValidationCtx& ctx);

// Measure rules: PCT composes the density with f and multiplies by f';
// similarity multiplies by g^{-2}; conjugation leaves the measure unchanged;
// rescale by c multiplies the constant by 1/c^2.
Measure transform_measure(const Measure& mu, const TransformStep& step,
                          const ValidationCtx& ctx);

// Constant C such that conjugating `op` with sqrt(C)*g normalizes the
// second-derivative coefficient to -hbar^2/(2 mu). NotProportional when the
// candidate is not constant over the interval.
double solve_kinetic_constant(const DiffOp& op, const Expr& g,
                              const Symbol& var, const Interval& interval,
                              const ValidationCtx& ctx);

struct PipelineResult {
  DiffOp transformed;
  PropagatorRelation relation;
  std::vector<DiffOp> intermediates;  // operator after each step
  std::vector<Measure> measures;      // measure after each step
  // Cumulative wavefunction weight after each step, in that step's
  // coordinate: a kernel solution of the step-k operator is
  // weights[k] * (psi0 of the accumulated f-composition).
  std::vector<Expr> weights;
  // Like `weights`, but skipping conjugation divisions: the map that stays
  // an isometry under the tracked measure.
  std::vector<Expr> isometry_weights;
  Symbol final_var;
};

PipelineResult run_pipeline(const DiffOp& S0, const Measure& mu0,
                            const Symbol& var0, const TransformPlan& plan,
                            const ValidationCtx& ctx);

struct MatchResult {
  std::vector<std::pair<Symbol, Expr>> parameter_map;  // target param -> Expr
  double residual = 0;
  bool exact = false;
};

// Solves for target potential parameters and target energy so that the
// order-zero coefficient of Sf equals V_target(params) - E_target. Uses the
// exact rational-angle path when the coefficient family allows it, falling
// back to least squares on sampled points. NoMatch above tolerance.
MatchResult match_parameters(const DiffOp& Sf, const Symbol& var,
                             const PotentialSpec& target,
                             const Interval& interval, const ValidationCtx& ctx,
                             double tolerance = 1e-8);

// Plan (de)serialization; JSON schema documented in docs/report-schema.md.
TransformPlan load_plan_json(const std::string& json_text);
std::string plan_to_json(const TransformPlan& plan);
TransformPlan builtin_plan_rm_to_pt();

}  // namespace specmorph
