#pragma once

#include <map>
#include <string>
#include <vector>

#include "specmorph/diffop.hpp"
#include "specmorph/potentials.hpp"
#include "specmorph/xform.hpp"

namespace specmorph {

enum class GeneratorFrame { cartesian_r4, euler_scaled, transformed };

// Whether hbar multiplies the generators; the published blocks omit it.
enum class HbarConvention { absent, present };

struct GeneratorSet {
  GeneratorFrame frame = GeneratorFrame::euler_scaled;
  std::map<std::string, DiffOp> gens;  // J1 J2 J3 K1 K2 K3
  std::vector<Symbol> vars;
  // Natural measure for Hermiticity checks (density in the first variable;
  // the remaining directions are flat).
  Measure measure;
  std::string notes;
};

// Rotation generators of R^4 over x1..x4.
GeneratorSet so4_generators_cartesian(HbarConvention conv = HbarConvention::absent);

// Euler-angle generators over (theta, phi, psi) after the theta -> 2 a theta
// scaling; coefficients carry 1/(2a), csc 2a theta, cot 2a theta.
GeneratorSet so4_generators_euler(HbarConvention conv = HbarConvention::absent);

// The published transformed Rosen-Morse generator block, for comparison
// against the output of transform_generators.
GeneratorSet rm_generators_printed(HbarConvention conv = HbarConvention::absent);

// T^f = (f')^{-1/2} O_0 T O_0^{-1} (f')^{1/2} applied to every generator;
// f acts on the first (theta) variable only. The set's measure is tracked
// through the same steps.
GeneratorSet transform_generators(const GeneratorSet& gens, const Expr& f,
                                  const Interval& interval,
                                  const ValidationCtx& ctx);

// J1^2 + J2^2 + J3^2 (block 'J') or the K analogue.
DiffOp casimir(const GeneratorSet& gens, char block);

// Substitutes d/dphi -> i*l, d/dpsi -> i*m on the separable ansatz
// u(theta) e^{i(l phi + m psi)}; remaining phi/psi dependence in the
// coefficients is pinned at (phi0, psi0) after a numerical independence
// check (UnsupportedShape on failure).
DiffOp reduce_on_ansatz(const DiffOp& op, const Rational& l, const Rational& m,
                        double phi0 = 0.0, double psi0 = 0.0);

// All fifteen independent commutators of a set against the su(2)+su(2)
// table. Residual is the worst coefficient deviation.
struct CommutatorCheck {
  std::string name;
  double residual = 0;
  bool pass = false;
};
std::vector<CommutatorCheck> verify_structure_constants(
    const GeneratorSet& gens, const Box& box, const EqOptions& opts = {});

// Representation-theoretic spectra.
SpectrumResult pt_spectrum_from_rep(double gamma, double delta, int count,
                                    const PhysConsts& consts);
SpectrumResult rm_spectrum_from_rep(double A, double B,
                                    const PhysConsts& consts, int count);

}  // namespace specmorph
