#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "specmorph/kernels.hpp"
#include "specmorph/potentials.hpp"
#include "specmorph/xform.hpp"

namespace specmorph {

// Uniform grid with Dirichlet walls at lo and hi; the n unknowns sit at the
// interior nodes lo + (i+1) h.
struct Grid {
  Symbol var;
  double lo = 0, hi = 1;
  int n = 16;
  double h() const { return (hi - lo) / (n + 1); }
  double point(int i) const { return lo + (i + 1) * h(); }
  std::vector<double> points() const;
};

struct GridOperator {
  Tridiag matrix;
  Grid grid;
  PhysConsts consts;
  std::string provenance;
};

// Shrinks a requested box so |V| stays below cap (default 1e4 * hbar^2 a^2/mu)
// near singular endpoints.
Grid make_inset_grid(const PotentialSpec& spec,
                     const std::map<Symbol, double>& params,
                     const PhysConsts& consts, double lo, double hi, int n,
                     double cap = -1);

// Second-order central-difference Hamiltonian with the potential on the
// diagonal and Dirichlet boundaries. DomainError if the grid touches a
// singularity or V fails to evaluate at a node.
GridOperator fd_hamiltonian(const PotentialSpec& spec,
                            const std::map<Symbol, double>& params,
                            const PhysConsts& consts, const Grid& grid);

struct FdSpectrum {
  std::vector<double> energies;
  // Wavefunctions normalized in the grid measure: sum psi_i^2 h = 1.
  std::vector<std::vector<double>> wavefunctions;
  Grid grid;
};

// Lowest `count` eigenpairs; ConvergenceFailure if count > n/4 (the
// discretization validity heuristic).
FdSpectrum fd_eigs(const GridOperator& H, int count,
                   ExecPolicy policy = ExecPolicy::parallel);

// Entries of `energies` that move under box enlargement (continuum
// artifacts of the finite box) are flagged true.
std::vector<bool> flag_continuum_artifacts(
    const PotentialSpec& spec, const std::map<Symbol, double>& params,
    const PhysConsts& consts, const Grid& grid,
    const std::vector<double>& energies,
    ExecPolicy policy = ExecPolicy::parallel);

// Causal grid resolvent: solves (H - E - i eps) g = hbar delta_{x0}/h and
// returns g at xf. Index form and off-grid (linearly interpolated) form.
std::complex<double> resolvent_green(const GridOperator& H, double E,
                                     double eps, int i0, int i_f);
std::complex<double> resolvent_green_at(const GridOperator& H, double E,
                                        double eps, double x0, double xf);

// Brute-force spectral sum over all grid eigenpairs; equivalence with the
// direct solve is the resolvent identity test.
std::complex<double> spectral_sum_green(const GridOperator& H, double E,
                                        double eps, int i0, int i_f,
                                        ExecPolicy policy = ExecPolicy::parallel);

struct PropagatorSample {
  double E, x0, xf;
  std::complex<double> lhs, rhs;
  double rel_deviation;
};

struct PropagatorCheck {
  double max_rel_deviation = 0;
  std::vector<PropagatorSample> samples;
  double eps = 0;
  bool corrupted = false;
};

// Grid-resolvent verification of a propagator relation:
//   G_src(x0,xf,E) = overall * h(xf) h(x0) * G_tgt(M(x0),M(xf); mapped params)
// Energies must stay below both spectra. `corrupt_prefactor` replaces h by 1
// (the falsifiability control).
PropagatorCheck verify_propagator_relation(
    const PropagatorRelation& rel, const std::map<Symbol, double>& source_params,
    const PhysConsts& consts, const std::vector<double>& energies,
    const std::vector<std::pair<double, double>>& points,
    const Grid& source_grid, const Grid& target_grid, double eps = -1,
    bool corrupt_prefactor = false, ExecPolicy policy = ExecPolicy::parallel);

struct MappedState {
  std::vector<double> values;  // on the target grid, unnormalized
  double residual = 0;         // ||S_f chi|| / ||chi||, kernel stage only
};

// Maps a source-grid eigenvector through the relation: resample through the
// forward coordinate map (monotone cubic interpolation) and multiply by the
// kernel weight (or the measure-isometric weight when isometry_stage).
// `bindings` must cover the parameters and the source energy symbol.
MappedState map_wavefunction(const std::vector<double>& psi,
                             const Grid& source_grid,
                             const PropagatorRelation& rel, const DiffOp& Sf,
                             const Grid& target_grid,
                             const Expr::Bindings& bindings,
                             bool isometry_stage = false);

// Measure-weighted norm and inner product on a grid.
double measure_norm(const std::vector<double>& v, const Grid& grid,
                    const Measure& mu, const Expr::Bindings& bindings);
double measure_inner(const std::vector<double>& u, const std::vector<double>& v,
                     const Grid& grid, const Measure& mu,
                     const Expr::Bindings& bindings);

}  // namespace specmorph
