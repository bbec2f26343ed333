#include "specmorph/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "specmorph/error.hpp"

namespace specmorph {

std::vector<double> Grid::points() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = point(i);
  return out;
}

namespace {

Expr::Bindings full_bindings(const std::map<Symbol, double>& params,
                             const PhysConsts& consts) {
  Expr::Bindings b = standard_bindings(consts);
  for (auto& [s, v] : params) b[s] = v;
  return b;
}

double eval_potential(const PotentialSpec& spec, Expr::Bindings& b, double x) {
  b[spec.var] = x;
  return spec.potential.eval_real(b);
}

}  // namespace

Grid make_inset_grid(const PotentialSpec& spec,
                     const std::map<Symbol, double>& params,
                     const PhysConsts& consts, double lo, double hi, int n,
                     double cap) {
  if (cap <= 0)
    cap = 1e4 * consts.hbar * consts.hbar * consts.a * consts.a / consts.mu;
  Expr::Bindings b = full_bindings(params, consts);
  auto blows_up = [&](double x) {
    try {
      return std::abs(eval_potential(spec, b, x)) > cap;
    } catch (const Error&) {
      return true;
    }
  };
  double step = (hi - lo) / 4096.0;
  double glo = lo, ghi = hi;
  if (spec.lo.type == EndpointType::singular)
    while (glo < ghi - step && blows_up(glo + step)) glo += step;
  if (spec.hi.type == EndpointType::singular)
    while (ghi > glo + step && blows_up(ghi - step)) ghi -= step;
  return Grid{spec.var, glo, ghi, n};
}

GridOperator fd_hamiltonian(const PotentialSpec& spec,
                            const std::map<Symbol, double>& params,
                            const PhysConsts& consts, const Grid& grid) {
  if (grid.n < 16) fail(ErrorKind::domain_error, "grid needs n >= 16");
  if (!(grid.lo < grid.hi)) fail(ErrorKind::domain_error, "grid lo >= hi");
  if (spec.lo.type != EndpointType::infinite &&
      grid.lo < spec.lo.value(consts) - 1e-12)
    fail(ErrorKind::domain_error, "grid extends past the lower endpoint");
  if (spec.hi.type != EndpointType::infinite &&
      grid.hi > spec.hi.value(consts) + 1e-12)
    fail(ErrorKind::domain_error, "grid extends past the upper endpoint");
  if (spec.lo.type == EndpointType::singular &&
      !(grid.lo > spec.lo.value(consts)))
    fail(ErrorKind::domain_error, "grid touches the singular lower endpoint");
  if (spec.hi.type == EndpointType::singular &&
      !(grid.hi < spec.hi.value(consts)))
    fail(ErrorKind::domain_error, "grid touches the singular upper endpoint");

  Expr::Bindings b = full_bindings(params, consts);
  const double h = grid.h();
  const double kin = consts.hbar * consts.hbar / (consts.mu * h * h);
  GridOperator H;
  H.grid = grid;
  H.consts = consts;
  H.matrix.diag.resize(static_cast<std::size_t>(grid.n));
  H.matrix.off.assign(static_cast<std::size_t>(grid.n - 1), -0.5 * kin);
  for (int i = 0; i < grid.n; ++i) {
    double V;
    try {
      V = eval_potential(spec, b, grid.point(i));
    } catch (const Error& e) {
      fail(ErrorKind::domain_error,
           "potential singular at grid node: " + std::string(e.what()));
    }
    if (!std::isfinite(V))
      fail(ErrorKind::domain_error, "potential not finite at grid node");
    H.matrix.diag[static_cast<std::size_t>(i)] = kin + V;
  }
  H.provenance = spec.id;
  return H;
}

FdSpectrum fd_eigs(const GridOperator& H, int count, ExecPolicy policy) {
  if (count > H.grid.n / 4)
    fail(ErrorKind::convergence_failure,
         "requested eigenvalue count exceeds n/4 discretization heuristic");
  EigenPairs pairs = eigenpairs_lowest(H.matrix, count, policy);
  FdSpectrum out;
  out.grid = H.grid;
  out.energies = pairs.values;
  const double s = 1.0 / std::sqrt(H.grid.h());
  out.wavefunctions.resize(pairs.vectors.size());
  for (std::size_t j = 0; j < pairs.vectors.size(); ++j) {
    out.wavefunctions[j] = pairs.vectors[j];
    for (double& v : out.wavefunctions[j]) v *= s;
  }
  return out;
}

std::vector<bool> flag_continuum_artifacts(
    const PotentialSpec& spec, const std::map<Symbol, double>& params,
    const PhysConsts& consts, const Grid& grid,
    const std::vector<double>& energies, ExecPolicy policy) {
  // Enlarge the box (where the endpoint is not singular) keeping h fixed.
  double stretch = 0.25 * (grid.hi - grid.lo);
  Grid big = grid;
  if (spec.lo.type == EndpointType::infinite) big.lo -= stretch;
  if (spec.hi.type == EndpointType::infinite) big.hi += stretch;
  big.n = static_cast<int>(std::lround((big.hi - big.lo) / grid.h())) - 1;
  GridOperator Hbig = fd_hamiltonian(spec, params, consts, big);
  auto moved = eigenvalues_lowest(Hbig.matrix,
                                  static_cast<int>(energies.size()), policy);
  std::vector<bool> flags(energies.size(), false);
  double scale =
      consts.hbar * consts.hbar * consts.a * consts.a / consts.mu;
  for (std::size_t i = 0; i < energies.size(); ++i)
    flags[i] = std::abs(moved[i] - energies[i]) > 1e-3 * scale;
  return flags;
}

std::complex<double> resolvent_green(const GridOperator& H, double E,
                                     double eps, int i0, int i_f) {
  if (!(eps > 0)) fail(ErrorKind::singular_system, "resolvent needs eps > 0");
  std::vector<std::complex<double>> rhs(static_cast<std::size_t>(H.grid.n),
                                        {0, 0});
  rhs[static_cast<std::size_t>(i0)] = H.consts.hbar / H.grid.h();
  auto u = tridiag_solve_shifted(H.matrix, {E, eps}, rhs);
  return u[static_cast<std::size_t>(i_f)];
}

std::complex<double> resolvent_green_at(const GridOperator& H, double E,
                                        double eps, double x0, double xf) {
  if (!(eps > 0)) fail(ErrorKind::singular_system, "resolvent needs eps > 0");
  const double h = H.grid.h();
  auto locate = [&](double x) -> std::pair<int, double> {
    double t = (x - H.grid.lo) / h - 1.0;
    int i = static_cast<int>(std::floor(t));
    double w = t - i;
    if (i < 0 || i + 1 >= H.grid.n)
      fail(ErrorKind::interpolation_out_of_range,
           "point outside the grid interior");
    return {i, w};
  };
  auto [j0, w0] = locate(x0);
  std::vector<std::complex<double>> rhs(static_cast<std::size_t>(H.grid.n),
                                        {0, 0});
  rhs[static_cast<std::size_t>(j0)] = (1.0 - w0) * H.consts.hbar / h;
  rhs[static_cast<std::size_t>(j0 + 1)] = w0 * H.consts.hbar / h;
  auto u = tridiag_solve_shifted(H.matrix, {E, eps}, rhs);
  auto [jf, wf] = locate(xf);
  return (1.0 - wf) * u[static_cast<std::size_t>(jf)] +
         wf * u[static_cast<std::size_t>(jf + 1)];
}

std::complex<double> spectral_sum_green(const GridOperator& H, double E,
                                        double eps, int i0, int i_f,
                                        ExecPolicy policy) {
  const int n = H.grid.n;
  EigenPairs all = eigenpairs_lowest(H.matrix, n, policy);
  std::complex<double> z{E, eps};
  std::complex<double> acc{0, 0};
  for (int k = 0; k < n; ++k) {
    const auto& v = all.vectors[static_cast<std::size_t>(k)];
    acc += v[static_cast<std::size_t>(i_f)] * v[static_cast<std::size_t>(i0)] /
           (all.values[static_cast<std::size_t>(k)] - z);
  }
  return acc * (H.consts.hbar / H.grid.h());
}

namespace {

Symbol strip_prime(const Symbol& s) {
  if (!s.name.empty() && s.name.back() == '\'')
    return Symbol{s.name.substr(0, s.name.size() - 1), s.kind};
  return s;
}

}  // namespace

PropagatorCheck verify_propagator_relation(
    const PropagatorRelation& rel, const std::map<Symbol, double>& source_params,
    const PhysConsts& consts, const std::vector<double>& energies,
    const std::vector<std::pair<double, double>>& points,
    const Grid& source_grid, const Grid& target_grid, double eps,
    bool corrupt_prefactor, ExecPolicy policy) {
  const PotentialSpec& src = catalog().get(rel.source_id);
  const PotentialSpec& tgt = catalog().get(rel.target_id);
  if (eps <= 0)
    eps = 1e-6 * consts.hbar * consts.hbar * consts.a * consts.a / consts.mu;

  GridOperator Hsrc = fd_hamiltonian(src, source_params, consts, source_grid);

  PropagatorCheck out;
  out.eps = eps;
  out.corrupted = corrupt_prefactor;
  Expr::Bindings base = full_bindings(source_params, consts);

  for (double E : energies) {
    Expr::Bindings bE = base;
    bE[syms::E()] = E;
    std::map<Symbol, double> tgt_params;
    double E_target = 0;
    for (const auto& [ps, expr] : rel.parameter_map) {
      double v = expr.eval_real(bE);
      Symbol bare = strip_prime(ps);
      if (bare == syms::E())
        E_target = v;
      else
        tgt_params[bare] = v;
    }
    GridOperator Htgt = fd_hamiltonian(tgt, tgt_params, consts, target_grid);

    for (auto& [x0, xf] : points) {
      auto lhs = resolvent_green_at(Hsrc, E, eps, x0, xf);
      Expr::Bindings b0 = bE, bf = bE;
      b0[rel.endpoint_var] = x0;
      bf[rel.endpoint_var] = xf;
      double u0 = rel.argument_map.eval_real(b0);
      double uf = rel.argument_map.eval_real(bf);
      std::complex<double> pref =
          corrupt_prefactor ? 1.0
                            : rel.endpoint_prefactor.eval(bf) *
                                  rel.endpoint_prefactor.eval(b0);
      auto g_t = resolvent_green_at(Htgt, E_target, eps, u0, uf);
      std::complex<double> rhs = rel.overall_constant * pref * g_t;
      double rel_dev = std::abs(lhs - rhs) / std::abs(lhs);
      out.samples.push_back({E, x0, xf, lhs, rhs, rel_dev});
      out.max_rel_deviation = std::max(out.max_rel_deviation, rel_dev);
    }
  }
  (void)policy;
  return out;
}

namespace {

// Fritsch-Carlson monotone cubic interpolant.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    std::vector<double> d(n - 1), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0) {
        m_[i] = 0;
      } else {
        double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
  }

  double operator()(double x) const {
    if (x < x_.front() || x > x_.back())
      fail(ErrorKind::interpolation_out_of_range,
           "interpolation point outside the source grid");
    std::size_t i =
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) -
                                 x_.begin());
    if (i == 0) i = 1;
    if (i >= x_.size()) i = x_.size() - 1;
    --i;
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * m_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * m_[i + 1] * (t3 - t2);
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace

MappedState map_wavefunction(const std::vector<double>& psi,
                             const Grid& source_grid,
                             const PropagatorRelation& rel, const DiffOp& Sf,
                             const Grid& target_grid,
                             const Expr::Bindings& bindings,
                             bool isometry_stage) {
  if (psi.size() != static_cast<std::size_t>(source_grid.n))
    fail(ErrorKind::interpolation_out_of_range, "eigenvector/grid mismatch");
  // Include the Dirichlet endpoints so mapped points near the walls stay in
  // range.
  std::vector<double> xs, ys;
  xs.reserve(psi.size() + 2);
  ys.reserve(psi.size() + 2);
  xs.push_back(source_grid.lo);
  ys.push_back(0.0);
  for (int i = 0; i < source_grid.n; ++i) {
    xs.push_back(source_grid.point(i));
    ys.push_back(psi[static_cast<std::size_t>(i)]);
  }
  xs.push_back(source_grid.hi);
  ys.push_back(0.0);
  Pchip interp(xs, ys);

  const Expr& weight = isometry_stage ? rel.isometry_weight : rel.kernel_weight;
  MappedState out;
  out.values.resize(static_cast<std::size_t>(target_grid.n));
  Expr::Bindings b = bindings;
  for (int i = 0; i < target_grid.n; ++i) {
    double u = target_grid.point(i);
    b[rel.final_var] = u;
    double x = rel.inverse_argument_map.eval_real(b);
    double w = weight.eval_real(b);
    out.values[static_cast<std::size_t>(i)] = w * interp(x);
  }

  if (!isometry_stage) {
    // Grid residual || Sf chi || / || chi || using the row coefficients.
    DiffOp::MultiIndex zero(Sf.variables().size(), 0);
    auto idx_of = [&](int order) {
      DiffOp::MultiIndex ix = zero;
      for (std::size_t k = 0; k < Sf.variables().size(); ++k)
        if (Sf.variables()[k] == rel.final_var) ix[k] = order;
      return ix;
    };
    Expr c0 = Sf.coefficient(idx_of(0));
    Expr c1 = Sf.coefficient(idx_of(1));
    Expr c2 = Sf.coefficient(idx_of(2));
    const double h = target_grid.h();
    double num = 0, den = 0;
    for (int i = 2; i + 2 < target_grid.n; ++i) {
      b[rel.final_var] = target_grid.point(i);
      std::complex<double> v0 = c0.eval(b), v1 = c1.eval(b), v2 = c2.eval(b);
      const auto& chi = out.values;
      double d1 = (chi[i + 1] - chi[i - 1]) / (2 * h);
      double d2 = (chi[i + 1] - 2 * chi[i] + chi[i - 1]) / (h * h);
      std::complex<double> r = v2 * d2 + v1 * d1 + v0 * chi[i];
      num += std::norm(r);
      den += chi[i] * chi[i];
    }
    if (den == 0) fail(ErrorKind::interpolation_out_of_range, "empty overlap");
    out.residual = std::sqrt(num / den);
  }
  return out;
}

double measure_inner(const std::vector<double>& u, const std::vector<double>& v,
                     const Grid& grid, const Measure& mu,
                     const Expr::Bindings& bindings) {
  Expr::Bindings b = bindings;
  double acc = 0;
  for (int i = 0; i < grid.n; ++i) {
    b[grid.var] = grid.point(i);
    double w = std::abs(mu.constant * mu.density.eval_real(b));
    acc += w * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
  }
  return acc * grid.h();
}

double measure_norm(const std::vector<double>& v, const Grid& grid,
                    const Measure& mu, const Expr::Bindings& bindings) {
  return std::sqrt(measure_inner(v, v, grid, mu, bindings));
}

}  // namespace specmorph
