#include "specmorph/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "specmorph/error.hpp"

namespace specmorph {

int sturm_count(const Tridiag& T, double x) {
  const std::size_t n = T.size();
  int count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min() /
                      std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < n; ++i) {
    double off2 = i == 0 ? 0.0 : T.off[i - 1] * T.off[i - 1];
    q = T.diag[i] - x - (i == 0 ? 0.0 : off2 / q);
    if (q == 0.0) q = tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> spectral_bounds(const Tridiag& T) {
  const std::size_t n = T.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(T.off[i - 1]) : 0.0) +
               (i + 1 < n ? std::abs(T.off[i]) : 0.0);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  return {lo, hi};
}

namespace {

double bisect_eigenvalue(const Tridiag& T, int index, double lo, double hi) {
  // Smallest x with sturm_count(x) > index.
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(T, mid) > index)
      hi = mid;
    else
      lo = mid;
    double tol = 4 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(lo), std::abs(hi)) +
                 1e-290;
    if (hi - lo <= tol) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> eigenvalues_lowest_serial(const Tridiag& T, int k) {
  auto [lo, hi] = spectral_bounds(T);
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out[j] = bisect_eigenvalue(T, j, lo, hi);
  return out;
}

std::vector<double> eigenvalues_lowest_omp(const Tridiag& T, int k) {
  auto [lo, hi] = spectral_bounds(T);
  std::vector<double> out(static_cast<std::size_t>(k));
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < k; ++j) out[j] = bisect_eigenvalue(T, j, lo, hi);
  return out;
}

std::vector<double> eigenvalues_lowest(const Tridiag& T, int k,
                                       ExecPolicy policy) {
  if (k < 0 || static_cast<std::size_t>(k) > T.size())
    fail(ErrorKind::convergence_failure, "eigenvalue count out of range");
  return policy == ExecPolicy::serial ? eigenvalues_lowest_serial(T, k)
                                      : eigenvalues_lowest_omp(T, k);
}

namespace {

// LU solve of (T - z) u = rhs with partial pivoting; generic over real and
// complex scalars.
template <typename Scalar>
std::vector<Scalar> solve_shifted_impl(const Tridiag& T, Scalar z,
                                       const std::vector<Scalar>& rhs) {
  const std::size_t n = T.size();
  if (rhs.size() != n)
    fail(ErrorKind::singular_system, "rhs size mismatch");
  // Bands: b = subdiag, d = diag, e = superdiag, f = super-superdiag (fill-in).
  std::vector<Scalar> d(n), e(n, Scalar(0)), f(n, Scalar(0)), u = rhs;
  for (std::size_t i = 0; i < n; ++i) d[i] = Scalar(T.diag[i]) - z;
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = Scalar(T.off[i]);

  std::vector<Scalar> b(n, Scalar(0));
  for (std::size_t i = 1; i < n; ++i) b[i] = Scalar(T.off[i - 1]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(b[i + 1]) > std::abs(d[i])) {
      std::swap(d[i], b[i + 1]);
      std::swap(e[i], d[i + 1]);
      std::swap(f[i], e[i + 1]);
      std::swap(u[i], u[i + 1]);
    }
    if (d[i] == Scalar(0))
      fail(ErrorKind::singular_system, "zero pivot in tridiagonal solve");
    Scalar m = b[i + 1] / d[i];
    d[i + 1] -= m * e[i];
    e[i + 1] -= m * f[i];
    u[i + 1] -= m * u[i];
  }
  if (d[n - 1] == Scalar(0))
    fail(ErrorKind::singular_system, "zero pivot in tridiagonal solve");
  for (std::size_t ii = n; ii-- > 0;) {
    Scalar acc = u[ii];
    if (ii + 1 < n) acc -= e[ii] * u[ii + 1];
    if (ii + 2 < n) acc -= f[ii] * u[ii + 2];
    u[ii] = acc / d[ii];
  }
  return u;
}

}  // namespace

std::vector<std::complex<double>> tridiag_solve_shifted(
    const Tridiag& T, std::complex<double> z,
    const std::vector<std::complex<double>>& rhs) {
  return solve_shifted_impl(T, z, rhs);
}

std::vector<double> tridiag_solve_shifted(const Tridiag& T, double z,
                                          const std::vector<double>& rhs) {
  return solve_shifted_impl(T, z, rhs);
}

std::vector<std::vector<std::complex<double>>> solve_many_shifted(
    const Tridiag& T, const std::vector<std::complex<double>>& shifts,
    const std::vector<std::complex<double>>& rhs, ExecPolicy policy) {
  std::vector<std::vector<std::complex<double>>> out(shifts.size());
  if (policy == ExecPolicy::serial) {
    for (std::size_t i = 0; i < shifts.size(); ++i)
      out[i] = tridiag_solve_shifted(T, shifts[i], rhs);
    return out;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < shifts.size(); ++i)
    out[i] = tridiag_solve_shifted(T, shifts[i], rhs);
  return out;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

EigenPairs eigenpairs_lowest(const Tridiag& T, int k, ExecPolicy policy,
                             std::uint64_t seed) {
  EigenPairs out;
  out.values = eigenvalues_lowest(T, k, policy);
  out.vectors.resize(out.values.size());
  auto [lo, hi] = spectral_bounds(T);
  double scale = std::max(std::abs(lo), std::abs(hi)) + 1.0;

  for (std::size_t j = 0; j < out.values.size(); ++j) {
    std::mt19937_64 rng(seed + j);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const std::size_t n = T.size();
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    // Nudge the shift off the exact eigenvalue to keep the solve regular.
    double shift = out.values[j] + 1e-13 * scale;
    auto residual = [&](const std::vector<double>& w) {
      double res = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = (T.diag[i] - out.values[j]) * w[i];
        if (i > 0) r += T.off[i - 1] * w[i - 1];
        if (i + 1 < n) r += T.off[i] * w[i + 1];
        res += r * r;
      }
      return std::sqrt(res);
    };
    const double floor = 64 * std::numeric_limits<double>::epsilon() * scale;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_v;
    for (int it = 0; it < 30; ++it) {
      v = tridiag_solve_shifted(T, shift, v);
      // Orthogonalize inside near-degenerate clusters.
      for (std::size_t p = 0; p < j; ++p)
        if (std::abs(out.values[p] - out.values[j]) < 1e-8 * scale)
          axpy(v, -dot(v, out.vectors[p]), out.vectors[p]);
      double nv = norm2(v);
      if (!(nv > 0) || !std::isfinite(nv))
        fail(ErrorKind::convergence_failure, "inverse iteration collapsed");
      for (double& x : v) x /= nv;
      double res = residual(v);
      if (res < best) {
        best = res;
        best_v = v;
        if (best <= floor) break;
      } else {
        break;  // stopped improving
      }
    }
    v = std::move(best_v);
    if (!(best <= 1e-8 * scale))
      fail(ErrorKind::convergence_failure,
           "inverse iteration did not converge");
    // Deterministic sign convention: first significant entry positive.
    for (double x : v) {
      if (std::abs(x) > 1e-8) {
        if (x < 0)
          for (double& y : v) y = -y;
        break;
      }
    }
    out.vectors[j] = std::move(v);
  }
  return out;
}

}  // namespace specmorph
