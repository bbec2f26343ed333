#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace specmorph {

// Symmetric tridiagonal matrix: diag[0..n-1], off[0..n-2].
struct Tridiag {
  std::vector<double> diag, off;
  std::size_t size() const { return diag.size(); }
};

enum class ExecPolicy { serial, parallel };

// Number of eigenvalues strictly below x (Sturm sequence count).
int sturm_count(const Tridiag& T, double x);

// Gershgorin enclosure of the spectrum.
std::pair<double, double> spectral_bounds(const Tridiag& T);

// Lowest k eigenvalues by bisection, ascending. Deterministic for fixed
// inputs regardless of policy; each index bisects independently, which is
// the data-parallel loop. The serial variant is the reference
// implementation the parallel one is tested against.
std::vector<double> eigenvalues_lowest_serial(const Tridiag& T, int k);
std::vector<double> eigenvalues_lowest_omp(const Tridiag& T, int k);
std::vector<double> eigenvalues_lowest(const Tridiag& T, int k,
                                       ExecPolicy policy = ExecPolicy::parallel);

// Solve (T - z) u = rhs with partial pivoting; SingularSystem if a pivot
// vanishes (only possible for real z in the spectrum).
std::vector<std::complex<double>> tridiag_solve_shifted(
    const Tridiag& T, std::complex<double> z,
    const std::vector<std::complex<double>>& rhs);
std::vector<double> tridiag_solve_shifted(const Tridiag& T, double z,
                                          const std::vector<double>& rhs);

// Batched shifted solves, parallel across shifts.
std::vector<std::vector<std::complex<double>>> solve_many_shifted(
    const Tridiag& T, const std::vector<std::complex<double>>& shifts,
    const std::vector<std::complex<double>>& rhs,
    ExecPolicy policy = ExecPolicy::parallel);

struct EigenPairs {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // unit Euclidean norm
};

// Lowest k eigenpairs: bisection eigenvalues plus inverse iteration, with
// Gram-Schmidt re-orthogonalization inside near-degenerate clusters.
EigenPairs eigenpairs_lowest(const Tridiag& T, int k,
                             ExecPolicy policy = ExecPolicy::parallel,
                             std::uint64_t seed = 1234);

}  // namespace specmorph
