#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "specmorph/error.hpp"
#include "specmorph/kernels.hpp"

using namespace specmorph;

namespace {

Tridiag laplacian(std::size_t n, double h) {
  Tridiag T;
  T.diag.assign(n, 2.0 / (h * h));
  T.off.assign(n - 1, -1.0 / (h * h));
  return T;
}

Tridiag random_tridiag(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tridiag T;
  T.diag.resize(n);
  T.off.resize(n - 1);
  for (auto& d : T.diag) d = 2.0 + dist(rng);
  for (auto& e : T.off) e = dist(rng);
  return T;
}

}  // namespace

TEST_CASE("bisection reproduces the exact Dirichlet Laplacian spectrum") {
  const std::size_t n = 200;
  const double h = 0.01;
  Tridiag T = laplacian(n, h);
  auto vals = eigenvalues_lowest(T, 8, ExecPolicy::serial);
  for (int k = 1; k <= 8; ++k) {
    double exact =
        4.0 / (h * h) * std::pow(std::sin(k * M_PI / (2.0 * (n + 1))), 2);
    CHECK(vals[k - 1] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("sturm counts bracket the spectrum") {
  Tridiag T = random_tridiag(64, 3);
  auto [lo, hi] = spectral_bounds(T);
  CHECK(sturm_count(T, lo - 1e-9) == 0);
  CHECK(sturm_count(T, hi + 1e-9) == 64);
  auto vals = eigenvalues_lowest(T, 64, ExecPolicy::serial);
  CHECK(std::is_sorted(vals.begin(), vals.end()));
}

TEST_CASE("parallel eigenvalues agree with the serial reference") {
  Tridiag T = random_tridiag(500, 11);
  auto s = eigenvalues_lowest_serial(T, 20);
  auto p = eigenvalues_lowest_omp(T, 20);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(s[i] == doctest::Approx(p[i]).epsilon(1e-14));
}

TEST_CASE("shifted tridiagonal solve has small residual") {
  const std::size_t n = 300;
  Tridiag T = random_tridiag(n, 17);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<std::complex<double>> rhs(n);
  for (auto& r : rhs) r = {dist(rng), dist(rng)};
  std::complex<double> z{0.5, 1e-6};
  auto u = tridiag_solve_shifted(T, z, rhs);
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> r = (T.diag[i] - z) * u[i] - rhs[i];
    if (i > 0) r += T.off[i - 1] * u[i - 1];
    if (i + 1 < n) r += T.off[i] * u[i + 1];
    worst = std::max(worst, std::abs(r));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("batched solves match one-at-a-time solves") {
  const std::size_t n = 128;
  Tridiag T = random_tridiag(n, 29);
  std::vector<std::complex<double>> rhs(n, {1.0, 0.0});
  std::vector<std::complex<double>> shifts;
  for (int i = 0; i < 12; ++i) shifts.push_back({-2.0 - 0.3 * i, 1e-6});
  auto batch = solve_many_shifted(T, shifts, rhs, ExecPolicy::parallel);
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    auto one = tridiag_solve_shifted(T, shifts[i], rhs);
    double d = 0;
    for (std::size_t j = 0; j < n; ++j)
      d = std::max(d, std::abs(one[j] - batch[i][j]));
    CHECK(d == 0.0);  // identical code path, identical results
  }
}

TEST_CASE("eigenpairs: residuals and orthogonality") {
  Tridiag T = laplacian(400, 0.01);
  auto pairs = eigenpairs_lowest(T, 6, ExecPolicy::parallel);
  for (std::size_t j = 0; j < 6; ++j) {
    const auto& v = pairs.vectors[j];
    double res = 0;
    for (std::size_t i = 0; i < T.size(); ++i) {
      double r = (T.diag[i] - pairs.values[j]) * v[i];
      if (i > 0) r += T.off[i - 1] * v[i - 1];
      if (i + 1 < T.size()) r += T.off[i] * v[i + 1];
      res += r * r;
    }
    CHECK(std::sqrt(res) < 1e-8 * std::abs(pairs.values[j]));
    for (std::size_t p = 0; p < j; ++p) {
      double ip = 0;
      for (std::size_t i = 0; i < T.size(); ++i)
        ip += v[i] * pairs.vectors[p][i];
      CHECK(std::abs(ip) < 1e-8);
    }
  }
}

TEST_CASE("solving exactly on a real eigenvalue reports a singular system") {
  Tridiag T;
  T.diag = {1.0, 1.0};
  T.off = {0.0};
  std::vector<double> rhs = {1.0, 1.0};
  CHECK_THROWS_AS(tridiag_solve_shifted(T, 1.0, rhs), Error);
}
