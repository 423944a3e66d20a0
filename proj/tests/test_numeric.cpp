#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cuspidal/numeric.hpp"

using namespace cuspidal;
using numeric::cplx;

namespace {

// Quadrature oracle: K_n(x) = int_0^inf e^(-x cosh t) cosh(n t) dt.  The
// integrand is even and decays doubly exponentially, so the trapezoid rule is
// spectrally accurate.  Computed in log space to survive large n.
double bessel_k_oracle(int n, double x) {
  const double h = 0.125 / std::max(1.0, 0.5 * std::sqrt(x));
  double sum = 0.5 * std::exp(-x);  // t = 0 term: e^(-x), cosh(0) = 1
  for (int j = 1; j < 40000; ++j) {
    const double t = h * j;
    const double log_ch = n * t + std::log1p(std::exp(-2.0 * n * t)) - std::log(2.0);
    const double log_term = -x * std::cosh(t) + (n > 0 ? log_ch : 0.0);
    if (log_term < -745.0 && x * std::cosh(t) > x + 30.0 + std::abs(log_ch)) break;
    sum += std::exp(log_term);
  }
  return h * sum;
}

}  // namespace

TEST_CASE("bessel_k reference value at x = 1") {
  CHECK(numeric::bessel_k(0, 1.0) == doctest::Approx(0.4210244382407083).epsilon(1e-13));
  CHECK(numeric::bessel_k(0, 1.0) ==
        doctest::Approx(bessel_k_oracle(0, 1.0)).epsilon(1e-13));
}

TEST_CASE("bessel_k against the quadrature oracle") {
  // 100 log-spaced points over [1e-3, 700]
  for (int n : {0, 1, 2, 10, 22}) {
    for (int i = 0; i < 100; ++i) {
      const double x = 1e-3 * std::pow(700.0 / 1e-3, i / 99.0);
      const double ours = numeric::bessel_k(n, x);
      const double ref = bessel_k_oracle(n, x);
      if (ref == 0.0) continue;  // underflow region
      const double tol = n == 22 && x < 1.0 ? 1e-10 : 1e-12;
      CHECK(std::abs(ours / ref - 1.0) < tol);
    }
  }
}

TEST_CASE("bessel_k recurrence residual") {
  for (double x : {0.5, 5.0, 50.0}) {
    const double lhs = numeric::bessel_k(2, x);
    const double rhs = numeric::bessel_k(0, x) + (2.0 / x) * numeric::bessel_k(1, x);
    CHECK(std::abs(lhs / rhs - 1.0) < 1e-13);
  }
}

TEST_CASE("bessel_k asymptotic normalization at large x") {
  const double x = 600.0;
  for (int n : {0, 1, 3}) {
    const double v = numeric::bessel_k(n, x) * std::exp(x) *
                     std::sqrt(2.0 * x / std::numbers::pi);
    const double first_order = 1.0 + (4.0 * n * n - 1.0) / (8.0 * x);
    CHECK(std::abs(v - first_order) < 1e-2);
  }
}

TEST_CASE("bessel_k domain errors and underflow") {
  CHECK_THROWS_AS(numeric::bessel_k(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(numeric::bessel_k(0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(numeric::bessel_k(-1, 1.0), std::invalid_argument);
  CHECK(numeric::bessel_k(0, 800.0) == 0.0);
}

TEST_CASE("lstsq identity system") {
  const int k = 5;
  numeric::ComplexMatrix a(k, k);
  std::vector<cplx> b(k);
  numeric::SplitMix64 rng(3);
  for (int i = 0; i < k; ++i) {
    a.at(i, i) = 1.0;
    b[i] = cplx{rng.next_double(), rng.next_double()};
  }
  auto x = numeric::lstsq_solve(a, b);
  for (int i = 0; i < k; ++i) CHECK(std::abs(x[i] - b[i]) < 1e-14);
}

TEST_CASE("lstsq recovers consistent overdetermined systems") {
  const int k = 10, m = 20;
  numeric::SplitMix64 rng(17);
  numeric::ComplexMatrix a(m, k);
  std::vector<cplx> x0(k);
  for (auto& v : x0) v = cplx{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j)
      a.at(i, j) = cplx{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
  std::vector<cplx> b(m, cplx{0, 0});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) b[i] += a.at(i, j) * x0[j];
  auto x = numeric::lstsq_solve(a, b);
  for (int j = 0; j < k; ++j) CHECK(std::abs(x[j] - x0[j]) < 1e-10 * std::abs(x0[j]) + 1e-12);
}

TEST_CASE("lstsq optimality: normal equations hold and a probe cannot do better") {
  const int k = 20, m = 40;
  numeric::SplitMix64 rng(23);
  numeric::ComplexMatrix a(m, k);
  std::vector<cplx> b(m);
  double a_norm = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      a.at(i, j) = cplx{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
      a_norm += std::norm(a.at(i, j));
    }
    b[i] = cplx{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
  }
  a_norm = std::sqrt(a_norm);
  auto x = numeric::lstsq_solve(a, b);

  std::vector<cplx> r(m);
  double r_norm = 0.0;
  for (int i = 0; i < m; ++i) {
    r[i] = -b[i];
    for (int j = 0; j < k; ++j) r[i] += a.at(i, j) * x[j];
    r_norm += std::norm(r[i]);
  }
  const double objective = r_norm;
  r_norm = std::sqrt(r_norm);
  double atr = 0.0;
  for (int j = 0; j < k; ++j) {
    cplx s{0, 0};
    for (int i = 0; i < m; ++i) s += std::conj(a.at(i, j)) * r[i];
    atr += std::norm(s);
  }
  CHECK(std::sqrt(atr) <= 1e-9 * a_norm * r_norm);

  // brute-force probe: random perturbations never improve the objective
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<cplx> y = x;
    const int j = static_cast<int>(rng.next() % k);
    y[j] += cplx{1e-4 * (2.0 * rng.next_double() - 1.0),
                 1e-4 * (2.0 * rng.next_double() - 1.0)};
    double obj = 0.0;
    for (int i = 0; i < m; ++i) {
      cplx ri = -b[i];
      for (int jj = 0; jj < k; ++jj) ri += a.at(i, jj) * y[jj];
      obj += std::norm(ri);
    }
    CHECK(obj >= objective - 1e-12);
  }
}

TEST_CASE("lstsq rejects degenerate input") {
  numeric::ComplexMatrix a(3, 2);
  a.at(0, 0) = a.at(1, 0) = a.at(2, 0) = 1.0;
  // second column zero
  std::vector<cplx> b(3, cplx{1.0, 0.0});
  CHECK_THROWS(numeric::lstsq_solve(a, b));
  // duplicated columns make the Gram matrix singular
  numeric::ComplexMatrix a2(3, 2);
  for (int i = 0; i < 3; ++i) a2.at(i, 0) = a2.at(i, 1) = cplx{1.0, static_cast<double>(i)};
  CHECK_THROWS_AS(numeric::lstsq_solve(a2, b), std::runtime_error);
}

TEST_CASE("sample points: geometry and determinism") {
  numeric::SampleSpec spec;
  spec.mode = numeric::SampleMode::direct;
  spec.count = 64;
  spec.seed = 42;
  spec.c = 3;
  spec.d = -2;
  spec.h = 2;
  spec.decay = 1.0;
  const auto z1 = numeric::sample_points(spec);
  const auto z2 = numeric::sample_points(spec);
  CHECK(z1 == z2);  // bit-identical for a fixed seed
  const double center = 2.0 / 6.0;
  for (const auto& z : z1) {
    CHECK(z.imag() == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(z.real() >= center - 0.5);
    CHECK(z.real() <= center + 0.5);
  }
  spec.seed = 43;
  CHECK(numeric::sample_points(spec) != z1);

  spec.mode = numeric::SampleMode::eigen;
  spec.c = 3;
  spec.h = 3;
  const auto ze = numeric::sample_points(spec);
  const double sq3 = std::sqrt(3.0);
  for (const auto& z : ze) {
    CHECK(z.imag() >= 1.0 / (6.0 * sq3) - 1e-15);
    CHECK(z.imag() <= 1.0 / (3.0 * sq3) + 1e-15);
    CHECK(z.real() >= (2.0 - std::sqrt(1.5)) / 9.0 - 1e-15);
    CHECK(z.real() <= (2.0 + std::sqrt(1.5)) / 9.0 + 1e-15);
  }
}
