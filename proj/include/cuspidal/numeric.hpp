#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace cuspidal::numeric {

using cplx = std::complex<double>;

// Modified Bessel function K_n(x) for integer order 0 <= n <= 64, x > 0.
// Relative error <= 1e-13 on [1e-3, 700]; underflows to 0 for very large x.
double bessel_k(int n, double x);

struct ComplexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> data;  // row-major

  ComplexMatrix() = default;
  ComplexMatrix(int m, int k) : rows(m), cols(k), data(static_cast<std::size_t>(m) * k) {}
  cplx& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  const cplx& at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// Least-squares solution of A x = b via the normal equations (A^H A) x = A^H b.
// Columns are scaled to unit norm before forming the Gram matrix; the Hermitian
// system is solved by Cholesky with a partial-pivot LU fallback.  Throws
// std::runtime_error when the Gram matrix is numerically singular.
std::vector<cplx> lstsq_solve(const ComplexMatrix& a, const std::vector<cplx>& b,
                              int threads = 1);

// Fixed 64-bit generator so sample points reproduce bit-identically.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double next_double();  // uniform in [0, 1), 53 bits
};

enum class SampleMode { direct, eigen };

struct SampleSpec {
  SampleMode mode = SampleMode::direct;
  int count = 0;
  std::uint64_t seed = 0;
  // geometry of alpha_h = alpha_1 * diag(h, 1): c, d from alpha_1, width h
  std::int64_t c = 1;
  std::int64_t d = 0;
  std::int64_t h = 1;
  double decay = 1.0;  // C, direct mode only: Im z = C / 2pi
};

// Deterministic for a fixed seed.  direct: Im z = C/2pi, Re z uniform in the
// unit interval centered at -d/(ch).  eigen: Im z in [1/(2c sqrt h), 1/(c sqrt h)],
// Re z in [-d -+ sqrt(h/2)]/(ch).
std::vector<cplx> sample_points(const SampleSpec& spec);

}  // namespace cuspidal::numeric
