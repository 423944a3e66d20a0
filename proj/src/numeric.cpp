#include "cuspidal/numeric.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#ifdef CUSPIDAL_HAVE_OPENMP
#include <omp.h>
#endif

namespace cuspidal::numeric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Ascending series for K0, K1 (x <= 2).
void bessel_k01_series(double x, double& k0, double& k1) {
  const double t = x * x / 4.0;
  const double lg = std::log(x / 2.0);

  double term = 1.0;       // t^j / (j!)^2
  double i0 = 1.0;
  double h = 0.0;          // harmonic number H_j
  double s0 = 0.0;         // sum t^j/(j!)^2 * H_j
  double term1 = 1.0;      // t^j / (j! (j+1)!)
  double i1sum = 1.0;
  double s1 = 1.0;         // sum (psi(j+1)+psi(j+2)+2*gamma) * t^j/(j!(j+1)!)
  for (int j = 1; j < 64; ++j) {
    term *= t / (static_cast<double>(j) * j);
    h += 1.0 / j;
    i0 += term;
    s0 += term * h;
    term1 *= t / (static_cast<double>(j) * (j + 1));
    i1sum += term1;
    s1 += term1 * (2.0 * h + 1.0 / (j + 1));
    if (term < 1e-18 * i0 && term1 < 1e-18 * i1sum) break;
  }
  const double i1 = (x / 2.0) * i1sum;
  k0 = -(lg + kEulerGamma) * i0 + s0;
  // psi(j+1) + psi(j+2) = -2*gamma + 2*H_j + 1/(j+1)
  k1 = 1.0 / x + lg * i1 - (x / 4.0) * (s1 - 2.0 * kEulerGamma * i1sum);
}

// Asymptotic expansion; fails (returns false) when the series stalls before
// reaching tolerance, which happens for moderate x.
bool bessel_k01_asymptotic(double x, double& k0, double& k1) {
  const double pref = std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
  double mu, sum, term;
  for (int nu = 0; nu <= 1; ++nu) {
    mu = 4.0 * nu * nu;
    sum = 1.0;
    term = 1.0;
    double prev = 1.0;
    bool converged = false;
    for (int j = 1; j < 40; ++j) {
      const double odd = 2.0 * j - 1.0;
      term *= (mu - odd * odd) / (8.0 * x * j);
      if (std::abs(term) >= std::abs(prev)) break;  // stalled
      sum += term;
      prev = term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) {
        converged = true;
        break;
      }
    }
    if (!converged) return false;
    (nu == 0 ? k0 : k1) = pref * sum;
  }
  return true;
}

// Steed's continued fraction CF2 for K_0, K_1; good for x >= 2.
void bessel_k01_cf2(double x, double& k0, double& k1) {
  constexpr double eps = 1e-16;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 5000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) <= eps) break;
  }
  h = a1 * h;
  k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace

double bessel_k(int n, double x) {
  if (x <= 0.0) throw std::invalid_argument("bessel_k: x must be positive");
  if (n < 0 || n > 64) throw std::invalid_argument("bessel_k: order out of range");
  double k0 = 0.0, k1 = 0.0;
  if (x <= 2.0) {
    bessel_k01_series(x, k0, k1);
  } else if (!bessel_k01_asymptotic(x, k0, k1)) {
    bessel_k01_cf2(x, k0, k1);
  }
  if (n == 0) return k0;
  if (n == 1) return k1;
  // Upward recurrence, stable for K.
  double km = k0, k = k1;
  for (int j = 1; j < n; ++j) {
    const double kp = km + (2.0 * j / x) * k;
    km = k;
    k = kp;
  }
  return k;
}

namespace {

// In-place Cholesky factorization of a Hermitian positive-definite matrix.
// Returns false on a non-positive pivot.
bool cholesky_factor(std::vector<cplx>& g, int k) {
  auto at = [&](int i, int j) -> cplx& { return g[static_cast<std::size_t>(i) * k + j]; };
  for (int j = 0; j < k; ++j) {
    double diag = at(j, j).real();
    for (int p = 0; p < j; ++p) diag -= std::norm(at(j, p));
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    at(j, j) = ljj;
    for (int i = j + 1; i < k; ++i) {
      cplx v = at(i, j);
      for (int p = 0; p < j; ++p) v -= at(i, p) * std::conj(at(j, p));
      at(i, j) = v / ljj;
    }
  }
  return true;
}

void cholesky_apply(const std::vector<cplx>& g, std::vector<cplx>& rhs, int k) {
  auto at = [&](int i, int j) -> const cplx& {
    return g[static_cast<std::size_t>(i) * k + j];
  };
  // forward substitution L y = rhs
  for (int i = 0; i < k; ++i) {
    cplx v = rhs[i];
    for (int p = 0; p < i; ++p) v -= at(i, p) * rhs[p];
    rhs[i] = v / at(i, i).real();
  }
  // back substitution L^H x = y
  for (int i = k - 1; i >= 0; --i) {
    cplx v = rhs[i];
    for (int p = i + 1; p < k; ++p) v -= std::conj(at(p, i)) * rhs[p];
    rhs[i] = v / at(i, i).real();
  }
}

// Partial-pivot LU fallback.  Returns the smallest and largest pivot moduli.
bool lu_solve(std::vector<cplx>& g, std::vector<cplx>& rhs, int k, double& min_piv,
              double& max_piv) {
  auto at = [&](int i, int j) -> cplx& { return g[static_cast<std::size_t>(i) * k + j]; };
  min_piv = 1e300;
  max_piv = 0.0;
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::abs(at(col, col));
    for (int i = col + 1; i < k; ++i) {
      const double v = std::abs(at(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0 || !std::isfinite(best)) return false;
    min_piv = std::min(min_piv, best);
    max_piv = std::max(max_piv, best);
    if (piv != col) {
      for (int j = 0; j < k; ++j) std::swap(at(piv, j), at(col, j));
      std::swap(rhs[piv], rhs[col]);
    }
    for (int i = col + 1; i < k; ++i) {
      const cplx f = at(i, col) / at(col, col);
      at(i, col) = f;
      for (int j = col + 1; j < k; ++j) at(i, j) -= f * at(col, j);
      rhs[i] -= f * rhs[col];
    }
  }
  for (int i = k - 1; i >= 0; --i) {
    cplx v = rhs[i];
    for (int j = i + 1; j < k; ++j) v -= at(i, j) * rhs[j];
    rhs[i] = v / at(i, i);
  }
  return true;
}

}  // namespace

std::vector<cplx> lstsq_solve(const ComplexMatrix& a, const std::vector<cplx>& b,
                              int threads) {
  const int m = a.rows, k = a.cols;
  if (m < k || k < 1) throw std::invalid_argument("lstsq_solve: need M >= K >= 1");
  if (static_cast<int>(b.size()) != m)
    throw std::invalid_argument("lstsq_solve: rhs length mismatch");

  // Scale columns to unit 2-norm.
  std::vector<double> scale(k);
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::norm(a.at(i, j));
    if (s == 0.0) throw std::invalid_argument("lstsq_solve: zero column");
    scale[j] = 1.0 / std::sqrt(s);
  }

  // Gram matrix and right-hand side.  Each (i,j) entry is one serial dot
  // product, so the result is identical for any thread count.
  std::vector<cplx> gram(static_cast<std::size_t>(k) * k);
  std::vector<cplx> rhs(k);
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1) \
    if (threads > 1)
#endif
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i <= j; ++i) {
      cplx s{0.0, 0.0};
      for (int r = 0; r < m; ++r) s += std::conj(a.at(r, i)) * a.at(r, j);
      s *= scale[i] * scale[j];
      gram[static_cast<std::size_t>(i) * k + j] = s;
      gram[static_cast<std::size_t>(j) * k + i] = std::conj(s);
    }
    cplx s{0.0, 0.0};
    for (int r = 0; r < m; ++r) s += std::conj(a.at(r, j)) * b[r];
    rhs[j] = s * scale[j];
  }

  // Factor once; the normal equations square the conditioning, so the first
  // solution loses digits that iterative refinement recovers.
  std::vector<cplx> factor = gram;
  const bool use_chol = cholesky_factor(factor, k);
  if (!use_chol) {
    std::vector<cplx> f2 = gram;
    std::vector<cplx> probe = rhs;
    double min_piv, max_piv;
    if (!lu_solve(f2, probe, k, min_piv, max_piv)) {
      throw std::runtime_error("lstsq_solve: Gram matrix numerically singular");
    }
    if (min_piv < 1e-15 * max_piv) {
      std::ostringstream os;
      os << "lstsq_solve: Gram matrix numerically singular (condition ~ "
         << max_piv / min_piv << ")";
      throw std::runtime_error(os.str());
    }
  }
  auto solve_with = [&](std::vector<cplx> r) {
    if (use_chol) {
      cholesky_apply(factor, r, k);
    } else {
      std::vector<cplx> g2 = gram;
      double mn, mx;
      lu_solve(g2, r, k, mn, mx);
    }
    return r;
  };

  std::vector<cplx> y = solve_with(rhs);
  // two refinement sweeps on the residual in the original scaling
  for (int sweep = 0; sweep < 2; ++sweep) {
    std::vector<cplx> res(m);
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : 1) \
    if (threads > 1)
#endif
    for (int i = 0; i < m; ++i) {
      cplx s = b[i];
      for (int j = 0; j < k; ++j) s -= a.at(i, j) * (scale[j] * y[j]);
      res[i] = s;
    }
    std::vector<cplx> rhs2(k);
    for (int j = 0; j < k; ++j) {
      cplx s{0.0, 0.0};
      for (int i = 0; i < m; ++i) s += std::conj(a.at(i, j)) * res[i];
      rhs2[j] = s * scale[j];
    }
    const auto delta = solve_with(rhs2);
    for (int j = 0; j < k; ++j) y[j] += delta[j];
  }

  for (int j = 0; j < k; ++j) y[j] *= scale[j];
  return y;
}

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<cplx> sample_points(const SampleSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("sample_points: count must be >= 1");
  SplitMix64 rng(spec.seed);
  std::vector<cplx> z;
  z.reserve(spec.count);
  const double c = static_cast<double>(spec.c);
  const double d = static_cast<double>(spec.d);
  const double h = static_cast<double>(spec.h);
  const double center = -d / (c * h);
  if (spec.mode == SampleMode::direct) {
    const double im = spec.decay / (2.0 * kPi);
    for (int j = 0; j < spec.count; ++j) {
      const double re = center - 0.5 + rng.next_double();
      z.emplace_back(re, im);
    }
  } else {
    const double sqh = std::sqrt(h);
    const double half_width = std::sqrt(h / 2.0) / (c * h);
    const double im_lo = 1.0 / (2.0 * c * sqh);
    for (int j = 0; j < spec.count; ++j) {
      const double re = center + (2.0 * rng.next_double() - 1.0) * half_width;
      const double im = im_lo * (1.0 + rng.next_double());
      z.emplace_back(re, im);
    }
  }
  return z;
}

}  // namespace cuspidal::numeric
