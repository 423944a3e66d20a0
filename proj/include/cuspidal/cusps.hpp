#pragma once

#include <cstdint>
#include <vector>

#include "cuspidal/arith.hpp"

namespace cuspidal::cusps {

using arith::cplx;
using arith::DirichletCharacter;
using arith::i64;
using arith::IntMatrix2;

// Cusp a/c of Gamma_0(N): gcd(a,c) = 1 and c | N.  The class of infinity is
// represented uniformly with denominator c = N (1/N ~ infinity).
struct Cusp {
  i64 a = 1;
  i64 c = 1;
  bool operator==(const Cusp&) const = default;
};

// One representative per Gamma_0(N)-class; count = sum_{c|N} phi(gcd(c, N/c)).
std::vector<Cusp> enumerate_cusps(i64 n);

// Width of a/c for Gamma_0(N): smallest h with N | c^2 h, i.e. N / gcd(c^2, N).
i64 width_gamma0(i64 n, i64 c);

// Smallest h with N | c^2 h and chi trivial on (1 + chZ)/NZ.
i64 form_width(i64 n, const DirichletCharacter& chi, i64 c);

// SL2(Z) matrix with first column (a, c) whose lower-right entry is divisible
// by the prime-to-c part of N; among valid d the least |d|, ties positive.
IntMatrix2 choose_matrix(const Cusp& cusp, i64 n);

struct CuspDatum {
  Cusp cusp;
  i64 h0 = 1;  // width for Gamma_0(N)
  i64 h = 1;   // width for the form (depends on the character)
  IntMatrix2 alpha1;                 // det 1, first column (a, c)
  IntMatrix2 alphah;                 // alpha1 * diag(h, 1), det h
  i64 hc = 1, hd = 1;                // h = hc * hd split along primes of c
};

CuspDatum make_cusp_datum(i64 n, const DirichletCharacter& chi, const Cusp& cusp);
// Same but with a caller-supplied matrix (det 1, first column defines the cusp).
CuspDatum make_cusp_datum_with_matrix(i64 n, const DirichletCharacter& chi,
                                      const IntMatrix2& alpha1);

enum class ExpandMethod { direct, eigen, transport };

// Numeric coefficients b_n of f|[alpha_h]_k with the error model
// |err(b_n)| ~ 10^(-digits) * e^(n * decay).
struct CuspExpansion {
  CuspDatum datum;
  std::vector<cplx> b;  // b[0..K]
  double digits = 0.0;  // E
  double decay = 0.0;   // C
  ExpandMethod method = ExpandMethod::direct;
  double b0_magnitude = 0.0;
  double residual = 0.0;
  int coeffs_used = 0;
};

// gamma = beta1_new * T^(-x) * beta1_old^(-1) in Gamma_0(N), found by scanning
// x and verifying membership directly.
struct EquivalentTransport {
  IntMatrix2 gamma;
  i64 x = 0;
  cplx factor;  // chi(d_gamma)
};

// Throws std::runtime_error when no x in [0, N*h) works (matrices not
// equivalent or inputs inconsistent).
EquivalentTransport find_equivalent_transport(const IntMatrix2& beta1_old,
                                              const IntMatrix2& beta1_new,
                                              const DirichletCharacter& chi, i64 n,
                                              i64 h);

// Expansion at beta'_h from the expansion at beta_h of the same cusp:
// b'_n = chi(d_gamma) * e^(2 pi i n x / h) * b_n.
CuspExpansion transport_equivalent(const CuspExpansion& expansion,
                                   const IntMatrix2& beta1_new,
                                   const DirichletCharacter& chi, i64 n, i64 h);

// Exact decomposition diag(m,1) * alpha1 = alpha_inner * [[1,y],[0,m2]] * diag(m1,1)
// reducing expansions of f(mz) to expansions of f.  scale = m^(-k/2).
struct DegeneracyTransport {
  Cusp inner;  // (a*m2) / (c/m1), coprime pair (not a canonical representative)
  IntMatrix2 alpha_inner;
  i64 y = 0, m1 = 1, m2 = 1;
  double scale = 1.0;
};

DegeneracyTransport transport_degeneracy(int weight, i64 m, const IntMatrix2& alpha1);

}  // namespace cuspidal::cusps
