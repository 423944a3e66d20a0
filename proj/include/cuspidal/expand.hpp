#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cuspidal/cusps.hpp"
#include "cuspidal/modform.hpp"

namespace cuspidal::expand {

using arith::cplx;
using arith::DirichletCharacter;
using arith::i64;
using cusps::CuspDatum;
using cusps::CuspExpansion;
using modform::FormInput;

// Least-squares interpolation of the q-expansion of f|[alpha_h]_k.  K is
// raised above k0 (or C lowered below c0) until K*C ~ E*log(10); M = 2K
// points with |q_j| = e^(-C).  Coefficients b_0..b_K returned with the error
// model 10^(-E) e^(n C).
CuspExpansion expand_direct(const FormInput& f, const CuspDatum& cd, double digits,
                            int k0, double c0, std::uint64_t seed, int threads = 1);

// One candidate (g0 tensor mu)(m z) for the eigen-method basis.
struct TwistBasisElement {
  std::shared_ptr<const FormInput> base;  // g0
  DirichletCharacter mu;                  // primitive twisting character
  i64 m = 1;                              // dilation
  i64 level = 1;                          // level of (g0 tensor mu)(mz)
  std::vector<cplx> coeffs;               // coefficients of g0 tensor mu (undilated)
};

// All twists (g0 tensor mu)(mz) of level dividing N*h, mu running over
// characters mod N, pruned by the local conditions available when the cusp
// matrix has its lower-right entry divisible by the prime-to-c part of N.
// Deterministic order: conductor of mu, exponent vector, dilation.
std::vector<TwistBasisElement> enumerate_twist_basis(const FormInput& f,
                                                     const CuspDatum& cd, i64 n);

struct EigenExpansion {
  std::vector<cplx> c;           // one coefficient per basis element
  std::vector<bool> negligible;  // |c_l| < 10 * 10^(-E0)
  CuspExpansion expansion;       // synthesized to the requested K
  double digits_used = 0.0;      // deepened truncation accuracy E
};

// Interpolates f|[alpha_h] as a linear combination of the basis; the solve is
// independent of the number of coefficients requested.
EigenExpansion expand_eigen(const FormInput& f, const CuspDatum& cd,
                            const std::vector<TwistBasisElement>& basis, double e0,
                            int k, double c, std::uint64_t seed, int threads = 1);

// Slow Fourier-inversion cross-check for a single coefficient b_m, via
// composite Gauss-Legendre quadrature with q_nodes nodes on [0,1].
// err_bound (optional) receives the n-truncation plus quadrature estimate.
cplx fourier_oracle(const FormInput& f, const CuspDatum& cd, int m_index, double y,
                    int q_nodes, double* err_bound = nullptr);

}  // namespace cuspidal::expand
