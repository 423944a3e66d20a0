#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cuspidal/expand.hpp"

namespace cuspidal::petersson {

using arith::cplx;
using arith::i64;
using modform::FormInput;

// vol(H \ Gamma_0(N)) = pi/3 * [PSL2(Z) : Gamma_0(N)]
double volume(i64 n);

// S_{s,n} = sum_m (x/8pi)^(k-1) (x K_{k-1}(x) - K_{k-2}(x)), x = 4 pi m sqrt(n/h),
// truncated once a certified bound for the remaining terms drops below eps.
// term_count (optional) accumulates the number of terms summed.
double bessel_weight_sum(int k, i64 n, i64 h_s, double eps, long long* term_count = nullptr);

enum class Method { automatic, direct, eigen };

struct Options {
  double digits = 12.0;  // E
  Method method = Method::automatic;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CuspContribution {
  cusps::Cusp cusp;
  i64 h0 = 1;
  i64 h = 1;
  cplx value{0.0, 0.0};  // (h0/h) * sum_n a conj(b) S / n^(k-1)
  int n_trunc = 0;
};

struct InnerProductReport {
  cplx value{0.0, 0.0};
  double prefactor = 0.0;  // 4 / vol
  std::vector<CuspContribution> cusps;
  double digits = 0.0;
  long long bessel_terms = 0;
  std::string note;
};

// Nelson cusp-sum inner product <f, g> for forms of common weight and
// character, embedded at level lcm(N_f, N_g).
InnerProductReport petersson_pair(const FormInput& f, const FormInput& g,
                                  const Options& opts = {});

// <f g, h> for weights k + (m-k) = m; returns exact 0 with a note when the
// characters do not satisfy chi_f chi_g = chi_h.
InnerProductReport petersson_triple(const FormInput& f, const FormInput& g,
                                    const FormInput& h, const Options& opts = {});

// <fa, ga> / <fb, gb> with a common seed.
cplx petersson_ratio(const FormInput& fa, const FormInput& ga, const FormInput& fb,
                     const FormInput& gb, const Options& opts = {});

// --- closed-form comparison constants ---

struct AdjointLocalFactor {
  i64 p = 2;
  // unramified-nonminimal | special-minimal | special-nonminimal |
  // principal-minimal | principal-nonminimal | supercuspidal-eta |
  // supercuspidal-noneta
  std::string case_tag;
  double lp_value = 0.0;  // L_p(ad f, 1), required for unramified-nonminimal
};

// pi^2/6 * (4 pi)^k / (k-1)! * prod (*)_p
double adjoint_constant(int weight, const std::vector<AdjointLocalFactor>& factors);

struct IchinoLocalFactor {
  i64 p = 2;
  // special-two-unramified | principal-pair-unramified | special-pair-unramified |
  // three-special | principal-pair-special | three-principal |
  // higher-conductor-two-unramified | nps-type1
  std::string case_tag;
  int c = 1;       // conductor exponent (higher-conductor and nps cases)
  double abg = 0;  // product of the three q^p coefficients (three-special)
  double s1 = 0;   // alpha + 1/alpha = a_p / p^((m-1)/2) (nps-type1)
};

// 3^2 (m-2)! (k-1)! (m-k-1)! / (pi^(2m+2) 2^(4m-2) Mf^k Mg^(m-k) Mh^m) * prod I_p**
double ichino_constant(int k, int m, i64 mf, i64 mg, i64 mh,
                       const std::vector<IchinoLocalFactor>& factors);

struct RatioCheckReport {
  double deviation = 0.0;
  bool pass = false;
};

// |lhs / (constant * l_value) - 1| against tol
RatioCheckReport ratio_check(cplx lhs, double l_value, double constant, double tol);

}  // namespace cuspidal::petersson
