#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cuspidal/arith.hpp"

namespace cuspidal::modform {

using arith::cplx;
using arith::DirichletCharacter;
using arith::i64;
using arith::IntMatrix2;
using i128 = __int128;

// A cusp form given by its q-expansion at infinity.  coeffs[n] = a_n with
// coeffs[0] = 0.  A form with dilation m set is f0(mz); its own coefficients
// are stored (a_n = 0 unless m | n) and level = m * level(f0).
struct FormInput {
  int weight = 12;
  i64 level = 1;
  DirichletCharacter character;  // modulus divides level
  std::vector<cplx> coeffs;
  bool is_newform = false;
  bool is_eigenform = false;  // prime-to-N Hecke eigenform
  bool twist_minimal = false;
  i64 dilation = 1;
  std::shared_ptr<const FormInput> newform;        // attached newform, if oldform
  std::shared_ptr<const FormInput> minimal_twist;  // twist-minimal base
  std::string label;

  int n_available() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx a(i64 n) const {
    return (n >= 1 && n < static_cast<i64>(coeffs.size())) ? coeffs[n] : cplx{0, 0};
  }
};

// Thrown by evaluate() when the stored coefficients cannot certify the
// requested accuracy; carries the number of coefficients that would suffice.
struct InsufficientCoefficients : std::runtime_error {
  int needed;
  explicit InsufficientCoefficients(int n);
};

// |a_n| <= growth_c * n^gamma with gamma = (k-1)/2 + 0.6 and growth_c twice
// the largest observed ratio.
struct TailModel {
  double growth_c = 1.0;
  double gamma = 1.0;
  static TailModel fit(const FormInput& f);
  // bound on sum_{n > t} |a_n| r^n, r = |q|
  double tail_bound(double r, int t) const;
  // smallest truncation with tail <= eps; throws InsufficientCoefficients
  int truncation_for(double r, double eps, int n_available) const;
};

// --- exact integer series helpers (coefficients from n = 0) ---
std::vector<i128> series_mul(const std::vector<i128>& a, const std::vector<i128>& b,
                             int n_max);
// q^(sum d r / 24) * prod (1 - q^(d n))^r, exact; throws on fractional exponent
std::vector<i128> eta_series(const std::vector<std::pair<i64, i64>>& spec, int n_max);
std::vector<i128> eisenstein_series(int k, int n_max);  // k in {4, 6}

// --- operations ---

// Newform coefficient recursion from prime coefficients.
std::vector<cplx> hecke_extend(const std::map<i64, cplx>& ap, int weight, i64 level,
                               const DirichletCharacter& chi, int n_max);
// Exact twin for integer eigenvalues with trivial character.
std::vector<i128> hecke_extend_exact(const std::map<i64, i128>& ap, int weight,
                                     i64 level, int n_max);

// Cusp form from an eta quotient; level inferred as the least admissible one
// unless given.  Requires trivial character.
FormInput eta_quotient_form(const std::vector<std::pair<i64, i64>>& spec, int n_max,
                            i64 level = 0);

// Basis-free level-1 newforms of weight m in {12,16,18,20,22,26} (one form) or
// 24 (the two conjugates, ordered by increasing real part of a_2).
std::vector<FormInput> level1_newforms(int weight, int n_max);

// Sum of the q-expansion at z (Im z > 0) with certified truncation error <= eps.
cplx evaluate(const FormInput& f, cplx z, double eps, int* terms_used = nullptr);
// det(M)^(k/2) (cz+d)^(-k) f(Mz), M with positive determinant.
cplx evaluate_slash(const FormInput& f, const IntMatrix2& m, cplx z, double eps,
                    int* terms_used = nullptr);

// Coefficientwise twist sum mu(n) a_n q^n.
std::vector<cplx> naive_twist(const FormInput& f, const DirichletCharacter& mu);

struct TwistResult {
  i64 level;
  std::vector<cplx> coeffs;
  DirichletCharacter character;
};

// Twist of a twist-minimal newform by a character of prime-power conductor,
// with the level and the recovered q^p coefficients of the true newform.
TwistResult true_twist(const FormInput& g, const DirichletCharacter& nu);
// General character: iterate true_twist over the prime components of the
// primitive character.
TwistResult twist_by(const FormInput& g, const DirichletCharacter& mu);

FormInput dilate(const FormInput& f, i64 m);  // f(mz), level m*N

// Roots of X^2 - a_p X + chi(p) p^(k-1), plus branch first.
std::pair<cplx, cplx> root_pair(cplx ap, cplx chi_p, i64 p, int weight);

enum class Stabilization { sharp, flat, natural };

// h(z) - root * h(pz) (sharp: root = beta; flat: root = alpha) or
// h(z) - p * beta * h(pz) (natural).  The supplied root is validated against
// the Hecke polynomial.
FormInput p_stabilize(const FormInput& h, i64 p, cplx root, Stabilization variant);

}  // namespace cuspidal::modform
