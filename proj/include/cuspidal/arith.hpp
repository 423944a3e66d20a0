#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace cuspidal::arith {

using cplx = std::complex<double>;
using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);
i64 lcm(i64 a, i64 b);

// g = gcd(a,b) > 0 with a*x + b*y = g.  Throws if a == b == 0.
struct ExtGcd {
  i64 g, x, y;
};
ExtGcd ext_gcd(i64 a, i64 b);

// Inverse of a modulo m > 0; requires gcd(a, m) = 1.
i64 mod_inverse(i64 a, i64 m);

i64 pow_i64(i64 base, int exp);
i64 pow_mod(i64 base, i64 exp, i64 mod);

bool is_prime(i64 n);

struct PrimePower {
  i64 p;
  int e;
  i64 value() const;
};

struct Factorization {
  std::vector<PrimePower> factors;  // primes strictly increasing
  i64 value() const;
  int valuation(i64 p) const;
};

// Trial division + Miller-Rabin + Pollard rho; n in [1, 2^63).
Factorization factorize(i64 n);

std::vector<i64> divisors(i64 n);
i64 euler_phi(i64 n);

// Reduced fraction num/den, den > 0, kept in [0, 1) when used as a
// root-of-unity exponent e^(2*pi*i*num/den).
struct Rational {
  i64 num = 0;
  i64 den = 1;
  Rational() = default;
  Rational(i64 n, i64 d);
  Rational operator+(const Rational&) const;
  Rational operator*(i64 k) const;
  Rational times(const Rational&) const;
  Rational mod1() const;  // representative in [0,1)
  bool operator==(const Rational&) const = default;
};

// One component of a character of (Z/NZ)^x at a prime power q = p^e.
// Canonical generators: least primitive root for odd p^e; {-1} for 2^2;
// {-1, 5} for 2^e with e >= 3; none for q <= 2.
struct CharComponent {
  i64 q = 1;  // p^e
  i64 p = 1;
  int e = 0;
  std::vector<i64> gens;
  std::vector<i64> gen_orders;
  std::vector<Rational> exps;  // exponent of e^(2*pi*i*t) on each generator
};

class DirichletCharacter {
 public:
  DirichletCharacter();  // trivial character mod 1
  static DirichletCharacter trivial(i64 modulus);
  // exps[i][j]: exponent on generator j of component i (components ordered by p).
  static DirichletCharacter from_exponents(i64 modulus,
                                           const std::vector<std::vector<Rational>>& exps);

  i64 modulus() const { return modulus_; }
  const std::vector<CharComponent>& components() const { return comps_; }

  // Exact exponent t with chi(n) = e^(2*pi*i*t); nullopt when gcd(n, N) > 1.
  std::optional<Rational> exponent(i64 n) const;
  cplx operator()(i64 n) const;

  i64 conductor() const;
  i64 order() const;
  bool is_trivial() const;
  bool is_even() const;  // chi(-1) == 1

  // Value at n of the primitive character inducing this one.
  cplx eval_primitive(i64 n) const;

  // Component projection onto a unitary divisor M of N (gcd(M, N/M) = 1).
  DirichletCharacter restricted_to(i64 m) const;
  // Induced character modulo a multiple M of N.
  DirichletCharacter lifted_to(i64 m) const;

  DirichletCharacter times(const DirichletCharacter& other) const;  // modulus lcm
  DirichletCharacter conjugate() const;
  DirichletCharacter power(i64 k) const;
  // Primitive character of conductor cond(chi) inducing this one.
  DirichletCharacter primitive() const;

  bool same_character(const DirichletCharacter& other) const;  // equal modulus + values

 private:
  i64 modulus_ = 1;
  std::vector<CharComponent> comps_;
  // dlog_[i][r] = exponent vector index of residue r in component i, flattened;
  // -1 for non-units.  Built at construction.
  std::vector<std::vector<std::int32_t>> dlog_;

  void build_tables();
  std::optional<Rational> component_exponent(std::size_t i, i64 n) const;
};

// All phi(N) characters modulo N, deterministic order (exponent vectors).
std::vector<DirichletCharacter> all_characters(i64 modulus);

struct IntMatrix2 {
  i64 a = 1, b = 0, c = 0, d = 1;

  i64 det() const { return a * d - b * c; }
  IntMatrix2 mul(const IntMatrix2& o) const;
  IntMatrix2 inverse_unimodular() const;  // requires det == 1
  cplx moebius(cplx z) const;

  static IntMatrix2 identity() { return {}; }
  static IntMatrix2 translation(i64 x) { return {1, x, 0, 1}; }
  static IntMatrix2 dilation(i64 h) { return {h, 0, 0, 1}; }

  bool operator==(const IntMatrix2&) const = default;
};

}  // namespace cuspidal::arith
