#include "cuspidal/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cuspidal::arith {

namespace {
using u64 = std::uint64_t;
using i128 = __int128;

u64 mulmod_u64(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod_u64(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}
}  // namespace

i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }
i64 lcm(i64 a, i64 b) { return std::lcm(a, b); }

ExtGcd ext_gcd(i64 a, i64 b) {
  if (a == 0 && b == 0) throw std::invalid_argument("ext_gcd: both inputs zero");
  i64 old_r = a, r = b;
  i64 old_s = 1, s = 0;
  i64 old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    i64 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

i64 mod_inverse(i64 a, i64 m) {
  if (m <= 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
  auto [g, x, y] = ext_gcd(((a % m) + m) % m, m);
  (void)y;
  if (g != 1) throw std::invalid_argument("mod_inverse: arguments not coprime");
  return ((x % m) + m) % m;
}

i64 pow_i64(i64 base, int exp) {
  i64 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

i64 pow_mod(i64 base, i64 exp, i64 mod) {
  return static_cast<i64>(powmod_u64(static_cast<u64>(((base % mod) + mod) % mod),
                                     static_cast<u64>(exp), static_cast<u64>(mod)));
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  // Deterministic Miller-Rabin for 64-bit inputs.
  i64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod_u64(static_cast<u64>(a), static_cast<u64>(d), static_cast<u64>(n));
    if (x == 1 || x == static_cast<u64>(n - 1)) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod_u64(x, x, static_cast<u64>(n));
      if (x == static_cast<u64>(n - 1)) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {
i64 pollard_rho(i64 n) {
  if (n % 2 == 0) return 2;
  u64 un = static_cast<u64>(n);
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    while (d == 1) {
      x = (mulmod_u64(x, x, un) + c) % un;
      y = (mulmod_u64(y, y, un) + c) % un;
      y = (mulmod_u64(y, y, un) + c) % un;
      u64 diff = x > y ? x - y : y - x;
      if (diff == 0) {
        d = un;  // cycle, retry with next c
      } else {
        d = std::gcd(diff, un);
      }
    }
    if (d != un) return static_cast<i64>(d);
  }
}

void factor_into(i64 n, std::vector<i64>& primes) {
  if (n == 1) return;
  if (is_prime(n)) {
    primes.push_back(n);
    return;
  }
  i64 d = pollard_rho(n);
  factor_into(d, primes);
  factor_into(n / d, primes);
}
}  // namespace

i64 PrimePower::value() const { return pow_i64(p, e); }

i64 Factorization::value() const {
  i64 v = 1;
  for (const auto& f : factors) v *= f.value();
  return v;
}

int Factorization::valuation(i64 p) const {
  for (const auto& f : factors)
    if (f.p == p) return f.e;
  return 0;
}

Factorization factorize(i64 n) {
  if (n < 1) throw std::invalid_argument("factorize: input must be >= 1");
  std::vector<i64> primes;
  for (i64 p : {2, 3, 5, 7, 11, 13}) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  for (i64 p = 17; p * p <= n && p < 100000; p += 2) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  if (n > 1) factor_into(n, primes);
  std::sort(primes.begin(), primes.end());
  Factorization f;
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    f.factors.push_back({primes[i], static_cast<int>(j - i)});
    i = j;
  }
  return f;
}

std::vector<i64> divisors(i64 n) {
  auto f = factorize(n);
  std::vector<i64> ds{1};
  for (const auto& pp : f.factors) {
    std::size_t count = ds.size();
    i64 q = 1;
    for (int e = 1; e <= pp.e; ++e) {
      q *= pp.p;
      for (std::size_t i = 0; i < count; ++i) ds.push_back(ds[i] * q);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

i64 euler_phi(i64 n) {
  i64 r = 1;
  for (const auto& pp : factorize(n).factors)
    r *= (pp.p - 1) * pow_i64(pp.p, pp.e - 1);
  return r;
}

Rational::Rational(i64 n, i64 d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i64 g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

Rational Rational::operator+(const Rational& o) const {
  i64 g = std::gcd(den, o.den);
  return Rational(num * (o.den / g) + o.num * (den / g), den / g * o.den);
}

Rational Rational::operator*(i64 k) const { return Rational(num * k, den); }

Rational Rational::times(const Rational& o) const {
  return Rational(num * o.num, den * o.den);
}

Rational Rational::mod1() const {
  i64 n = ((num % den) + den) % den;
  return Rational(n, den);
}

namespace {

// Least primitive root of p^e for odd prime p.
i64 least_primitive_root(i64 q, i64 p) {
  i64 phi = q / p * (p - 1);
  auto phifac = factorize(phi);
  for (i64 g = 2; g < q; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (const auto& pp : phifac.factors) {
      if (pow_mod(g, phi / pp.p, q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

CharComponent make_component(i64 p, int e) {
  CharComponent c;
  c.p = p;
  c.e = e;
  c.q = pow_i64(p, e);
  if (p == 2) {
    if (e >= 3) {
      c.gens = {c.q - 1, 5};
      c.gen_orders = {2, c.q / 4};
    } else if (e == 2) {
      c.gens = {3};
      c.gen_orders = {2};
    }
    // e <= 1: trivial group, no generators
  } else {
    c.gens = {least_primitive_root(c.q, p)};
    c.gen_orders = {c.q / p * (p - 1)};
  }
  c.exps.assign(c.gens.size(), Rational(0, 1));
  return c;
}

}  // namespace

DirichletCharacter::DirichletCharacter() { modulus_ = 1; }

DirichletCharacter DirichletCharacter::trivial(i64 modulus) {
  if (modulus < 1) throw std::invalid_argument("character modulus must be >= 1");
  DirichletCharacter chi;
  chi.modulus_ = modulus;
  for (const auto& pp : factorize(modulus).factors)
    chi.comps_.push_back(make_component(pp.p, pp.e));
  chi.build_tables();
  return chi;
}

DirichletCharacter DirichletCharacter::from_exponents(
    i64 modulus, const std::vector<std::vector<Rational>>& exps) {
  DirichletCharacter chi = trivial(modulus);
  if (exps.size() != chi.comps_.size())
    throw std::invalid_argument("character exponents: component count mismatch");
  for (std::size_t i = 0; i < exps.size(); ++i) {
    auto& comp = chi.comps_[i];
    if (exps[i].size() != comp.gens.size())
      throw std::invalid_argument("character exponents: generator count mismatch");
    for (std::size_t j = 0; j < comp.gens.size(); ++j) {
      Rational t = exps[i][j].mod1();
      if (comp.gen_orders[j] % t.den != 0)
        throw std::invalid_argument(
            "character exponent denominator must divide the generator order");
      comp.exps[j] = t;
    }
  }
  return chi;
}

void DirichletCharacter::build_tables() {
  dlog_.clear();
  for (const auto& comp : comps_) {
    std::vector<std::int32_t> table(static_cast<std::size_t>(comp.q) * comp.gens.size(), -1);
    if (comp.gens.empty()) {
      dlog_.push_back(std::move(table));
      continue;
    }
    // Enumerate all products of generator powers.
    std::vector<i64> idx(comp.gens.size(), 0);
    while (true) {
      i64 r = 1;
      for (std::size_t j = 0; j < comp.gens.size(); ++j)
        r = r * pow_mod(comp.gens[j], idx[j], comp.q) % comp.q;
      for (std::size_t j = 0; j < comp.gens.size(); ++j)
        table[static_cast<std::size_t>(r) * comp.gens.size() + j] =
            static_cast<std::int32_t>(idx[j]);
      std::size_t k = 0;
      while (k < idx.size()) {
        if (++idx[k] < comp.gen_orders[k]) break;
        idx[k] = 0;
        ++k;
      }
      if (k == idx.size()) break;
    }
    dlog_.push_back(std::move(table));
  }
}

std::optional<Rational> DirichletCharacter::component_exponent(std::size_t i, i64 n) const {
  const auto& comp = comps_[i];
  i64 r = ((n % comp.q) + comp.q) % comp.q;
  if (comp.gens.empty()) return (r % comp.p == 0 && comp.e > 0) ? std::nullopt
                                                                : std::optional<Rational>(Rational(0, 1));
  if (r % comp.p == 0) return std::nullopt;
  Rational t(0, 1);
  for (std::size_t j = 0; j < comp.gens.size(); ++j) {
    std::int32_t k = dlog_[i][static_cast<std::size_t>(r) * comp.gens.size() + j];
    if (k < 0) return std::nullopt;
    t = t + comp.exps[j] * k;
  }
  return t.mod1();
}

std::optional<Rational> DirichletCharacter::exponent(i64 n) const {
  Rational t(0, 1);
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    auto ti = component_exponent(i, n);
    if (!ti) return std::nullopt;
    t = t + *ti;
  }
  return t.mod1();
}

cplx DirichletCharacter::operator()(i64 n) const {
  auto t = exponent(n);
  if (!t) return {0.0, 0.0};
  double angle = 2.0 * std::numbers::pi * static_cast<double>(t->num) /
                 static_cast<double>(t->den);
  return {std::cos(angle), std::sin(angle)};
}

i64 DirichletCharacter::conductor() const {
  i64 cond = 1;
  for (const auto& comp : comps_) {
    i64 order = 1;
    for (const auto& t : comp.exps) order = std::lcm(order, t.den);
    if (order == 1) continue;
    if (comp.p == 2) {
      // Order of the 5-part decides; a bare sign character has conductor 4.
      i64 order5 = comp.gens.size() == 2 ? comp.exps[1].den : 1;
      cond *= order5 > 1 ? 4 * order5 : 4;
    } else {
      i64 pj = comp.p;  // phi(p) = p-1, phi(p^j) = p^(j-1)(p-1)
      i64 phi = comp.p - 1;
      while (phi % order != 0) {
        pj *= comp.p;
        phi *= comp.p;
      }
      cond *= pj;
    }
  }
  return cond;
}

i64 DirichletCharacter::order() const {
  i64 order = 1;
  for (const auto& comp : comps_)
    for (const auto& t : comp.exps) order = std::lcm(order, t.den);
  return order;
}

bool DirichletCharacter::is_trivial() const { return order() == 1; }

bool DirichletCharacter::is_even() const {
  if (modulus_ <= 2) return true;
  auto t = exponent(modulus_ - 1);
  return t && t->num == 0;
}

cplx DirichletCharacter::eval_primitive(i64 n) const {
  i64 cond = conductor();
  if (cond == 1) return {1.0, 0.0};
  i64 r = ((n % cond) + cond) % cond;
  if (std::gcd(r, cond) != 1) return {0.0, 0.0};
  // Find a representative of n mod cond that is a unit mod N.
  for (i64 m = r; m < r + modulus_ * cond + 1; m += cond) {
    if (m > 0 && std::gcd(m, modulus_) == 1) return (*this)(m);
  }
  throw std::logic_error("eval_primitive: no coprime representative");
}

DirichletCharacter DirichletCharacter::restricted_to(i64 m) const {
  if (m < 1 || modulus_ % m != 0 || std::gcd(m, modulus_ / m) != 1)
    throw std::invalid_argument("restricted_to: target must be a unitary divisor");
  DirichletCharacter chi = trivial(m);
  for (auto& comp : chi.comps_) {
    for (const auto& mine : comps_) {
      if (mine.p == comp.p) comp = mine;
    }
  }
  return chi;
}

DirichletCharacter DirichletCharacter::lifted_to(i64 m) const {
  if (m % modulus_ != 0)
    throw std::invalid_argument("lifted_to: target must be a multiple of the modulus");
  DirichletCharacter chi = trivial(m);
  for (std::size_t i = 0; i < chi.comps_.size(); ++i) {
    auto& comp = chi.comps_[i];
    // Evaluate this character's p-component at each generator of the lift.
    std::size_t mine = comps_.size();
    for (std::size_t j = 0; j < comps_.size(); ++j)
      if (comps_[j].p == comp.p) mine = j;
    if (mine == comps_.size()) continue;  // p does not divide old modulus
    for (std::size_t j = 0; j < comp.gens.size(); ++j) {
      auto t = component_exponent(mine, comp.gens[j]);
      if (!t) throw std::logic_error("lifted_to: generator not a unit");
      if (comp.gen_orders[j] % t->den != 0)
        throw std::logic_error("lifted_to: incompatible exponent");
      comp.exps[j] = *t;
    }
  }
  return chi;
}

DirichletCharacter DirichletCharacter::times(const DirichletCharacter& other) const {
  i64 m = std::lcm(modulus_, other.modulus_);
  DirichletCharacter a = lifted_to(m);
  DirichletCharacter b = other.lifted_to(m);
  for (std::size_t i = 0; i < a.comps_.size(); ++i)
    for (std::size_t j = 0; j < a.comps_[i].exps.size(); ++j)
      a.comps_[i].exps[j] = (a.comps_[i].exps[j] + b.comps_[i].exps[j]).mod1();
  return a;
}

DirichletCharacter DirichletCharacter::conjugate() const { return power(-1); }

DirichletCharacter DirichletCharacter::power(i64 k) const {
  DirichletCharacter chi = *this;
  for (std::size_t i = 0; i < chi.comps_.size(); ++i)
    for (std::size_t j = 0; j < chi.comps_[i].exps.size(); ++j) {
      const Rational& t = comps_[i].exps[j];
      i64 kk = ((k % t.den) + t.den) % t.den;
      chi.comps_[i].exps[j] = (t * kk).mod1();
    }
  return chi;
}

DirichletCharacter DirichletCharacter::primitive() const {
  i64 cond = conductor();
  DirichletCharacter chi = trivial(cond);
  for (auto& comp : chi.comps_) {
    std::size_t mine = comps_.size();
    for (std::size_t j = 0; j < comps_.size(); ++j)
      if (comps_[j].p == comp.p) mine = j;
    if (mine == comps_.size()) throw std::logic_error("primitive: lost component");
    for (std::size_t j = 0; j < comp.gens.size(); ++j) {
      // chi_prim(g) = chi(g') for g' = g mod q lifted to a unit mod q_full.
      i64 qfull = comps_[mine].q;
      i64 g = comp.gens[j] % qfull;
      auto t = component_exponent(mine, g);
      if (!t) {
        // g not a unit mod the full power can't happen for odd p; for p=2
        // generators -1, 5 are units at every level.
        throw std::logic_error("primitive: generator not a unit");
      }
      comp.exps[j] = *t;
    }
  }
  return chi;
}

bool DirichletCharacter::same_character(const DirichletCharacter& other) const {
  if (modulus_ != other.modulus_) return false;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].exps != other.comps_[i].exps) return false;
  return true;
}

std::vector<DirichletCharacter> all_characters(i64 modulus) {
  DirichletCharacter triv = DirichletCharacter::trivial(modulus);
  std::vector<std::vector<Rational>> exps;
  for (const auto& comp : triv.components())
    exps.push_back(std::vector<Rational>(comp.gens.size(), Rational(0, 1)));

  std::vector<DirichletCharacter> out;
  // Iterate over all exponent tuples, odometer style.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < exps.size(); ++i)
    for (std::size_t j = 0; j < exps[i].size(); ++j) slots.push_back({i, j});
  std::vector<i64> counter(slots.size(), 0);
  while (true) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto [i, j] = slots[s];
      exps[i][j] = Rational(counter[s], triv.components()[i].gen_orders[j]);
    }
    out.push_back(DirichletCharacter::from_exponents(modulus, exps));
    std::size_t s = 0;
    while (s < slots.size()) {
      auto [i, j] = slots[s];
      if (++counter[s] < triv.components()[i].gen_orders[j]) break;
      counter[s] = 0;
      ++s;
    }
    if (s == slots.size()) break;
  }
  return out;
}

IntMatrix2 IntMatrix2::mul(const IntMatrix2& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

IntMatrix2 IntMatrix2::inverse_unimodular() const {
  if (det() != 1) throw std::invalid_argument("inverse_unimodular: determinant must be 1");
  return {d, -b, -c, a};
}

cplx IntMatrix2::moebius(cplx z) const {
  return (static_cast<double>(a) * z + static_cast<double>(b)) /
         (static_cast<double>(c) * z + static_cast<double>(d));
}

}  // namespace cuspidal::arith
