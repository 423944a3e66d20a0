#include "cuspidal/cusps.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cuspidal::cusps {

std::vector<Cusp> enumerate_cusps(i64 n) {
  if (n < 1) throw std::invalid_argument("enumerate_cusps: N must be >= 1");
  std::vector<Cusp> out;
  for (i64 c : arith::divisors(n)) {
    const i64 g = arith::gcd(c, n / c);
    for (i64 x = 1; x <= g; ++x) {
      if (arith::gcd(x, g) != 1) continue;
      // smallest positive a = x (mod g) with gcd(a, c) = 1
      i64 a = x;
      while (arith::gcd(a, c) != 1) a += g;
      out.push_back({a, c});
    }
  }
  return out;
}

i64 width_gamma0(i64 n, i64 c) {
  if (c < 1 || n % c != 0) throw std::invalid_argument("width_gamma0: c must divide N");
  return n / arith::gcd(c * c, n);
}

i64 form_width(i64 n, const DirichletCharacter& chi, i64 c) {
  if (c < 1 || n % c != 0) throw std::invalid_argument("form_width: c must divide N");
  const i64 cond = chi.lifted_to(arith::lcm(chi.modulus(), n)).conductor();
  for (i64 h : arith::divisors(n / c)) {
    if ((c * c * h) % n != 0) continue;
    // chi trivial on 1 + chZ  <=>  conductor divides ch
    if ((c * h) % cond == 0) return h;
  }
  return n / c;  // always satisfies both conditions
}

namespace {
i64 prime_to_c_part(i64 n, i64 c) {
  i64 m = n;
  for (const auto& pp : arith::factorize(n).factors)
    if (c % pp.p == 0) m /= pp.value();
  return m;
}
}  // namespace

IntMatrix2 choose_matrix(const Cusp& cusp, i64 n) {
  const i64 a = cusp.a, c = cusp.c;
  if (c < 1) throw std::invalid_argument("choose_matrix: denominator must be positive");
  if (arith::gcd(a, c) != 1) throw std::invalid_argument("choose_matrix: gcd(a,c) != 1");
  const i64 d0 = prime_to_c_part(n, c);
  const i64 step = c * d0;
  // d with a*d = 1 (mod c) and d = 0 (mod d0); gcd(c, d0) = 1 so CRT applies.
  i64 d_base = 0;
  if (c > 1) {
    const i64 inv = arith::mod_inverse(a, c);
    const i64 t = inv * arith::mod_inverse(d0, c) % c;
    d_base = d0 * t;
  }
  // least |d| in the class d_base mod step, ties to positive
  i64 d = ((d_base % step) + step) % step;
  if (d != 0) {
    const i64 d_neg = d - step;
    if (-d_neg < d) d = d_neg;
  }
  const i64 b = (a * d - 1) / c;
  IntMatrix2 m{a, b, c, d};
  if ((a * d - 1) % c != 0 || m.det() != 1)
    throw std::logic_error("choose_matrix: construction failed");
  return m;
}

CuspDatum make_cusp_datum(i64 n, const DirichletCharacter& chi, const Cusp& cusp) {
  return make_cusp_datum_with_matrix(n, chi, choose_matrix(cusp, n));
}

CuspDatum make_cusp_datum_with_matrix(i64 n, const DirichletCharacter& chi,
                                      const IntMatrix2& alpha1) {
  if (alpha1.det() != 1)
    throw std::invalid_argument("cusp datum: matrix must have determinant 1");
  CuspDatum cd;
  cd.cusp = {alpha1.a, alpha1.c};
  if (cd.cusp.c < 0) {
    cd.cusp.a = -cd.cusp.a;
    cd.cusp.c = -cd.cusp.c;
  }
  if (cd.cusp.c < 1 || n % cd.cusp.c != 0)
    throw std::invalid_argument("cusp datum: denominator must divide N");
  cd.h0 = width_gamma0(n, cd.cusp.c);
  cd.h = form_width(n, chi, cd.cusp.c);
  cd.alpha1 = alpha1;
  cd.alphah = alpha1.mul(IntMatrix2::dilation(cd.h));
  // h = hc * hd with hc supported on the primes of c
  i64 hc = 1;
  for (const auto& pp : arith::factorize(cd.h).factors)
    if (cd.cusp.c % pp.p == 0) hc *= pp.value();
  cd.hc = hc;
  cd.hd = cd.h / hc;
  return cd;
}

EquivalentTransport find_equivalent_transport(const IntMatrix2& beta1_old,
                                              const IntMatrix2& beta1_new,
                                              const DirichletCharacter& chi, i64 n,
                                              i64 h) {
  if (beta1_old.det() != 1 || beta1_new.det() != 1)
    throw std::invalid_argument("transport: matrices must have determinant 1");
  const IntMatrix2 inv_old = beta1_old.inverse_unimodular();
  for (i64 x = 0; x < n * h; ++x) {
    const IntMatrix2 gamma = beta1_new.mul(IntMatrix2::translation(-x)).mul(inv_old);
    if (gamma.c % n != 0) continue;
    const cplx factor = chi(gamma.d);
    return {gamma, x, factor};
  }
  throw std::runtime_error("transport: matrices do not represent the same cusp");
}

CuspExpansion transport_equivalent(const CuspExpansion& expansion,
                                   const IntMatrix2& beta1_new,
                                   const DirichletCharacter& chi, i64 n, i64 h) {
  const auto t = find_equivalent_transport(expansion.datum.alpha1, beta1_new, chi, n, h);
  CuspExpansion out = expansion;
  out.datum.alpha1 = beta1_new;
  out.datum.alphah = beta1_new.mul(IntMatrix2::dilation(h));
  out.datum.cusp = {beta1_new.a, beta1_new.c};
  if (out.datum.cusp.c < 0) {
    out.datum.cusp.a = -out.datum.cusp.a;
    out.datum.cusp.c = -out.datum.cusp.c;
  }
  out.method = ExpandMethod::transport;
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(t.x) /
                       static_cast<double>(h);
  for (std::size_t i = 0; i < out.b.size(); ++i) {
    const double nt = theta * static_cast<double>(i);
    out.b[i] = t.factor * cplx{std::cos(nt), std::sin(nt)} * expansion.b[i];
  }
  return out;
}

DegeneracyTransport transport_degeneracy(int weight, i64 m, const IntMatrix2& alpha1) {
  if (m < 1) throw std::invalid_argument("transport_degeneracy: m must be >= 1");
  if (alpha1.det() != 1)
    throw std::invalid_argument("transport_degeneracy: matrix must have determinant 1");
  DegeneracyTransport out;
  const i64 a = alpha1.a, b = alpha1.b, c = alpha1.c, d = alpha1.d;
  out.m1 = arith::gcd(c < 0 ? -c : c, m);
  if (out.m1 == 0) out.m1 = m;  // c == 0 can only happen for a degenerate matrix
  out.m2 = m / out.m1;
  // y with d - (c/m1) y divisible by m2
  const i64 cm = c / out.m1;
  out.y = 0;
  for (i64 y = 0; y < out.m2; ++y) {
    if (((d - cm * y) % out.m2 + out.m2) % out.m2 == 0) {
      out.y = y;
      break;
    }
  }
  out.alpha_inner = {a * out.m2, b * out.m1 - out.y * a, cm, (d - out.y * cm) / out.m2};
  if (out.alpha_inner.det() != 1)
    throw std::logic_error("transport_degeneracy: inner matrix not unimodular");
  out.inner = {out.alpha_inner.a, out.alpha_inner.c};
  out.scale = std::pow(static_cast<double>(m), -0.5 * weight);
  return out;
}

}  // namespace cuspidal::cusps
