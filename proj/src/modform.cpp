#include "cuspidal/modform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cuspidal::modform {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx ipow(cplx z, int k) {
  if (k < 0) return 1.0 / ipow(z, -k);
  cplx r{1.0, 0.0};
  while (k) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

}  // namespace

InsufficientCoefficients::InsufficientCoefficients(int n)
    : std::runtime_error("evaluate: " + std::to_string(n) +
                         " coefficients needed to certify the requested accuracy"),
      needed(n) {}

TailModel TailModel::fit(const FormInput& f) {
  TailModel t;
  t.gamma = 0.5 * (f.weight - 1) + 0.6;
  double worst = 0.0;
  for (int n = 1; n <= f.n_available(); ++n) {
    const double an = std::abs(f.coeffs[n]);
    if (an == 0.0) continue;
    worst = std::max(worst, an / std::pow(static_cast<double>(n), t.gamma));
  }
  t.growth_c = worst > 0.0 ? 2.0 * worst : 1.0;
  return t;
}

double TailModel::tail_bound(double r, int t) const {
  const double om = 1.0 - r;
  return growth_c * std::pow(static_cast<double>(t), gamma) * std::pow(r, t + 1) /
         (om * om);
}

int TailModel::truncation_for(double r, double eps, int n_available) const {
  if (!(r < 1.0)) throw std::invalid_argument("tail model: |q| must be < 1");
  for (int t = 1; t <= n_available; ++t)
    if (tail_bound(r, t) <= eps) return t;
  for (int t = std::max(1, n_available); t < 100000000; ++t)
    if (tail_bound(r, t) <= eps) throw InsufficientCoefficients(t);
  throw InsufficientCoefficients(100000000);
}

std::vector<i128> series_mul(const std::vector<i128>& a, const std::vector<i128>& b,
                             int n_max) {
  std::vector<i128> out(n_max + 1, 0);
  for (int i = 0; i <= n_max && i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0) continue;
    const int jmax = std::min<int>(n_max - i, static_cast<int>(b.size()) - 1);
    for (int j = 0; j <= jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<i128> eta_series(const std::vector<std::pair<i64, i64>>& spec, int n_max) {
  i64 weighted = 0;
  for (auto [d, r] : spec) {
    if (d < 1) throw std::invalid_argument("eta_series: d must be positive");
    weighted += d * r;
  }
  if (weighted % 24 != 0)
    throw std::invalid_argument("eta_series: fractional leading exponent");
  const i64 offset = weighted / 24;
  if (offset < 0) throw std::invalid_argument("eta_series: negative leading exponent");
  const int inner = n_max - static_cast<int>(std::min<i64>(offset, n_max));

  std::vector<i128> s(inner + 1, 0);
  s[0] = 1;
  for (auto [d, r] : spec) {
    for (i64 rep = 0; rep < std::abs(r); ++rep) {
      if (r > 0) {
        // multiply by (1 - q^(d n)) for all n: telescoped as the Euler product,
        // one factor (1 - q^(d n)) at a time
        for (i64 n = 1; n * d <= inner; ++n)
          for (int j = inner; j >= n * d; --j) s[j] -= s[j - n * d];
      } else {
        for (i64 n = 1; n * d <= inner; ++n)
          for (int j = static_cast<int>(n * d); j <= inner; ++j) s[j] += s[j - n * d];
      }
    }
  }
  std::vector<i128> out(n_max + 1, 0);
  for (int j = 0; j <= inner && offset + j <= n_max; ++j) out[offset + j] = s[j];
  return out;
}

std::vector<i128> eisenstein_series(int k, int n_max) {
  if (k != 4 && k != 6) throw std::invalid_argument("eisenstein_series: k must be 4 or 6");
  std::vector<i128> s(n_max + 1, 0);
  s[0] = 1;
  const i64 factor = k == 4 ? 240 : -504;
  for (i64 d = 1; d <= n_max; ++d) {
    i128 dk = 1;
    for (int i = 0; i < k - 1; ++i) dk *= d;
    for (i64 m = d; m <= n_max; m += d) s[m] += factor * dk;
  }
  return s;
}

namespace {
std::vector<int> smallest_prime_factor(int n_max) {
  std::vector<int> spf(n_max + 1, 0);
  for (int i = 2; i <= n_max; ++i) {
    if (spf[i] == 0) {
      for (int j = i; j <= n_max; j += i)
        if (spf[j] == 0) spf[j] = i;
    }
  }
  return spf;
}
}  // namespace

std::vector<cplx> hecke_extend(const std::map<i64, cplx>& ap, int weight, i64 level,
                               const DirichletCharacter& chi, int n_max) {
  const DirichletCharacter chi_n =
      chi.modulus() == level ? chi : chi.lifted_to(arith::lcm(chi.modulus(), level));
  std::vector<cplx> a(n_max + 1, cplx{0, 0});
  if (n_max >= 1) a[1] = 1.0;
  const auto spf = smallest_prime_factor(n_max);
  for (int n = 2; n <= n_max; ++n) {
    const int p = spf[n];
    int pe = p, m = n / p;
    while (m % p == 0) {
      pe *= p;
      m /= p;
    }
    if (m > 1) {
      a[n] = a[pe] * a[m];
      continue;
    }
    // n = p^e
    auto it = ap.find(p);
    if (it == ap.end())
      throw std::invalid_argument("hecke_extend: missing prime coefficient at p = " +
                                  std::to_string(p));
    if (pe == p) {
      a[n] = it->second;
    } else {
      const cplx chip = chi_n(p);
      const double pk1 = std::pow(static_cast<double>(p), weight - 1);
      a[n] = it->second * a[pe / p] - chip * pk1 * a[pe / (p * p)];
    }
  }
  return a;
}

std::vector<i128> hecke_extend_exact(const std::map<i64, i128>& ap, int weight,
                                     i64 level, int n_max) {
  std::vector<i128> a(n_max + 1, 0);
  if (n_max >= 1) a[1] = 1;
  const auto spf = smallest_prime_factor(n_max);
  for (int n = 2; n <= n_max; ++n) {
    const int p = spf[n];
    int pe = p, m = n / p;
    while (m % p == 0) {
      pe *= p;
      m /= p;
    }
    if (m > 1) {
      a[n] = a[pe] * a[m];
      continue;
    }
    auto it = ap.find(p);
    if (it == ap.end())
      throw std::invalid_argument("hecke_extend_exact: missing prime coefficient");
    if (pe == p) {
      a[n] = it->second;
    } else {
      i128 pk1 = level % p == 0 ? 0 : 1;
      for (int i = 0; i < weight - 1 && pk1 != 0; ++i) pk1 *= p;
      a[n] = it->second * a[pe / p] - pk1 * a[pe / (p * p)];
    }
  }
  return a;
}

FormInput eta_quotient_form(const std::vector<std::pair<i64, i64>>& spec, int n_max,
                            i64 level) {
  i64 rsum = 0, weighted = 0, dlcm = 1;
  std::map<i64, i64> parity;  // parity of exponents in prod d^r per prime
  for (auto [d, r] : spec) {
    rsum += r;
    weighted += d * r;
    dlcm = arith::lcm(dlcm, d);
    for (const auto& pp : arith::factorize(d).factors)
      parity[pp.p] += static_cast<i64>(pp.e) * r;
  }
  bool s_square = true;
  for (const auto& [p, e] : parity)
    if (e % 2 != 0) s_square = false;
  if (rsum <= 0 || rsum % 2 != 0)
    throw std::invalid_argument("eta_quotient_form: weight must be a positive integer");
  const int weight = static_cast<int>(rsum / 2);
  if (!s_square || weight % 2 != 0)
    throw std::invalid_argument("eta_quotient_form: only trivial character supported");

  if (level == 0) {
    for (i64 t = 1; t <= 4096; ++t) {
      const i64 n = dlcm * t;
      i64 dual = 0;
      for (auto [d, r] : spec) dual += (n / d) * r;
      if (dual % 24 == 0 && weighted % 24 == 0) {
        level = n;
        break;
      }
    }
    if (level == 0)
      throw std::invalid_argument("eta_quotient_form: no admissible level found");
  }

  FormInput f;
  f.weight = weight;
  f.level = level;
  f.character = DirichletCharacter::trivial(level);
  auto s = eta_series(spec, n_max);
  f.coeffs.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) f.coeffs[n] = static_cast<double>(s[n]);
  return f;
}

std::vector<FormInput> level1_newforms(int weight, int n_max) {
  static const std::map<int, std::vector<std::string>> monomials = {
      {12, {"D"}},    {16, {"DE4"}},   {18, {"DE6"}},  {20, {"DE4E4"}},
      {22, {"DE4E6"}}, {24, {"DE4E4E4", "DD"}}, {26, {"DE4E4E6"}}};
  auto it = monomials.find(weight);
  if (it == monomials.end())
    throw std::invalid_argument("level1_newforms: unsupported weight");
  if (n_max > 1000 && weight >= 20)
    throw std::invalid_argument("level1_newforms: n_max too large for exact arithmetic");

  const int nm = std::max(n_max, 8);
  const auto delta = eta_series({{1, 24}}, nm);
  const auto e4 = eisenstein_series(4, nm);
  const auto e6 = eisenstein_series(6, nm);
  auto build = [&](const std::string& word) {
    std::vector<i128> s(nm + 1, 0);
    s[0] = 1;
    for (std::size_t i = 0; i < word.size();) {
      if (word[i] == 'D') {
        s = series_mul(s, delta, nm);
        ++i;
      } else {
        s = series_mul(s, word[i + 1] == '4' ? e4 : e6, nm);
        i += 2;
      }
    }
    return s;
  };

  auto cast = [&](const std::vector<i128>& s) {
    std::vector<cplx> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n) out[n] = static_cast<double>(s[n]);
    return out;
  };

  std::vector<FormInput> out;
  if (it->second.size() == 1) {
    FormInput f;
    f.weight = weight;
    f.level = 1;
    f.character = DirichletCharacter::trivial(1);
    f.coeffs = cast(build(it->second[0]));
    f.is_newform = f.is_eigenform = f.twist_minimal = true;
    f.label = "1." + std::to_string(weight) + ".a.a";
    out.push_back(std::move(f));
    return out;
  }

  // weight 24: two conjugate newforms from the T2 action
  const auto v1 = build(it->second[0]);  // q + ...
  const auto v2 = build(it->second[1]);  // q^2 + ...
  const i128 two_k1 = static_cast<i128>(1) << 23;  // 2^(k-1)
  auto t2 = [&](const std::vector<i128>& v, int n) {
    i128 r = 2 * n <= nm ? v[2 * n] : 0;
    if (n % 2 == 0) r += two_k1 * v[n / 2];
    return r;
  };
  // coordinates (c1, c2) of w in basis (v1, v2): c1 = w[1], c2 = w[2] - c1 v1[2]
  const i128 m11 = t2(v1, 1);
  const i128 m12 = t2(v2, 1);
  const i128 m21 = t2(v1, 2) - m11 * v1[2];
  const i128 m22 = t2(v2, 2) - m12 * v1[2];
  const double tr = static_cast<double>(m11 + m22);
  const double disc = static_cast<double>((m11 - m22) * (m11 - m22) + 4 * m12 * m21);
  const double sq = std::sqrt(disc);
  for (double lambda : {0.5 * (tr - sq), 0.5 * (tr + sq)}) {
    // eigenvector (m12, lambda - m11); m12 = v2[2] = 1 here
    const double c2 = (lambda - static_cast<double>(m11)) / static_cast<double>(m12);
    FormInput f;
    f.weight = weight;
    f.level = 1;
    f.character = DirichletCharacter::trivial(1);
    f.coeffs.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
      f.coeffs[n] = static_cast<double>(v1[n]) + c2 * static_cast<double>(v2[n]);
    f.is_newform = f.is_eigenform = f.twist_minimal = true;
    f.label = "1.24.a." + std::string(out.empty() ? "a" : "b");
    out.push_back(std::move(f));
  }
  return out;
}

cplx evaluate(const FormInput& f, cplx z, double eps, int* terms_used) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("evaluate: Im z must be positive");
  const double r = std::exp(-kTwoPi * z.imag());
  const TailModel tm = TailModel::fit(f);
  const int t = tm.truncation_for(r, eps, f.n_available());
  if (terms_used) *terms_used = t;
  const cplx q = std::exp(cplx{0.0, kTwoPi} * z);
  cplx qn{1.0, 0.0}, sum{0.0, 0.0};
  for (int n = 1; n <= t; ++n) {
    qn *= q;
    sum += f.coeffs[n] * qn;
  }
  return sum;
}

cplx evaluate_slash(const FormInput& f, const IntMatrix2& m, cplx z, double eps,
                    int* terms_used) {
  const i64 det = m.det();
  if (det <= 0) throw std::invalid_argument("evaluate_slash: determinant must be positive");
  const cplx j = static_cast<double>(m.c) * z + static_cast<double>(m.d);
  const cplx factor =
      std::pow(static_cast<double>(det), 0.5 * f.weight) * ipow(j, -f.weight);
  const double eps_inner = eps / std::max(std::abs(factor), 1e-300);
  return factor * evaluate(f, m.moebius(z), eps_inner, terms_used);
}

std::vector<cplx> naive_twist(const FormInput& f, const DirichletCharacter& mu) {
  std::vector<cplx> out(f.coeffs.size(), cplx{0, 0});
  for (int n = 1; n <= f.n_available(); ++n) out[n] = mu(n) * f.coeffs[n];
  return out;
}

namespace {
std::vector<cplx> naive_twist_coeffs(const std::vector<cplx>& a,
                                     const DirichletCharacter& mu) {
  std::vector<cplx> out(a.size(), cplx{0, 0});
  for (std::size_t n = 1; n < a.size(); ++n) out[n] = mu(static_cast<i64>(n)) * a[n];
  return out;
}
}  // namespace

TwistResult true_twist(const FormInput& g, const DirichletCharacter& nu) {
  const DirichletCharacter nup = nu.primitive();
  const i64 cond = nup.modulus();
  if (cond == 1) return {g.level, g.coeffs, g.character.lifted_to(g.level)};
  if (!g.twist_minimal)
    throw std::invalid_argument("true_twist: base form must be twist-minimal");
  const auto condfac = arith::factorize(cond);
  if (condfac.factors.size() != 1)
    throw std::invalid_argument("true_twist: conductor must be a prime power");
  const i64 p = condfac.factors[0].p;
  const int u = condfac.factors[0].e;

  const int rg = arith::factorize(g.level).valuation(p);
  const int rgch = arith::factorize(g.character.conductor()).valuation(p);
  const DirichletCharacter chig_nu = g.character.times(nup);
  const int rprime = arith::factorize(chig_nu.conductor()).valuation(p);
  const DirichletCharacter chi_new = g.character.times(nup).times(nup);

  TwistResult out;
  if (!(rg == rgch && rg > 0)) {
    out.level = arith::lcm(g.level, arith::pow_i64(p, 2 * u));
    out.coeffs = naive_twist_coeffs(g.coeffs, nup);
  } else if (u != rgch) {
    out.level = arith::lcm(g.level,
                           arith::lcm(arith::pow_i64(p, u + rgch), arith::pow_i64(p, 2 * u)));
    out.coeffs = naive_twist_coeffs(g.coeffs, nup);
  } else if (rprime > 0) {
    out.level = arith::lcm(g.level, arith::pow_i64(p, u + rprime));
    out.coeffs = naive_twist_coeffs(g.coeffs, nup);
  } else {
    // chi_g nu unramified at p: the twist keeps level N_g and regains p-power
    // coefficients (chi_g nu)(p)^i conj(lambda_p)^i with lambda_p = b_p.
    out.level = g.level;
    const cplx unit = chig_nu.eval_primitive(p);
    const cplx lam = std::conj(g.a(p));
    out.coeffs.assign(g.coeffs.size(), cplx{0, 0});
    for (i64 n = 1; n <= g.n_available(); ++n) {
      i64 np = n;
      int i = 0;
      while (np % p == 0) {
        np /= p;
        ++i;
      }
      out.coeffs[n] = ipow(unit, i) * ipow(lam, i) * nup(np) * g.a(np);
    }
  }
  out.character = chi_new.lifted_to(arith::lcm(chi_new.modulus(), out.level));
  return out;
}

TwistResult twist_by(const FormInput& g, const DirichletCharacter& mu) {
  const DirichletCharacter mup = mu.primitive();
  if (mup.modulus() == 1) return {g.level, g.coeffs, g.character.lifted_to(g.level)};
  FormInput cur = g;
  TwistResult res{g.level, g.coeffs, g.character};
  for (const auto& pp : arith::factorize(mup.modulus()).factors) {
    const DirichletCharacter nup = mup.restricted_to(pp.value());
    res = true_twist(cur, nup);
    cur.level = res.level;
    cur.coeffs = res.coeffs;
    cur.character = res.character;
    // the local data at the primes still to be processed is unchanged
    cur.twist_minimal = true;
  }
  return res;
}

FormInput dilate(const FormInput& f, i64 m) {
  if (m < 1) throw std::invalid_argument("dilate: m must be >= 1");
  if (m == 1) return f;
  FormInput out = f;
  out.level = f.level * m;
  out.dilation = f.dilation * m;
  out.coeffs.assign(f.coeffs.size() * m, cplx{0, 0});
  for (i64 n = 0; n <= f.n_available(); ++n) out.coeffs[n * m] = f.coeffs[n];
  out.is_newform = false;
  if (!out.newform) out.newform = std::make_shared<FormInput>(f);
  if (!out.minimal_twist && f.twist_minimal)
    out.minimal_twist = std::make_shared<FormInput>(f);
  out.twist_minimal = false;
  out.label = f.label.empty() ? "" : f.label + "(" + std::to_string(m) + "z)";
  return out;
}

std::pair<cplx, cplx> root_pair(cplx ap, cplx chi_p, i64 p, int weight) {
  const double pk1 = std::pow(static_cast<double>(p), weight - 1);
  const cplx disc = ap * ap - 4.0 * chi_p * pk1;
  const cplx sq = std::sqrt(disc);
  return {0.5 * (ap + sq), 0.5 * (ap - sq)};
}

FormInput p_stabilize(const FormInput& h, i64 p, cplx root, Stabilization variant) {
  if (h.level % p == 0)
    throw std::invalid_argument("p_stabilize: p must not divide the level");
  const double pk1 = std::pow(static_cast<double>(p), h.weight - 1);
  const cplx chip = h.character(p);
  const cplx resid = root * root - h.a(p) * root + chip * pk1;
  if (std::abs(resid) > 1e-6 * pk1)
    throw std::invalid_argument("p_stabilize: supplied root fails the Hecke polynomial");
  const cplx factor = variant == Stabilization::natural ? static_cast<double>(p) * root
                                                        : root;
  FormInput out = h;
  out.level = h.level * p;
  out.character = h.character.lifted_to(arith::lcm(h.character.modulus(), out.level));
  out.coeffs.assign(h.coeffs.size(), cplx{0, 0});
  for (i64 n = 1; n <= h.n_available(); ++n) {
    out.coeffs[n] = h.a(n) - (n % p == 0 ? factor * h.a(n / p) : cplx{0, 0});
  }
  out.is_newform = false;
  out.is_eigenform = h.is_newform || h.is_eigenform;
  out.twist_minimal = false;
  out.newform = h.newform ? h.newform : std::make_shared<FormInput>(h);
  out.minimal_twist = h.minimal_twist
                          ? h.minimal_twist
                          : (h.twist_minimal ? std::make_shared<FormInput>(h) : nullptr);
  const char* tag = variant == Stabilization::sharp
                        ? "#"
                        : (variant == Stabilization::flat ? "b" : "nat");
  out.label = h.label + "^" + tag;
  return out;
}

}  // namespace cuspidal::modform
