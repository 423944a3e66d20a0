#include "cuspidal/expand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cuspidal/numeric.hpp"

#ifdef CUSPIDAL_HAVE_OPENMP
#include <omp.h>
#endif

namespace cuspidal::expand {

namespace {
constexpr double kLn10 = std::numbers::ln10;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDigitsCap = 13.0;  // double precision working limit

double eval_eps(double digits) {
  return 0.05 * std::pow(10.0, -std::min(digits, kDigitsCap));
}

i64 prime_to_c_part(i64 n, i64 c) {
  i64 m = n;
  for (const auto& pp : arith::factorize(n).factors)
    if (c % pp.p == 0) m /= pp.value();
  return m;
}
}  // namespace

CuspExpansion expand_direct(const FormInput& f, const CuspDatum& cd, double digits,
                            int k0, double c0, std::uint64_t seed, int threads) {
  if (c0 <= 0.0) throw std::invalid_argument("expand_direct: decay must be positive");
  if (k0 < 1) k0 = 1;
  const int k = std::max<int>(k0, static_cast<int>(std::ceil(digits * kLn10 / c0)));
  const double c = digits * kLn10 / k;
  const int m = 2 * k;

  numeric::SampleSpec spec;
  spec.mode = numeric::SampleMode::direct;
  spec.count = m;
  spec.seed = seed;
  spec.c = cd.cusp.c;
  spec.d = cd.alpha1.d;
  spec.h = cd.h;
  spec.decay = c;
  const auto z = numeric::sample_points(spec);

  const double eps = eval_eps(digits);
  std::vector<cplx> values(m);
  std::vector<int> used(m, 0);
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1) \
    if (threads > 1)
#endif
  for (int j = 0; j < m; ++j)
    values[j] = modform::evaluate_slash(f, cd.alphah, z[j], eps, &used[j]);

  numeric::ComplexMatrix a(m, k + 1);
  for (int j = 0; j < m; ++j) {
    const cplx q = std::exp(cplx{0.0, kTwoPi} * z[j]);
    cplx qn{1.0, 0.0};
    for (int n = 0; n <= k; ++n) {
      a.at(j, n) = qn;
      qn *= q;
    }
  }
  auto x = numeric::lstsq_solve(a, values, threads);

  CuspExpansion out;
  out.datum = cd;
  out.b = std::move(x);
  out.digits = std::min(digits, kDigitsCap);
  out.decay = c;
  out.method = cusps::ExpandMethod::direct;
  out.b0_magnitude = std::abs(out.b[0]);
  double res = 0.0;
  for (int j = 0; j < m; ++j) {
    cplx r = -values[j];
    const cplx q = std::exp(cplx{0.0, kTwoPi} * z[j]);
    cplx qn{1.0, 0.0};
    for (int n = 0; n <= k; ++n) {
      r += out.b[n] * qn;
      qn *= q;
    }
    res += std::norm(r);
  }
  out.residual = std::sqrt(res);
  out.coeffs_used = *std::max_element(used.begin(), used.end());
  return out;
}

namespace {

// Local conditions of the pruning proposition at one prime.
bool mu_admissible(const DirichletCharacter& mu, const DirichletCharacter& chi_n,
                   i64 c, i64 p, int vp_n) {
  const i64 q = arith::pow_i64(p, vp_n);
  if (c % p != 0) {
    // p | d: (mu_p chi_p)^2 must be trivial
    const auto w = mu.times(chi_n).power(2).restricted_to(q);
    return w.is_trivial();
  }
  // p | c: mu_p^2 trivial on the units congruent to 1 mod p^(m')
  const int vp_c = arith::factorize(c).valuation(p);
  const int mprime = vp_n - vp_c;
  const auto w = mu.power(2).restricted_to(q);
  const i64 stride = arith::pow_i64(p, std::min(mprime, vp_n));
  for (i64 x = 1; x < q + stride; x += stride) {
    const i64 r = x % q;
    if (r == 0 || arith::gcd(r, p) != 1) continue;
    auto t = w.exponent(r);
    if (!t || t->num != 0) return false;
  }
  return true;
}

std::vector<i64> sort_key(const DirichletCharacter& mu, i64 m) {
  std::vector<i64> key;
  key.push_back(mu.conductor());
  for (const auto& comp : mu.components())
    for (std::size_t j = 0; j < comp.exps.size(); ++j)
      key.push_back(comp.exps[j].num * (comp.gen_orders[j] / comp.exps[j].den));
  key.push_back(m);
  return key;
}

}  // namespace

std::vector<TwistBasisElement> enumerate_twist_basis(const FormInput& f,
                                                     const CuspDatum& cd, i64 n) {
  if (!(f.is_eigenform || f.is_newform))
    throw std::invalid_argument("twist basis: form must be a prime-to-N eigenform");
  const FormInput* nf = f.newform ? f.newform.get() : &f;
  std::shared_ptr<const FormInput> g0;
  if (f.minimal_twist)
    g0 = f.minimal_twist;
  else if (nf->minimal_twist)
    g0 = nf->minimal_twist;
  else if (nf->twist_minimal)
    g0 = std::make_shared<FormInput>(*nf);
  else
    throw std::invalid_argument("twist basis: missing twist-minimality metadata");

  const i64 h = cd.h;
  const DirichletCharacter chi_n = f.character.lifted_to(arith::lcm(f.character.modulus(), n));
  const i64 d0 = prime_to_c_part(n, cd.cusp.c);
  const bool can_prune = (cd.alpha1.d % d0) == 0;
  // with a well-chosen matrix the translate is modular of level N*h_c already,
  // which cuts the admissible twist levels well below N*h
  const i64 nh = n * (can_prune ? cd.hc : h);
  const auto nfac = arith::factorize(n);

  struct Entry {
    std::vector<i64> key;
    TwistBasisElement elem;
  };
  std::vector<Entry> entries;
  for (const auto& mu : arith::all_characters(n)) {
    if (can_prune) {
      bool ok = true;
      for (const auto& pp : nfac.factors) {
        if (!mu_admissible(mu, chi_n, cd.cusp.c, pp.p, pp.e)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    modform::TwistResult tw = modform::twist_by(*g0, mu);
    if (nh % tw.level != 0) continue;
    for (i64 m = 1; tw.level * m <= nh; ++m) {
      if (nh % (tw.level * m) != 0) continue;
      TwistBasisElement e;
      e.base = g0;
      e.mu = mu.primitive();
      e.m = m;
      e.level = tw.level * m;
      e.coeffs = tw.coeffs;
      entries.push_back({sort_key(e.mu, m), std::move(e)});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.key < b.key; });
  // drop duplicates (same primitive character and dilation)
  std::vector<TwistBasisElement> out;
  for (auto& e : entries) {
    bool dup = false;
    for (const auto& prev : out)
      if (prev.m == e.elem.m && prev.mu.modulus() == e.elem.mu.modulus() &&
          prev.mu.same_character(e.elem.mu))
        dup = true;
    if (!dup) out.push_back(std::move(e.elem));
  }
  return out;
}

EigenExpansion expand_eigen(const FormInput& f, const CuspDatum& cd,
                            const std::vector<TwistBasisElement>& basis, double e0,
                            int k, double c, std::uint64_t seed, int threads) {
  const int l = static_cast<int>(basis.size());
  if (l == 0) throw std::invalid_argument("expand_eigen: empty basis");
  const int m = 2 * l;

  numeric::SampleSpec spec;
  spec.mode = numeric::SampleMode::eigen;
  spec.count = m;
  spec.seed = seed;
  spec.c = cd.cusp.c;
  spec.d = cd.alpha1.d;
  spec.h = cd.h;
  const auto z = numeric::sample_points(spec);

  // Deepen the truncation so the small values of the dilated basis elements
  // are still resolved; capped at the double precision limit.
  i64 m0 = 1;
  for (const auto& e : basis)
    if (e.m <= std::max<i64>(k, 1)) m0 = std::max(m0, e.m);
  const double band = kTwoPi * std::sqrt(static_cast<double>(cd.h)) /
                      static_cast<double>(cd.cusp.c);
  double digits = e0;
  if (m0 > 1 && band > c) digits += static_cast<double>(m0 - 1) / kLn10 * (band - c);
  digits = std::min(digits, kDigitsCap);
  const double eps = eval_eps(digits);

  std::vector<cplx> values(m);
  numeric::ComplexMatrix a(m, l);
  std::vector<int> used(m, 0);
  std::vector<modform::FormInput> twists(l);
  for (int i = 0; i < l; ++i) {
    twists[i].weight = f.weight;
    twists[i].level = basis[i].level;
    twists[i].coeffs = basis[i].coeffs;
  }
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1) \
    if (threads > 1)
#endif
  for (int j = 0; j < m; ++j) {
    int u = 0;
    values[j] = modform::evaluate_slash(f, cd.alphah, z[j], eps, &u);
    for (int i = 0; i < l; ++i) {
      const cplx zj = static_cast<double>(basis[i].m) * z[j];
      a.at(j, i) = modform::evaluate(twists[i], zj, eps);
    }
    used[j] = u;
  }

  // Columns whose values sit below the evaluation noise floor carry no
  // information (heavily dilated basis elements at these heights); they are
  // excluded from the solve and reported with coefficient zero.
  std::vector<int> active;
  const double col_floor = 1e3 * eps * std::sqrt(static_cast<double>(m));
  for (int i = 0; i < l; ++i) {
    double norm = 0.0;
    for (int j = 0; j < m; ++j) norm += std::norm(a.at(j, i));
    if (std::sqrt(norm) > col_floor) active.push_back(i);
  }
  if (active.empty()) throw std::runtime_error("expand_eigen: basis entirely below noise");

  EigenExpansion out;
  out.c.assign(l, cplx{0, 0});
  if (static_cast<int>(active.size()) == l) {
    out.c = numeric::lstsq_solve(a, values, threads);
  } else {
    numeric::ComplexMatrix ared(m, static_cast<int>(active.size()));
    for (int j = 0; j < m; ++j)
      for (std::size_t i = 0; i < active.size(); ++i) ared.at(j, static_cast<int>(i)) = a.at(j, active[i]);
    const auto cred = numeric::lstsq_solve(ared, values, threads);
    for (std::size_t i = 0; i < active.size(); ++i) out.c[active[i]] = cred[i];
  }
  out.digits_used = digits;
  out.negligible.resize(l);
  const double floor_c = 10.0 * std::pow(10.0, -e0);
  for (int i = 0; i < l; ++i) out.negligible[i] = std::abs(out.c[i]) < floor_c;

  CuspExpansion& ex = out.expansion;
  ex.datum = cd;
  ex.b.assign(k + 1, cplx{0, 0});
  for (int i = 0; i < l; ++i) {
    const i64 mi = basis[i].m;
    for (i64 nn = 1; nn * mi <= k; ++nn) {
      if (nn < static_cast<i64>(basis[i].coeffs.size()))
        ex.b[nn * mi] += out.c[i] * basis[i].coeffs[nn];
    }
  }
  // the synthesized coefficients inherit the c_l noise floor (the same one the
  // negligibility threshold 10*10^(-E0) acknowledges), so claim one digit less
  ex.digits = std::min(e0, kDigitsCap) - 1.0;
  ex.decay = c;
  ex.method = cusps::ExpandMethod::eigen;
  ex.b0_magnitude = 0.0;
  double res = 0.0;
  for (int j = 0; j < m; ++j) {
    cplx r = -values[j];
    for (int i = 0; i < l; ++i) r += out.c[i] * a.at(j, i);
    res += std::norm(r);
  }
  ex.residual = std::sqrt(res);
  ex.coeffs_used = *std::max_element(used.begin(), used.end());
  return out;
}

namespace {
// 16-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kGlNode[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
}  // namespace

cplx fourier_oracle(const FormInput& f, const CuspDatum& cd, int m_index, double y,
                    int q_nodes, double* err_bound) {
  if (y <= 0.0) throw std::invalid_argument("fourier_oracle: y must be positive");
  const int panels = std::max(1, q_nodes / 16);
  const double h = static_cast<double>(cd.h);
  const int k = f.weight;

  // envelope of the transformed point over x in [0,1]
  double min_im = 1e300, max_invden = 0.0;
  for (int g = 0; g <= 64; ++g) {
    const cplx z{static_cast<double>(g) / 64.0, y};
    const cplx w = cd.alphah.moebius(z);
    const cplx den = static_cast<double>(cd.alphah.c) * z + static_cast<double>(cd.alphah.d);
    min_im = std::min(min_im, w.imag());
    max_invden = std::max(max_invden, std::pow(std::abs(den), -k));
  }
  const double r = std::exp(-kTwoPi * min_im);
  const modform::TailModel tm = modform::TailModel::fit(f);
  int t = f.n_available();
  for (int n = 1; n <= f.n_available(); ++n) {
    if (tm.tail_bound(r, n) < 1e-16) {
      t = n;
      break;
    }
  }
  const double pref = std::pow(h, 0.5 * k) * std::exp(kTwoPi * m_index * y);
  const double tail = pref * max_invden * tm.tail_bound(r, t);
  if (tail > 1e-3)
    throw std::runtime_error(
        "fourier_oracle: coefficient budget cannot reach the requested index");

  auto integrate = [&](int np) {
    cplx total{0.0, 0.0};
    const double width = 1.0 / np;
    for (int p = 0; p < np; ++p) {
      const double mid = (p + 0.5) * width;
      cplx acc{0.0, 0.0};
      for (int i = 0; i < 8; ++i) {
        for (double sgn : {-1.0, 1.0}) {
          const double x = mid + sgn * kGlNode[i] * width / 2.0;
          const cplx z{x, y};
          const cplx den =
              static_cast<double>(cd.alphah.c) * z + static_cast<double>(cd.alphah.d);
          const cplx w = cd.alphah.moebius(z);
          // sum over n of a_n exp(2 pi i n w), truncated at t
          const cplx qw = std::exp(cplx{0.0, kTwoPi} * w);
          cplx qn{1.0, 0.0}, s{0.0, 0.0};
          for (int n = 1; n <= t; ++n) {
            qn *= qw;
            s += f.coeffs[n] * qn;
          }
          const cplx phase = std::exp(cplx{0.0, -kTwoPi * m_index * x});
          cplx denk{1.0, 0.0};
          for (int e = 0; e < k; ++e) denk *= den;
          acc += kGlWeight[i] * s * phase / denk;
        }
      }
      total += acc * (width / 2.0);
    }
    return total;
  };

  const cplx coarse = integrate(std::max(1, panels / 2));
  const cplx fine = integrate(panels);
  const cplx value = pref * fine;
  if (err_bound) *err_bound = tail + pref * std::abs(fine - coarse);
  return value;
}

}  // namespace cuspidal::expand
