#include "cuspidal/petersson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "cuspidal/numeric.hpp"

#ifdef CUSPIDAL_HAVE_OPENMP
#include <omp.h>
#endif

namespace cuspidal::petersson {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLn10 = std::numbers::ln10;
using cusps::CuspDatum;
using cusps::CuspExpansion;
using modform::TwistResult;
}  // namespace

double volume(i64 n) {
  i64 psi = n;
  double factor = 1.0;
  for (const auto& pp : arith::factorize(n).factors)
    factor *= 1.0 + 1.0 / static_cast<double>(pp.p);
  return kPi / 3.0 * static_cast<double>(psi) * factor;
}

// The kernel is (x K_{k-2}(x) - K_{k-1}(x)); it falls out of unfolding the
// product against the Epstein theta of |cz+d|^2/y and applying Poisson
// summation (the integral equals -J(1) - 2J'(1) for J(t) the theta-weighted
// integral).  Displays of the formula sometimes carry the two orders swapped,
// which is irreconcilable with the known self-products it must reproduce.
double bessel_weight_sum(int k, i64 n, i64 h_s, double eps, long long* term_count) {
  if (k < 2 || n < 1 || h_s < 1)
    throw std::invalid_argument("bessel_weight_sum: bad arguments");
  const double base = 4.0 * kPi * std::sqrt(static_cast<double>(n) / h_s);
  double s = 0.0;
  for (int m = 1; m < 1000000; ++m) {
    const double x = base * m;
    if (x > std::max(30.0, static_cast<double>(k) * k)) {
      // certified bound for this and all later terms (each smaller)
      const double bound = 2.0 * std::pow(x / (8.0 * kPi), k - 1) * (x + 1.0) *
                           std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
      if (!(bound >= eps)) break;
    }
    const double term = std::pow(x / (8.0 * kPi), k - 1) *
                        (x * numeric::bessel_k(k - 2, x) - numeric::bessel_k(k - 1, x));
    s += term;
    if (term_count) ++*term_count;
  }
  return s;
}

namespace {

// Expansion pipeline: a form of native level L (possibly a dilation f0(mz)),
// expanded at an outer cusp of Gamma_0(N) with a possibly larger width.  The
// dilation is split off exactly, the inner cusp is matched against the
// canonical representatives of Gamma_0(L), and cached native expansions are
// transported and reindexed.
class ExpansionService {
 public:
  ExpansionService(i64 n, const Options& opts) : n_(n), opts_(opts) {}

  long long bessel_terms = 0;

  // coefficients b_0..b_K of f|[alpha1 * diag(h_target,1)]_k
  std::vector<cplx> at_cusp(const FormInput& f, const CuspDatum& outer, int k_count,
                            double c_env) {
    if (outer.cusp.c == n_ && outer.alpha1.b == 0) {
      // cusp infinity: the expansion is the input q-series
      std::vector<cplx> out(k_count + 1, cplx{0, 0});
      for (int i = 0; i <= k_count && i <= f.n_available(); ++i) out[i] = f.coeffs[i];
      return out;
    }

    const i64 m = f.dilation;
    const FormInput* base = &f;
    FormInput undilated;
    if (m > 1) {
      undilated = f;
      undilated.level = f.level / m;
      undilated.dilation = 1;
      undilated.coeffs.assign(f.n_available() / m + 1, cplx{0, 0});
      for (i64 t = 0; t * m <= f.n_available(); ++t)
        undilated.coeffs[t] = f.coeffs[t * m];
      undilated.character = f.character;  // dilation keeps the base character
      base = &undilated;
    }
    const i64 lb = base->level;
    const auto chi_b = base->character.lifted_to(arith::lcm(base->character.modulus(), lb));

    const auto deg = cusps::transport_degeneracy(f.weight, m, outer.alpha1);

    // identify the canonical Gamma_0(L) cusp equivalent to alpha_inner(oo)
    CuspDatum inner;
    cusps::EquivalentTransport tr;
    bool found = false;
    for (const auto& cusp : cusps::enumerate_cusps(lb)) {
      CuspDatum cd = cusps::make_cusp_datum(lb, chi_b, cusp);
      try {
        tr = cusps::find_equivalent_transport(cd.alpha1, deg.alpha_inner, chi_b, lb, cd.h);
      } catch (const std::runtime_error&) {
        continue;
      }
      inner = cd;
      found = true;
      break;
    }
    if (!found) throw std::logic_error("expansion service: inner cusp not found");

    const i64 p = deg.m1 * outer.h;
    const i64 q = inner.h * deg.m2;
    const i64 g = arith::gcd(p, q);
    const i64 pr = p / g, qr = q / g;  // j = nn * pr / qr
    const int nn_max = static_cast<int>((static_cast<i64>(k_count) * qr) / pr);
    const double c_inner =
        std::clamp(c_env * static_cast<double>(p) / static_cast<double>(q), 0.02, 3.0);

    const std::vector<cplx>& native = native_expansion(f, *base, inner, nn_max, c_inner);

    // transport phase to alpha_inner, then reindex and scale
    std::vector<cplx> out(k_count + 1, cplx{0, 0});
    const double scale = deg.scale * std::pow(static_cast<double>(p) / q, 0.5 * f.weight);
    for (i64 nn = qr; nn <= nn_max; nn += qr) {
      const i64 j = nn / qr * pr;
      if (j > k_count) break;
      const double ph_tr = 2.0 * kPi * static_cast<double>(tr.x) *
                           static_cast<double>(nn) / static_cast<double>(inner.h);
      const double ph_y = 2.0 * kPi * static_cast<double>(deg.y) *
                          static_cast<double>(nn) / static_cast<double>(q);
      const cplx phase{std::cos(ph_tr + ph_y), std::sin(ph_tr + ph_y)};
      if (nn < static_cast<i64>(native.size()))
        out[j] = scale * tr.factor * phase * native[nn];
    }
    return out;
  }

 private:
  struct CacheEntry {
    std::vector<cplx> b;
    int k = 0;
    double c = 1e9;
  };

  const std::vector<cplx>& native_expansion(const FormInput& orig, const FormInput& base,
                                            const CuspDatum& inner, int k_count,
                                            double c_env) {
    const auto key = std::make_tuple(static_cast<const void*>(&orig), inner.cusp.a,
                                     inner.cusp.c);
    auto it = cache_.find(key);
    if (it != cache_.end() && it->second.k >= k_count && it->second.c <= c_env + 1e-12)
      return it->second.b;

    CacheEntry entry;
    entry.k = std::max(k_count, it != cache_.end() ? it->second.k : 0);
    entry.c = std::min(c_env, it != cache_.end() ? it->second.c : c_env);

    if (inner.cusp.c == base.level) {
      entry.b.assign(entry.k + 1, cplx{0, 0});
      for (int i = 0; i <= entry.k && i <= base.n_available(); ++i)
        entry.b[i] = base.coeffs[i];
    } else {
      bool eigen_ok = opts_.method != Method::direct && (base.is_eigenform || base.is_newform);
      if (eigen_ok) {
        try {
          auto basis = expand::enumerate_twist_basis(base, inner, base.level);
          auto ee = expand::expand_eigen(base, inner, basis, opts_.digits, entry.k,
                                         entry.c, opts_.seed, opts_.threads);
          entry.b = std::move(ee.expansion.b);
        } catch (const std::exception&) {
          if (opts_.method == Method::eigen) throw;
          eigen_ok = false;
        }
      }
      if (!eigen_ok) {
        auto ex = expand::expand_direct(base, inner, opts_.digits, entry.k, entry.c,
                                        opts_.seed, opts_.threads);
        entry.b = std::move(ex.b);
      }
      if (static_cast<int>(entry.b.size()) < entry.k + 1)
        entry.b.resize(entry.k + 1, cplx{0, 0});
    }
    auto& slot = cache_[key];
    slot = std::move(entry);
    return slot.b;
  }

  i64 n_;
  Options opts_;
  std::map<std::tuple<const void*, i64, i64>, CacheEntry> cache_;
};

// S table for one cusp: values for n = 1..n_s plus the chosen decay envelope.
struct STable {
  std::vector<double> s;  // s[n], 1-based in slot n
  int n_s = 1;
  double c_env = 1.0;
};

STable build_s_table(int weight, i64 h, double eps, int threads,
                     long long* term_count) {
  const double reach = (-std::log(eps) + 50.0) / (4.0 * kPi);
  const int n_hard = std::max(1, static_cast<int>(static_cast<double>(h) * reach * reach) + 1);
  STable t;
  t.s.assign(n_hard + 1, 0.0);
  std::vector<long long> counts(n_hard + 1, 0);
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1) \
    if (threads > 1)
#endif
  for (int n = 1; n <= n_hard; ++n) t.s[n] = bessel_weight_sum(weight, n, h, eps, &counts[n]);
  if (term_count)
    for (int n = 1; n <= n_hard; ++n) *term_count += counts[n];

  // cutoff weighted by the Deligne-normalized size of the dropped terms
  // (a_n conj(b_n) / n^(k-1) grows like d(n)^2 for normalized eigenforms)
  t.n_s = 1;
  for (int n = 1; n <= n_hard; ++n)
    if (std::abs(t.s[n]) * 4.0 * std::pow(static_cast<double>(n), 1.2) >= eps) t.n_s = n;

  double c_min = 3.0;
  for (int n = 1; n <= t.n_s; ++n) {
    const double sn = std::abs(t.s[n]);
    if (sn > 0.0 && sn < 1.0) c_min = std::min(c_min, -std::log(sn) / n);
  }
  t.c_env = std::clamp(c_min, 0.05, 3.0);
  return t;
}

// widths partition the index: checked before every run
void check_cusp_partition(i64 n, const std::vector<cusps::Cusp>& cusp_list) {
  i64 total = 0;
  for (const auto& cusp : cusp_list) total += cusps::width_gamma0(n, cusp.c);
  i64 psi = n;
  for (const auto& pp : arith::factorize(n).factors) psi = psi / pp.p * (pp.p + 1);
  if (total != psi)
    throw std::logic_error("cusp widths do not partition the index at level " +
                           std::to_string(n));
}

i64 common_width(i64 n, i64 c, const std::vector<const arith::DirichletCharacter*>& chis) {
  std::vector<i64> conds;
  for (const auto* chi : chis)
    conds.push_back(chi->lifted_to(arith::lcm(chi->modulus(), n)).conductor());
  for (i64 h : arith::divisors(n / c)) {
    if ((c * c * h) % n != 0) continue;
    bool ok = true;
    for (i64 cond : conds)
      if ((c * h) % cond != 0) ok = false;
    if (ok) return h;
  }
  return n / c;
}

}  // namespace

InnerProductReport petersson_pair(const FormInput& f, const FormInput& g,
                                  const Options& opts) {
  if (f.weight != g.weight)
    throw std::invalid_argument("petersson_pair: weights must match");
  const i64 n = arith::lcm(f.level, g.level);
  const auto chi_f = f.character.lifted_to(arith::lcm(f.character.modulus(), n));
  const auto chi_g = g.character.lifted_to(arith::lcm(g.character.modulus(), n));
  if (!chi_f.same_character(chi_g))
    throw std::invalid_argument("petersson_pair: characters must match");
  const int k = f.weight;

  InnerProductReport report;
  report.digits = opts.digits;
  report.prefactor = 4.0 / volume(n);

  ExpansionService service(n, opts);
  std::vector<cusps::Cusp> cusp_list = cusps::enumerate_cusps(n);
  check_cusp_partition(n, cusp_list);

  // Two passes: the first with an absolute cutoff estimates the value scale,
  // the second scales the truncations so that E counts digits of the result.
  double eps = std::pow(10.0, -opts.digits) * 1e-3;  // safe factor 10^3
  for (int pass = 0; pass < 2; ++pass) {
    std::map<i64, STable> tables;
    report.cusps.clear();
    cplx total{0.0, 0.0};
    for (const auto& cusp : cusp_list) {
      CuspDatum cd = cusps::make_cusp_datum(n, chi_f, cusp);
      auto table_it = tables.find(cd.h);
      if (table_it == tables.end())
        table_it = tables.emplace(cd.h, build_s_table(k, cd.h, eps, opts.threads,
                                                      &report.bessel_terms)).first;
      const STable& st = table_it->second;

      const auto bf = service.at_cusp(f, cd, st.n_s, st.c_env);
      const auto bg = &f == &g ? bf : service.at_cusp(g, cd, st.n_s, st.c_env);

      cplx sum{0.0, 0.0};
      for (int nn = 1; nn <= st.n_s; ++nn) {
        sum += bf[nn] * std::conj(bg[nn]) * st.s[nn] /
               std::pow(static_cast<double>(nn), k - 1);
      }
      CuspContribution contrib;
      contrib.cusp = cusp;
      contrib.h0 = cd.h0;
      contrib.h = cd.h;
      contrib.n_trunc = st.n_s;
      contrib.value = static_cast<double>(cd.h0) / static_cast<double>(cd.h) * sum;
      total += contrib.value;
      report.cusps.push_back(contrib);
    }
    report.value = report.prefactor * total;
    const double scale = std::abs(report.value);
    if (scale == 0.0 || scale >= 1.0) break;
    const double eps_rel = std::pow(10.0, -opts.digits) * 1e-3 * scale;
    if (eps_rel >= eps * 0.99) break;  // already deep enough
    eps = std::max(eps_rel, 1e-40);
  }
  return report;
}

InnerProductReport petersson_triple(const FormInput& f, const FormInput& g,
                                    const FormInput& h, const Options& opts) {
  if (f.weight + g.weight != h.weight)
    throw std::invalid_argument("petersson_triple: weights must satisfy k + (m-k) = m");
  const i64 n = arith::lcm(arith::lcm(f.level, g.level), h.level);
  const int mw = h.weight;

  const auto chi_prod = f.character.times(g.character).lifted_to(
      arith::lcm(arith::lcm(f.character.modulus(), g.character.modulus()), n));
  const auto chi_h = h.character.lifted_to(arith::lcm(h.character.modulus(), n));
  InnerProductReport report;
  report.digits = opts.digits;
  report.prefactor = 4.0 / volume(n);
  if (!chi_prod.same_character(chi_h)) {
    report.note = "character mismatch: inner product is identically zero";
    return report;
  }

  ExpansionService service(n, opts);
  const std::vector<cusps::Cusp> cusp_list = cusps::enumerate_cusps(n);
  check_cusp_partition(n, cusp_list);
  double eps = std::pow(10.0, -opts.digits) * 1e-3;
  for (int pass = 0; pass < 2; ++pass) {
    std::map<i64, STable> tables;
    report.cusps.clear();
    cplx total{0.0, 0.0};
    for (const auto& cusp : cusp_list) {
      CuspDatum cd = cusps::make_cusp_datum(n, chi_h, cusp);
      // common width for all three forms
      const i64 hs = common_width(n, cusp.c, {&f.character, &g.character, &h.character});
      if (hs != cd.h) {
        cd.h = hs;
        cd.alphah = cd.alpha1.mul(arith::IntMatrix2::dilation(hs));
        i64 hc = 1;
        for (const auto& pp : arith::factorize(hs).factors)
          if (cusp.c % pp.p == 0) hc *= pp.value();
        cd.hc = hc;
        cd.hd = hs / hc;
      }

      auto table_it = tables.find(cd.h);
      if (table_it == tables.end())
        table_it = tables.emplace(cd.h, build_s_table(mw, cd.h, eps, opts.threads,
                                                      &report.bessel_terms)).first;
      const STable& st = table_it->second;

      const auto bf = service.at_cusp(f, cd, st.n_s, st.c_env);
      const auto bg = service.at_cusp(g, cd, st.n_s, st.c_env);
      const auto bh = service.at_cusp(h, cd, st.n_s, st.c_env);

      cplx sum{0.0, 0.0};
      for (int nn = 1; nn <= st.n_s; ++nn) {
        cplx cauchy{0.0, 0.0};
        for (int i = 1; i < nn; ++i) cauchy += bf[i] * bg[nn - i];
        sum += cauchy * std::conj(bh[nn]) * st.s[nn] /
               std::pow(static_cast<double>(nn), mw - 1);
      }
      CuspContribution contrib;
      contrib.cusp = cusp;
      contrib.h0 = cd.h0;
      contrib.h = cd.h;
      contrib.n_trunc = st.n_s;
      contrib.value = static_cast<double>(cd.h0) / static_cast<double>(cd.h) * sum;
      total += contrib.value;
      report.cusps.push_back(contrib);
    }
    report.value = report.prefactor * total;
    const double scale = std::abs(report.value);
    if (scale == 0.0 || scale >= 1.0) break;
    const double eps_rel = std::pow(10.0, -opts.digits) * 1e-3 * scale;
    if (eps_rel >= eps * 0.99) break;
    eps = std::max(eps_rel, 1e-40);
  }
  return report;
}

cplx petersson_ratio(const FormInput& fa, const FormInput& ga, const FormInput& fb,
                     const FormInput& gb, const Options& opts) {
  const auto num = petersson_pair(fa, ga, opts);
  const auto den = petersson_pair(fb, gb, opts);
  if (std::abs(den.value) == 0.0)
    throw std::runtime_error("petersson_ratio: denominator is zero");
  return num.value / den.value;
}

double adjoint_constant(int weight, const std::vector<AdjointLocalFactor>& factors) {
  double c = kPi * kPi / 6.0 * std::pow(4.0 * kPi, weight) / std::tgamma(weight);
  for (const auto& f : factors) {
    const double p = static_cast<double>(f.p);
    const double e = 1.0 + 1.0 / p;
    if (f.case_tag == "unramified-nonminimal") {
      if (!(f.lp_value > 0.0))
        throw std::invalid_argument("adjoint_constant: missing L_p value");
      c *= e * f.lp_value;
    } else if (f.case_tag == "special-minimal") {
      c *= e;
    } else if (f.case_tag == "special-nonminimal") {
      c *= e / (1.0 - 1.0 / (p * p));
    } else if (f.case_tag == "principal-minimal") {
      c *= e;
    } else if (f.case_tag == "principal-nonminimal") {
      c *= e / (1.0 - 1.0 / p);
    } else if (f.case_tag == "supercuspidal-eta") {
      // factor 1
    } else if (f.case_tag == "supercuspidal-noneta") {
      c *= e;
    } else {
      throw std::invalid_argument("adjoint_constant: unknown case tag " + f.case_tag);
    }
  }
  return c;
}

double ichino_constant(int k, int m, i64 mf, i64 mg, i64 mh,
                       const std::vector<IchinoLocalFactor>& factors) {
  if (!(0 < k && k < m)) throw std::invalid_argument("ichino_constant: need 0 < k < m");
  double c = 9.0 * std::tgamma(m - 1) * std::tgamma(k) * std::tgamma(m - k) /
             (std::pow(kPi, 2 * m + 2) * std::pow(2.0, 4 * m - 2) *
              std::pow(static_cast<double>(mf), k) *
              std::pow(static_cast<double>(mg), m - k) *
              std::pow(static_cast<double>(mh), m));
  for (const auto& f : factors) {
    const double p = static_cast<double>(f.p);
    const double shared = 1.0 / (p * std::pow(1.0 + 1.0 / p, 2));
    if (f.case_tag == "special-two-unramified" ||
        f.case_tag == "principal-pair-unramified" ||
        f.case_tag == "special-pair-unramified" ||
        f.case_tag == "principal-pair-special" || f.case_tag == "three-principal") {
      c *= shared;
    } else if (f.case_tag == "three-special") {
      const double eps = -f.abg / std::pow(p, m - 2);
      c *= (1.0 - eps) * shared;
    } else if (f.case_tag == "higher-conductor-two-unramified") {
      c *= std::pow(p, -f.c) / std::pow(1.0 + 1.0 / p, 2);
    } else if (f.case_tag == "nps-type1") {
      if (f.c % 2 != 0)
        throw std::invalid_argument("ichino_constant: nps-type1 needs even conductor");
      // r_j = (alpha^j - alpha^-j)/(alpha - alpha^-1) via r_{j+1} = s1 r_j - r_{j-1}
      const int half = f.c / 2;
      double r_prev = 0.0, r_cur = 1.0;  // r_0, r_1
      std::vector<double> r{0.0, 1.0};
      for (int j = 2; j <= half + 1; ++j) {
        const double next = f.s1 * r_cur - r_prev;
        r_prev = r_cur;
        r_cur = next;
        r.push_back(next);
      }
      const double num = r[half + 1] - (1.0 / p) * r[half - 1];
      c *= std::pow(p, -f.c) / std::pow(1.0 + 1.0 / p, 2) * num * num;
    } else {
      throw std::invalid_argument("ichino_constant: unknown case tag " + f.case_tag);
    }
  }
  return c;
}

RatioCheckReport ratio_check(cplx lhs, double l_value, double constant, double tol) {
  const double deviation = std::abs(lhs / (constant * l_value) - 1.0);
  return {deviation, deviation <= tol};
}

}  // namespace cuspidal::petersson
