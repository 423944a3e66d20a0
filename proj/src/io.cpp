#include "cuspidal/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cuspidal::io {

namespace {
json cplx_to_json(const arith::cplx& z) { return json::array({z.real(), z.imag()}); }

arith::cplx cplx_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}
}  // namespace

json character_to_json(const arith::DirichletCharacter& chi) {
  json comps = json::array();
  for (const auto& c : chi.components()) {
    json exps = json::array();
    for (const auto& t : c.exps) exps.push_back(json::array({t.num, t.den}));
    comps.push_back({{"prime_power", c.q}, {"exponents", exps}});
  }
  return {{"modulus", chi.modulus()}, {"components", comps}};
}

arith::DirichletCharacter character_from_json(const json& j) {
  const arith::i64 modulus = j.at("modulus").get<arith::i64>();
  auto chi = arith::DirichletCharacter::trivial(modulus);
  if (!j.contains("components")) return chi;
  std::vector<std::vector<arith::Rational>> exps;
  for (const auto& comp : chi.components())
    exps.push_back(std::vector<arith::Rational>(comp.gens.size(), arith::Rational(0, 1)));
  for (const auto& cj : j.at("components")) {
    const arith::i64 q = cj.at("prime_power").get<arith::i64>();
    bool matched = false;
    for (std::size_t i = 0; i < chi.components().size(); ++i) {
      if (chi.components()[i].q != q) continue;
      const auto& ej = cj.at("exponents");
      if (ej.size() != exps[i].size())
        throw std::invalid_argument("character JSON: wrong generator count for " +
                                    std::to_string(q));
      for (std::size_t g = 0; g < exps[i].size(); ++g)
        exps[i][g] = arith::Rational(ej[g].at(0).get<arith::i64>(),
                                     ej[g].at(1).get<arith::i64>());
      matched = true;
    }
    if (!matched)
      throw std::invalid_argument("character JSON: prime power does not divide modulus");
  }
  return arith::DirichletCharacter::from_exponents(modulus, exps);
}

json form_to_json(const modform::FormInput& f) {
  json j;
  j["schema"] = kSchema;
  if (!f.label.empty()) j["label"] = f.label;
  j["weight"] = f.weight;
  // files store the base form's data; "dilation" means the form is f0(m z)
  j["level"] = f.level / f.dilation;
  j["character"] = character_to_json(f.character);
  json coeffs = json::array();
  for (arith::i64 n = 1; n * f.dilation <= f.n_available(); ++n)
    coeffs.push_back(cplx_to_json(f.coeffs[n * f.dilation]));
  j["coefficients"] = coeffs;
  const modform::FormInput* base =
      (f.dilation != 1 && f.newform) ? f.newform.get() : &f;
  j["flags"] = {{"newform", base->is_newform},
                {"eigenform", base->is_eigenform},
                {"twist_minimal", base->twist_minimal}};
  if (f.dilation != 1) j["dilation"] = f.dilation;
  return j;
}

modform::FormInput form_from_json(const json& j, int n_max_default) {
  modform::FormInput f;
  if (j.contains("eta")) {
    std::vector<std::pair<arith::i64, arith::i64>> spec;
    for (const auto& e : j.at("eta"))
      spec.push_back({e.at(0).get<arith::i64>(), e.at(1).get<arith::i64>()});
    const int nm = j.value("n_max", n_max_default);
    f = modform::eta_quotient_form(spec, nm, j.value("level", 0));
  } else if (j.contains("level1")) {
    const int weight = j.at("level1").at("weight").get<int>();
    const int idx = j.at("level1").value("index", 0);
    const int nm = j.value("n_max", n_max_default);
    auto forms = modform::level1_newforms(weight, nm);
    if (idx < 0 || idx >= static_cast<int>(forms.size()))
      throw std::invalid_argument("form JSON: level1 index out of range");
    f = forms[idx];
  } else {
    f.weight = j.at("weight").get<int>();
    f.level = j.at("level").get<arith::i64>();
    f.character = j.contains("character") ? character_from_json(j.at("character"))
                                          : arith::DirichletCharacter::trivial(f.level);
    if (j.contains("hecke_primes")) {
      std::map<arith::i64, arith::cplx> ap;
      for (const auto& [key, val] : j.at("hecke_primes").items())
        ap[std::stoll(key)] = cplx_from_json(val);
      const int nm = j.value("n_max", n_max_default);
      f.coeffs = modform::hecke_extend(ap, f.weight, f.level, f.character, nm);
    } else {
      const auto& coeffs = j.at("coefficients");
      f.coeffs.assign(coeffs.size() + 1, arith::cplx{0, 0});
      for (std::size_t n = 0; n < coeffs.size(); ++n)
        f.coeffs[n + 1] = cplx_from_json(coeffs[n]);
    }
  }
  if (j.contains("weight")) f.weight = j.at("weight").get<int>();
  if (j.contains("level")) f.level = j.at("level").get<arith::i64>();
  if (j.contains("character")) f.character = character_from_json(j.at("character"));
  if (j.contains("flags")) {
    const auto& fl = j.at("flags");
    f.is_newform = fl.value("newform", false);
    f.is_eigenform = fl.value("eigenform", false);
    f.twist_minimal = fl.value("twist_minimal", false);
  }
  if (j.contains("label")) f.label = j.at("label").get<std::string>();
  const arith::i64 m = j.value("dilation", 1);
  if (m != 1) f = modform::dilate(f, m);
  return f;
}

modform::FormInput load_form(const std::string& path, int n_max_default) {
  return form_from_json(read_json(path), n_max_default);
}

namespace {
std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
}  // namespace

json expansion_to_json(const cusps::CuspExpansion& e) {
  json j;
  j["schema"] = kSchema;
  j["cusp"] = {{"a", e.datum.cusp.a}, {"c", e.datum.cusp.c}};
  j["matrix"] = {e.datum.alpha1.a, e.datum.alpha1.b, e.datum.alpha1.c, e.datum.alpha1.d};
  j["width_gamma0"] = e.datum.h0;
  j["width"] = e.datum.h;
  switch (e.method) {
    case cusps::ExpandMethod::direct: j["method"] = "direct"; break;
    case cusps::ExpandMethod::eigen: j["method"] = "eigen"; break;
    case cusps::ExpandMethod::transport: j["method"] = "transport"; break;
  }
  j["digits"] = e.digits;
  j["decay"] = e.decay;
  j["k"] = static_cast<int>(e.b.size()) - 1;
  json coeffs = json::array();
  for (const auto& b : e.b) coeffs.push_back(cplx_to_json(b));
  j["coefficients"] = coeffs;
  j["diagnostics"] = {{"b0_magnitude", e.b0_magnitude},
                      {"residual", e.residual},
                      {"coeffs_used", e.coeffs_used}};
  return j;
}

json inner_product_to_json(const petersson::InnerProductReport& r) {
  json j;
  j["schema"] = kSchema;
  j["value"] = cplx_to_json(r.value);
  j["value_str"] = {fmt17(r.value.real()), fmt17(r.value.imag())};
  j["prefactor"] = r.prefactor;
  j["digits"] = r.digits;
  j["bessel_terms"] = r.bessel_terms;
  if (!r.note.empty()) j["note"] = r.note;
  json cusps_j = json::array();
  for (const auto& c : r.cusps) {
    cusps_j.push_back({{"cusp", {{"a", c.cusp.a}, {"c", c.cusp.c}}},
                       {"width_gamma0", c.h0},
                       {"width", c.h},
                       {"n_trunc", c.n_trunc},
                       {"value", cplx_to_json(c.value)}});
  }
  j["cusps"] = cusps_j;
  return j;
}

std::vector<petersson::AdjointLocalFactor> adjoint_factors_from_json(const json& j) {
  std::vector<petersson::AdjointLocalFactor> out;
  for (const auto& fj : j) {
    petersson::AdjointLocalFactor f;
    f.p = fj.at("p").get<arith::i64>();
    f.case_tag = fj.at("case").get<std::string>();
    f.lp_value = fj.value("lp_value", 0.0);
    out.push_back(f);
  }
  return out;
}

std::vector<petersson::IchinoLocalFactor> ichino_factors_from_json(const json& j) {
  std::vector<petersson::IchinoLocalFactor> out;
  for (const auto& fj : j) {
    petersson::IchinoLocalFactor f;
    f.p = fj.at("p").get<arith::i64>();
    f.case_tag = fj.at("case").get<std::string>();
    f.c = fj.value("c", 1);
    f.abg = fj.value("abg", 0.0);
    f.s1 = fj.value("s1", 0.0);
    out.push_back(f);
  }
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace cuspidal::io
