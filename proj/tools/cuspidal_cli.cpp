#include <CLI11.hpp>

#include <chrono>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>

#include "cuspidal/expand.hpp"
#include "cuspidal/io.hpp"
#include "cuspidal/petersson.hpp"

using namespace cuspidal;
using arith::cplx;
using arith::i64;
using io::json;

namespace {

struct CommonOpts {
  double digits = 12.0;
  int coeffs = 1;
  double decay = 1.0;
  std::uint64_t seed = 0;
  std::string method = "auto";
  int threads = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--digits", o.digits, "target decimal digits E (capped at 13 internally)");
  cmd->add_option("--coeffs", o.coeffs, "minimum number of coefficients K0");
  cmd->add_option("--decay", o.decay, "error decay rate C0");
  cmd->add_option("--seed", o.seed, "sample-point seed");
  cmd->add_option("--method", o.method, "direct | eigen | auto")
      ->check(CLI::IsMember({"direct", "eigen", "auto"}));
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output JSON path (stdout when omitted)");
}

petersson::Method parse_method(const std::string& m) {
  if (m == "direct") return petersson::Method::direct;
  if (m == "eigen") return petersson::Method::eigen;
  return petersson::Method::automatic;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(1) << "\n";
  } else {
    io::write_json(out, j);
  }
}

json expand_one(const modform::FormInput& f, const cusps::CuspDatum& cd, i64 level,
                const CommonOpts& o) {
  const bool has_meta =
      (f.is_eigenform || f.is_newform) &&
      (f.minimal_twist || f.twist_minimal || (f.newform && f.newform->twist_minimal));
  const bool eigen = o.method == "eigen" || (o.method == "auto" && has_meta);
  if (eigen) {
    const auto basis = expand::enumerate_twist_basis(f, cd, level);
    const int k = std::max(o.coeffs, static_cast<int>(std::ceil(
                                         o.digits * std::numbers::ln10 / o.decay)));
    const auto ee =
        expand::expand_eigen(f, cd, basis, o.digits, k, o.decay, o.seed, o.threads);
    json j = io::expansion_to_json(ee.expansion);
    json basis_j = json::array();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      basis_j.push_back({{"mu", io::character_to_json(basis[i].mu)},
                         {"dilation", basis[i].m},
                         {"level", basis[i].level},
                         {"c", {ee.c[i].real(), ee.c[i].imag()}},
                         {"negligible", static_cast<bool>(ee.negligible[i])}});
    }
    j["basis"] = basis_j;
    j["digits_used"] = ee.digits_used;
    return j;
  }
  const auto e = expand::expand_direct(f, cd, o.digits, o.coeffs, o.decay, o.seed,
                                       o.threads);
  return io::expansion_to_json(e);
}

int run(int argc, char** argv) {
  CLI::App app{"numerical q-expansions at cusps and Petersson inner products"};
  app.require_subcommand(1);
  // --h names a form below, so help is --help only
  app.set_help_flag("--help", "print help");

  // ---- expand ----
  auto* cmd_expand = app.add_subcommand("expand", "q-expansion of a form at a cusp");
  cmd_expand->set_help_flag("--help", "print help");
  std::string form_path, cusp_spec = "all", matrix_spec;
  CommonOpts eo;
  cmd_expand->add_option("--form", form_path, "form JSON")->required();
  cmd_expand->add_option("--cusp", cusp_spec, "a/c or 'all'");
  cmd_expand->add_option("--matrix", matrix_spec, "explicit alpha_1 as a,b,c,d");
  add_common(cmd_expand, eo);

  // ---- petersson / triple / ratio ----
  auto* cmd_pet = app.add_subcommand("petersson", "inner product <f, g>");
  auto* cmd_triple = app.add_subcommand("triple", "inner product <f g, h>");
  auto* cmd_ratio = app.add_subcommand("ratio", "<f, g> / <h, h>");
  std::string f_path, g_path, h_path;
  CommonOpts po, to, ro;
  for (auto [cmd, o] : {std::pair{cmd_pet, &po}, {cmd_triple, &to}, {cmd_ratio, &ro}}) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--f", f_path, "first form JSON")->required();
    cmd->add_option("--g", g_path, "second form JSON");
    cmd->add_option("--h", h_path, "third form JSON");
    add_common(cmd, *o);
  }

  // ---- check ----
  auto* cmd_check = app.add_subcommand("check", "compare against a special L-value");
  cmd_check->set_help_flag("--help", "print help");
  double lvalue = 0.0;
  std::string local_spec_path;
  CommonOpts co;
  cmd_check->add_option("--f", f_path, "form JSON")->required();
  cmd_check->add_option("--g", g_path, "second form JSON (ichino)");
  cmd_check->add_option("--h", h_path, "third form JSON (ichino)");
  cmd_check->add_option("--lvalue", lvalue, "special L-value fixture")->required();
  cmd_check->add_option("--local-spec", local_spec_path, "local factor spec JSON")
      ->required();
  add_common(cmd_check, co);

  // ---- generate ----
  auto* cmd_gen = app.add_subcommand("generate", "fixture generators");
  cmd_gen->set_help_flag("--help", "print help");
  std::string eta_spec, twist_path, char_path, stab_path, root_spec, variant = "sharp";
  int level1_weight = 0, n_max = 1000;
  i64 gen_level = 0, stab_p = 0, dilation = 1;
  std::string gen_out;
  cmd_gen->add_option("--eta", eta_spec, "eta quotient spec d:r[,d:r...]");
  cmd_gen->add_option("--level1", level1_weight, "level-1 newforms of this weight");
  cmd_gen->add_option("--twist", twist_path, "base form to twist");
  cmd_gen->add_option("--char", char_path, "twisting character JSON");
  cmd_gen->add_option("--stabilize", stab_path, "form to p-stabilize");
  cmd_gen->add_option("--p", stab_p, "stabilization prime");
  cmd_gen->add_option("--variant", variant, "sharp | flat | natural")
      ->check(CLI::IsMember({"sharp", "flat", "natural"}));
  cmd_gen->add_option("--root", root_spec, "explicit root re,im (default: Hecke root)");
  cmd_gen->add_option("--dilate", dilation, "emit f(m z)");
  cmd_gen->add_option("--n", n_max, "number of coefficients");
  cmd_gen->add_option("--level", gen_level, "level override for eta quotients");
  cmd_gen->add_option("--out", gen_out, "output JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag errors are input errors
  }

  if (*cmd_expand) {
    auto f = io::load_form(form_path, n_max);
    json out;
    if (!matrix_spec.empty()) {
      i64 a, b, c, d;
      if (std::sscanf(matrix_spec.c_str(), "%lld,%lld,%lld,%lld", (long long*)&a,
                      (long long*)&b, (long long*)&c, (long long*)&d) != 4)
        throw std::invalid_argument("--matrix expects a,b,c,d");
      const auto cd = cusps::make_cusp_datum_with_matrix(f.level, f.character,
                                                         {a, b, c, d});
      out = expand_one(f, cd, f.level, eo);
    } else if (cusp_spec == "all") {
      out = json::array();
      for (const auto& cusp : cusps::enumerate_cusps(f.level)) {
        const auto cd = cusps::make_cusp_datum(f.level, f.character, cusp);
        out.push_back(expand_one(f, cd, f.level, eo));
      }
    } else {
      i64 a, c;
      if (std::sscanf(cusp_spec.c_str(), "%lld/%lld", (long long*)&a, (long long*)&c) != 2)
        throw std::invalid_argument("--cusp expects a/c or 'all'");
      const auto cd = cusps::make_cusp_datum(f.level, f.character, {a, c});
      out = expand_one(f, cd, f.level, eo);
    }
    emit(out, eo.out);
    std::cerr << "expand: done\n";
    return 0;
  }

  if (*cmd_pet || *cmd_triple || *cmd_ratio) {
    const CommonOpts& o = *cmd_pet ? po : (*cmd_triple ? to : ro);
    petersson::Options opts;
    opts.digits = o.digits;
    opts.method = parse_method(o.method);
    opts.seed = o.seed;
    opts.threads = o.threads;
    auto f = io::load_form(f_path, n_max);
    if (*cmd_pet) {
      auto g = g_path.empty() ? f : io::load_form(g_path, n_max);
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = petersson::petersson_pair(f, g, opts);
      json j = io::inner_product_to_json(rep);
      j["timings"] = {{"seconds", std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count()}};
      emit(j, o.out);
      std::fprintf(stderr, "<f, g> = %.17g + %.17g i\n", rep.value.real(),
                   rep.value.imag());
      return 0;
    }
    if (*cmd_triple) {
      if (g_path.empty() || h_path.empty())
        throw std::invalid_argument("triple: --g and --h are required");
      auto g = io::load_form(g_path, n_max);
      auto h = io::load_form(h_path, n_max);
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = petersson::petersson_triple(f, g, h, opts);
      json j = io::inner_product_to_json(rep);
      j["norm_square"] = std::norm(rep.value);
      j["timings"] = {{"seconds", std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count()}};
      emit(j, o.out);
      std::fprintf(stderr, "<f g, h> = %.17g + %.17g i\n", rep.value.real(),
                   rep.value.imag());
      return 0;
    }
    if (g_path.empty() || h_path.empty())
      throw std::invalid_argument("ratio: --g and --h are required");
    auto g = io::load_form(g_path, n_max);
    auto h = io::load_form(h_path, n_max);
    const cplx r = petersson::petersson_ratio(f, g, h, h, opts);
    json j{{"schema", io::kSchema}, {"value", {r.real(), r.imag()}}};
    emit(j, o.out);
    std::fprintf(stderr, "<f, g>/<h, h> = %.17g + %.17g i\n", r.real(), r.imag());
    return 0;
  }

  if (*cmd_check) {
    petersson::Options opts;
    opts.digits = co.digits;
    opts.method = parse_method(co.method);
    opts.seed = co.seed;
    opts.threads = co.threads;
    const json spec = io::read_json(local_spec_path);
    const std::string kind = spec.value("kind", "adjoint");
    const double tol = spec.value("tol", 1e-5);
    auto f = io::load_form(f_path, n_max);
    cplx lhs;
    double constant;
    if (kind == "adjoint") {
      const auto rep = petersson::petersson_pair(f, f, opts);
      lhs = rep.value;
      constant = petersson::adjoint_constant(
          f.weight, io::adjoint_factors_from_json(spec.value("factors", json::array())));
    } else if (kind == "ichino") {
      auto g = io::load_form(g_path, n_max);
      auto h = io::load_form(h_path, n_max);
      const auto rep = petersson::petersson_triple(f, g, h, opts);
      lhs = std::norm(rep.value);
      constant = petersson::ichino_constant(
          f.weight, h.weight, spec.value("Mf", 1), spec.value("Mg", 1),
          spec.value("Mh", 1),
          io::ichino_factors_from_json(spec.value("factors", json::array())));
    } else {
      throw std::invalid_argument("check: kind must be adjoint or ichino");
    }
    // adjoint: <f,f> * C = L, so check against 1/C; ichino: lhs = C * L
    const auto rc = kind == "adjoint"
                        ? petersson::ratio_check(lhs, lvalue, 1.0 / constant, tol)
                        : petersson::ratio_check(lhs, lvalue, constant, tol);
    json j{{"schema", io::kSchema},
           {"kind", kind},
           {"lhs", {lhs.real(), lhs.imag()}},
           {"constant", constant},
           {"lvalue", lvalue},
           {"deviation", rc.deviation},
           {"tol", tol},
           {"pass", rc.pass}};
    emit(j, co.out);
    std::fprintf(stderr, "%-8s deviation %.3e against tol %.1e : %s\n", kind.c_str(),
                 rc.deviation, tol, rc.pass ? "PASS" : "FAIL");
    return rc.pass ? 0 : 1;
  }

  // generate
  modform::FormInput f;
  json out;
  if (!eta_spec.empty()) {
    std::vector<std::pair<i64, i64>> spec;
    std::size_t pos = 0;
    while (pos < eta_spec.size()) {
      long long d = 0, r = 0;
      int consumed = 0;
      if (std::sscanf(eta_spec.c_str() + pos, "%lld:%lld%n", &d, &r, &consumed) < 2)
        throw std::invalid_argument("--eta expects d:r[,d:r...]");
      spec.push_back({d, r});
      pos += consumed;
      if (pos < eta_spec.size() && eta_spec[pos] == ',') ++pos;
    }
    f = modform::eta_quotient_form(spec, n_max, gen_level);
    f.is_newform = f.is_eigenform = f.twist_minimal = true;  // caller-declared
    if (dilation > 1) f = modform::dilate(f, dilation);
    out = io::form_to_json(f);
  } else if (level1_weight > 0) {
    auto forms = modform::level1_newforms(level1_weight, n_max);
    if (dilation > 1)
      for (auto& w : forms) w = modform::dilate(w, dilation);
    out = json::array();
    for (const auto& w : forms) out.push_back(io::form_to_json(w));
  } else if (!twist_path.empty()) {
    auto base = io::load_form(twist_path, n_max);
    const auto mu = io::character_from_json(io::read_json(char_path));
    const auto tw = modform::twist_by(base, mu);
    modform::FormInput g;
    g.weight = base.weight;
    g.level = tw.level;
    g.character = tw.character;
    g.coeffs = tw.coeffs;
    g.is_newform = g.is_eigenform = true;
    g.label = base.label.empty() ? "twist" : base.label + " x chi";
    if (dilation > 1) g = modform::dilate(g, dilation);
    out = io::form_to_json(g);
  } else if (!stab_path.empty()) {
    auto base = io::load_form(stab_path, n_max);
    if (stab_p < 2) throw std::invalid_argument("--stabilize requires --p");
    cplx root;
    const auto variant_e = variant == "sharp"   ? modform::Stabilization::sharp
                           : variant == "flat"  ? modform::Stabilization::flat
                                                : modform::Stabilization::natural;
    if (!root_spec.empty()) {
      double re = 0, im = 0;
      if (std::sscanf(root_spec.c_str(), "%lf,%lf", &re, &im) < 1)
        throw std::invalid_argument("--root expects re[,im]");
      root = {re, im};
    } else {
      auto [alpha, beta] = modform::root_pair(base.a(stab_p), base.character(stab_p),
                                              stab_p, base.weight);
      root = variant_e == modform::Stabilization::flat ? alpha : beta;
    }
    out = io::form_to_json(modform::p_stabilize(base, stab_p, root, variant_e));
  } else {
    throw std::invalid_argument(
        "generate: one of --eta, --level1, --twist, --stabilize required");
  }
  emit(out, gen_out);
  std::cerr << "generate: done\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
