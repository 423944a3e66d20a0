#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

const std::string kBin = CUSPIDAL_CLI_PATH;
const std::string kData = CUSPIDAL_DATA_DIR;
const std::string kTmp = "cli_scratch";

int run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json load(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Scratch {
  Scratch() {
    if (std::system(("mkdir -p " + kTmp).c_str()) != 0)
      std::perror("mkdir cli_scratch");
  }
} scratch_dir;

}  // namespace

TEST_CASE("generate: eta quotient and level-1 newforms") {
  REQUIRE(run("generate --eta 1:24 --n 400 --out " + kTmp + "/delta.json") == 0);
  const json d = load(kTmp + "/delta.json");
  CHECK(d["level"] == 1);
  CHECK(d["weight"] == 12);
  CHECK(d["coefficients"][0][0] == 1.0);
  CHECK(d["coefficients"][1][0] == -24.0);
  CHECK(d["coefficients"][2][0] == 252.0);

  // byte-identical reruns
  REQUIRE(run("generate --eta 1:24 --n 400 --out " + kTmp + "/delta2.json") == 0);
  CHECK(slurp(kTmp + "/delta.json") == slurp(kTmp + "/delta2.json"));

  REQUIRE(run("generate --level1 24 --n 50 --out " + kTmp + "/w24.json") == 0);
  const json w = load(kTmp + "/w24.json");
  REQUIRE(w.is_array());
  REQUIRE(w.size() == 2);
  const double a2a = w[0]["coefficients"][1][0].get<double>();
  const double a2b = w[1]["coefficients"][1][0].get<double>();
  CHECK(a2a + a2b == doctest::Approx(1080.0));
  CHECK(a2a * a2b == doctest::Approx(291600.0 - 144.0 * 144169.0));

  REQUIRE(run("generate --eta 1:2,2:2,3:2,6:2 --n 1200 --out " + kTmp + "/f6.json") == 0);
  CHECK(load(kTmp + "/f6.json")["level"] == 6);
}

TEST_CASE("expand: level-6 report matches the published coefficients") {
  REQUIRE(run("expand --form " + kTmp + "/f6.json --cusp 1/3 --digits 15 --coeffs 35 "
              "--decay 1.0 --method direct --seed 0 --out " + kTmp + "/exp.json") == 0);
  const json e = load(kTmp + "/exp.json");
  CHECK(e["method"] == "direct");
  CHECK(e["width"] == 2);
  const double expect[] = {0, 1, -2, -3, 4, 6, 6};
  for (int n = 1; n <= 6; ++n) {
    const double re = e["coefficients"][n][0].get<double>();
    const double im = e["coefficients"][n][1].get<double>();
    CHECK(std::abs(re - expect[n]) < 1e-10);
    CHECK(std::abs(im) < 1e-10);
  }
  // determinism: identical bytes for the same seed
  REQUIRE(run("expand --form " + kTmp + "/f6.json --cusp 1/3 --digits 15 --coeffs 35 "
              "--decay 1.0 --method direct --seed 0 --out " + kTmp + "/exp2.json") == 0);
  CHECK(slurp(kTmp + "/exp.json") == slurp(kTmp + "/exp2.json"));

  // --cusp all on the level-1 form: one report, coefficients = input
  REQUIRE(run("expand --form " + kTmp + "/delta.json --cusp all --digits 12 --out " +
              kTmp + "/expd.json") == 0);
  const json all = load(kTmp + "/expd.json");
  REQUIRE(all.is_array());
  CHECK(all.size() == 1);
  CHECK(std::abs(all[0]["coefficients"][2][0].get<double>() + 24.0) < 1e-9);
}

TEST_CASE("expand: eigen method on the level-27 fixture") {
  REQUIRE(run("expand --form " + kData + "/27.4.a.a.json --cusp 1/3 "
              "--matrix 1,-1,3,-2 --digits 12 --coeffs 35 --method eigen --seed 0 "
              "--out " + kTmp + "/e27.json") == 0);
  const json e = load(kTmp + "/e27.json");
  CHECK(e["method"] == "eigen");
  REQUIRE(e.contains("basis"));
  CHECK(e["basis"].size() == 8);
  int nontrivial = 0;
  for (const auto& b : e["basis"]) {
    if (b["negligible"].get<bool>()) continue;
    ++nontrivial;
    // each surviving coefficient is half an 18th root of unity
    const double mag = std::hypot(b["c"][0].get<double>(), b["c"][1].get<double>());
    CHECK(std::abs(mag - 0.5) < 1e-9);
  }
  CHECK(nontrivial == 4);
  // b1 is the inverse primitive 18th root of unity
  const double re = e["coefficients"][1][0].get<double>();
  const double im = e["coefficients"][1][1].get<double>();
  CHECK(std::abs(re - 0.9396926207858713) < 1e-10);
  CHECK(std::abs(im + 0.3420201433255586) < 1e-10);
}

TEST_CASE("petersson and ratio commands") {
  REQUIRE(run("petersson --f " + kTmp + "/delta.json --g " + kTmp + "/delta.json "
              "--digits 9 --out " + kTmp + "/pp.json") == 0);
  const json p = load(kTmp + "/pp.json");
  CHECK(std::abs(p["value"][0].get<double>() - 9.8869793538e-7) < 1e-15);
  CHECK(p["cusps"].size() == 1);

  REQUIRE(run("generate --eta 1:24 --n 2000 --dilate 11 --out " + kTmp + "/d11.json") == 0);
  REQUIRE(run("generate --eta 1:24 --n 2000 --out " + kTmp + "/deltafull.json") == 0);
  REQUIRE(run("ratio --f " + kTmp + "/d11.json --g " + kTmp + "/deltafull.json --h " +
              kTmp + "/deltafull.json --digits 12 --out " + kTmp + "/ratio.json") == 0);
  const json r = load(kTmp + "/ratio.json");
  const double expect = 534612.0 / (std::pow(11.0, 11) * 12.0);
  CHECK(std::abs(r["value"][0].get<double>() / expect - 1.0) < 1e-5);
}

TEST_CASE("check command: adjoint pass and deliberate fail") {
  {
    std::ofstream spec(kTmp + "/adjoint.json");
    spec << R"({"kind": "adjoint", "tol": 1e-5, "factors": []})";
  }
  CHECK(run("check --f " + kTmp + "/delta.json --lvalue 0.6317929457 --local-spec " +
            kTmp + "/adjoint.json --digits 11 --out " + kTmp + "/chk.json") == 0);
  const json c = load(kTmp + "/chk.json");
  CHECK(c["pass"].get<bool>());

  {
    std::ofstream spec(kTmp + "/adjoint_bad.json");
    // a bogus extra local factor perturbs the constant
    spec << R"({"kind": "adjoint", "tol": 1e-5,
                "factors": [{"p": 5, "case": "special-minimal"}]})";
  }
  CHECK(run("check --f " + kTmp + "/delta.json --lvalue 0.6317929457 --local-spec " +
            kTmp + "/adjoint_bad.json --digits 11 --out " + kTmp + "/chk2.json") == 1);
  CHECK_FALSE(load(kTmp + "/chk2.json")["pass"].get<bool>());
}

TEST_CASE("triple command: soft zero on character mismatch") {
  // quadratic-character form as the third leg: chi_f chi_g != chi_h
  {
    std::ofstream f(kTmp + "/badchar.json");
    f << R"({"weight": 18, "level": 3,
             "character": {"modulus": 3, "components": [{"prime_power": 3, "exponents": [[1, 2]]}]},
             "coefficients": [[1, 0], [0, 0], [0, 0]]})";
  }
  REQUIRE(run("generate --eta 1:6,3:6 --n 200 --out " + kTmp + "/f2.json") == 0);
  CHECK(run("triple --f " + kTmp + "/f2.json --g " + kTmp + "/delta.json --h " + kTmp +
            "/badchar.json --out " + kTmp + "/trip.json") == 0);
  const json t = load(kTmp + "/trip.json");
  CHECK(t["value"][0] == 0.0);
  CHECK(t.contains("note"));
}

TEST_CASE("exit codes for bad input") {
  CHECK(run("petersson --f does_not_exist.json --g also_missing.json") == 2);
  {
    std::ofstream f(kTmp + "/garbage.json");
    f << "{ not json";
  }
  CHECK(run("expand --form " + kTmp + "/garbage.json --cusp 1/3") == 2);
  CHECK(run("expand --bogus-flag") == 2);
}
