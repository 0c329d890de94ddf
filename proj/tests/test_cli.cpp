#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "commands.hpp"
#include "support/instances.hpp"
#include "ttr/examples.hpp"
#include "ttr/random.hpp"
#include "ttr/specfile.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ttr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = ttr::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ttr_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example_spec(const std::string& name) {
  Result r = run({"example", name, "--emit-spec"});
  REQUIRE(r.code == 0);
  return write(name + ".json", r.out);
}

}  // namespace

TEST_CASE("check-exact on the controlled-X spec") {
  Result r = run({"check-exact", example_spec("cx")});
  CHECK(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["verdict"] == "ttr");
  CHECK(rep["results"]["theorem1_residual"].get<double>() <= 1e-10);
  CHECK(rep["results"]["product_preservation"]["preserved"] == false);
  CHECK(rep["version"] == ttr::cli::kVersion);
  CHECK(rep["command"] == "check-exact");
  CHECK(rep["spec"]["name"] == "cx");
  CHECK(rep["policy"].contains("equality_tol"));
}

TEST_CASE("check-exact solves for the ancilla when none is given") {
  ttr::Rng rng(90);
  ttr::SpecFile s;
  s.name = "random";
  s.dim_s = s.dim_e = 2;
  s.unitary = ttr::random_unitary(4, rng);
  s.xi = ttr::random_density_mixed(2, 0.3, rng);
  s.gamma = ttr::random_density_mixed(2, 0.3, rng);
  Result r = run({"check-exact", write("random.json", ttr::spec_to_json(s).dump())});
  CHECK(r.code == 1);
  json rep = json::parse(r.out);
  CHECK(rep["verdict"] == "not_ttr");
  CHECK(rep["results"]["feasibility"]["least_squares_residual"].get<double>() > 1e-6);

  Result th = run({"check-exact", example_spec("unital-swap")});
  CHECK(th.code == 0);
}

TEST_CASE("check-exact on a Hamiltonian spec needs an evolution time") {
  std::string path = example_spec("xx");
  CHECK(run({"check-exact", path}).code == 64);
  Result r = run({"check-exact", path, "--dt", "1.0471975511965976"});
  CHECK(r.code == 0);
}

TEST_CASE("malformed specs are usage errors with a line") {
  std::string text = slurp(example_spec("cx"));
  json doc = json::parse(text);
  doc["gamma"][1].erase(1);
  Result r = run({"check-exact", write("ragged.json", doc.dump(2))});
  CHECK(r.code == 64);
  CHECK(r.err.find("line") != std::string::npos);
  CHECK(run({"check-exact", write("broken.json", "{ not json")}).code == 64);
  CHECK(run({"check-exact", (scratch() / "missing.json").string()}).code == 64);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 64);
  CHECK(run({"frobnicate"}).code == 64);
  std::string path = example_spec("block-dephasing");
  CHECK(run({"approx", path, "--order", "3"}).code == 64);
  CHECK(run({"approx", path, "--points", "3"}).code == 64);
  CHECK(run({"check-exact", example_spec("cx"), "--tol", "-1"}).code == 64);
  CHECK(run({"example", "nope"}).code == 65);
}

TEST_CASE("approx reports a floor on the thermal spec") {
  std::string csv = (scratch() / "thermal.csv").string();
  Result r = run({"approx", example_spec("thermal"), "--order", "2", "--csv", csv});
  CHECK(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["results"]["slope_fit"]["status"] == "floor");
  std::string body = slurp(csv);
  CHECK(body.rfind("dt,mismatch\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 13);
}

TEST_CASE("approx on block dephasing with a solved ancilla") {
  Result r = run({"approx", example_spec("block-dephasing"), "--order", "2", "--xi-prime", "solve"});
  CHECK(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["verdict"] == "conditions_hold");
  const json& fit = rep["results"]["slope_fit"];
  if (fit["status"] == "fit") CHECK(fit["slope"].get<double>() >= 2.9);
  CHECK(rep["results"].contains("xi_prime_solve"));
}

TEST_CASE("collision on the thermal spec") {
  Result r = run({"collision", example_spec("collision-thermal"), "--N", "1,4,16"});
  CHECK(r.code == 0);
  json rep = json::parse(r.out);
  for (const auto& run : rep["results"]["runs"]) CHECK(run["total_gap"].get<double>() <= 1e-8);
  CHECK(rep["results"]["sweep_fit"]["status"] == "floor");
}

TEST_CASE("collision sweep on the qutrit spec") {
  std::string csv = (scratch() / "sweep.csv").string();
  Result r = run({"collision", example_spec("collision-qutrit"), "--N", "4,8,16,32,64", "--xi-policy", "solve",
                  "--csv", csv});
  CHECK(r.code == 0);
  json rep = json::parse(r.out);
  double slope = rep["results"]["sweep_fit"]["slope"].get<double>();
  CHECK(slope >= -1.15);
  CHECK(slope <= -0.85);
  CHECK(rep["results"]["runs"].size() == 5);
  CHECK(rep["results"]["runs"][2]["N"] == 16);
  CHECK(slurp(csv).rfind("N,step,dt,per_step_gap,cumulative_gap,min_eig_prior\n", 0) == 0);
}

TEST_CASE("collision reports rank loss with exit 3") {
  ttr::SpecFile s;
  s.name = "rank-loss";
  s.dim_s = s.dim_e = 2;
  s.h_s = ttr::HermMatrix::symmetrize(0.5 * ttr::pauli_z());
  s.h_e = s.h_s;
  s.h_i = ttr::examples::exchange_interaction();
  s.g = 1.0;
  s.gamma_rate = 60.0;
  ttr::CMatrix pure = ttr::CMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  s.xi = ttr::HermMatrix(pure);
  s.gamma = ttr::maximally_mixed(2);
  Result r = run({"collision", write("rank.json", ttr::spec_to_json(s).dump()), "--T", "2", "--N", "8"});
  CHECK(r.code == 3);
  CHECK(r.err.find("step") != std::string::npos);
}

TEST_CASE("seeded runs are byte-identical") {
  std::string path = example_spec("collision-qutrit");
  std::string a = (scratch() / "a.csv").string(), b = (scratch() / "b.csv").string();
  Result ra = run({"collision", path, "--N", "8,16", "--dt-dist", "exponential", "--seed", "5", "--csv", a});
  Result rb = run({"collision", path, "--N", "8,16", "--dt-dist", "exponential", "--seed", "5", "--csv", b});
  CHECK(ra.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(slurp(a) == slurp(b));
  Result rc = run({"collision", path, "--N", "8,16", "--dt-dist", "exponential", "--seed", "6"});
  CHECK(rc.out != ra.out);
}

TEST_CASE("policy file from the environment") {
  std::string spec = example_spec("cx");
  std::string pol = write("policy.json", R"({"equality_tol": 1e-5})");
  ::setenv("TTR_POLICY_FILE", pol.c_str(), 1);
  Result r = run({"check-exact", spec});
  ::unsetenv("TTR_POLICY_FILE");
  CHECK(json::parse(r.out)["policy"]["equality_tol"].get<double>() == 1e-5);
  Result flag = run({"check-exact", spec, "--tol", "1e-7"});
  CHECK(json::parse(flag.out)["policy"]["equality_tol"].get<double>() == 1e-7);
  ::setenv("TTR_POLICY_FILE", write("bad_policy.json", "{").c_str(), 1);
  CHECK(run({"check-exact", spec}).code == 64);
  ::unsetenv("TTR_POLICY_FILE");
}

TEST_CASE("report written to a file matches stdout") {
  std::string spec = example_spec("cx");
  std::string out = (scratch() / "report.json").string();
  Result to_file = run({"check-exact", spec, "--out", out});
  Result to_stdout = run({"check-exact", spec});
  CHECK(to_file.out.empty());
  CHECK(slurp(out) == to_stdout.out);
}

TEST_CASE("example listing and summaries") {
  Result r = run({"example", "list"});
  CHECK(r.code == 0);
  for (const auto& n : ttr::examples::example_names()) CHECK(r.out.find(n + "\n") != std::string::npos);
  Result s = run({"example", "cx"});
  CHECK(s.code == 0);
  CHECK(json::parse(s.out).is_object());
}
