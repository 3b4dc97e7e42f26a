#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "degreelab/cli.hpp"

using namespace degreelab;
using namespace degreelab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("degreelab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(const std::string& command, const Json& config, const fs::path& dir, std::vector<std::string> extra = {}) {
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << config.dump();
  std::vector<std::string> args{"degreelab", command, "--config", cfg.string(), "--out", (dir / "out").string()};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

Json report_of(const fs::path& dir) { return Json::parse(slurp(dir / "out" / "report.json")); }

const Json kTorus = Json::parse(R"({"model": {"family": "torus_endo", "params": {"a": [[0, 1], [2, 2]]}},
                                   "resolution": [5, 5], "lyapunov_steps": 2000})");
const Json kSkew = Json::parse(R"({"model": {"family": "polynomial_skew", "params": {"q": [[0, 0, 1], [1]]}},
                                  "resolution": [5, 5], "residual_samples": 20})");

}  // namespace

TEST_CASE("strict schema names the offending field") {
  auto field_of = [](const char* text) {
    try {
      parse_config(Json::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  CHECK(field_of(R"({"model": {"family": "secant", "params": {"p": [0, 1, "x"]}}})") == "model.params.p[2]");
  CHECK(field_of(R"({"model": {"family": "secant", "params": {"p": [-1, 0, 1]}}, "bogus": 1})") == "bogus");
  CHECK(field_of(R"({"model": {"family": "nope", "params": {}}})") == "model.family");
  CHECK(field_of(R"({"model": {"family": "torus_endo", "params": {"a": [[1, 0], [0]]}}})").rfind("model.params.a", 0) == 0);
  CHECK(field_of(R"({"model": {"family": "secant", "params": {"p": [-1, 0, 1]}}, "tolerances": {"green": -1}})") ==
        "tolerances.green");
  CHECK(field_of(R"({"model": {"family": "secant", "params": {"p": [-1, 0, 1]}}})") == "<accepted>");
}

TEST_CASE("defaults are filled in") {
  const RunConfig c = parse_config(Json::parse(R"({"model": {"family": "secant", "params": {"p": [-1, 0, 1]}}})"));
  CHECK(c.seed == 1);
  CHECK(c.horizon == 50);
  CHECK(c.tolerances.membership == 1e-8);
  CHECK(c.nx == 65);
}

TEST_CASE("json writer sorts keys and keeps full precision") {
  Json j;
  j["b"] = 0.1;
  j["a"] = std::nan("");
  j["c"] = Json::array({1, 2.5});
  const std::string s = dump_json(j);
  CHECK(s.find("\"a\": null") < s.find("\"b\": 0.10000000000000001"));
  CHECK(s.back() == '\n');
  CHECK(model_hash(j) == model_hash(Json::parse(j.dump())));
}

TEST_CASE("degrees on the quartic secant map") {
  const auto dir = scratch("degrees");
  const Json cfg = Json::parse(R"({"model": {"family": "secant", "params": {"p": [0, -1, 0, 0, 1]}}, "mc_samples": 200})");
  CHECK(invoke("degrees", cfg, dir) == 0);
  const Json r = report_of(dir);
  CHECK(r["sections"]["degrees"]["lambda2"]["value"] == 3);
  const double l1 = r["sections"]["degrees"]["lambda1"]["value"];
  CHECK(std::abs(l1 - (3 + std::sqrt(21.0)) / 2) < 1e-9);
  CHECK(r["model_hash"].is_string());
  CHECK(r["library"]["version"] == kLibraryVersion);
}

TEST_CASE("ergodic command reports a passing sum rule") {
  const auto dir = scratch("ergodic");
  CHECK(invoke("ergodic", kTorus, dir) == 0);
  const Json r = report_of(dir);
  CHECK(r["sections"]["ergodic"]["sum_check"]["pass"] == true);
  CHECK(r["sections"]["ergodic"]["haar"]["bijective"] == true);
}

TEST_CASE("exit codes") {
  SUBCASE("malformed coefficients") {
    const auto dir = scratch("malformed");
    const Json cfg = Json::parse(R"({"model": {"family": "polynomial_skew", "params": {"q": [[0, 0, {}]]}}})");
    CHECK(invoke("degrees", cfg, dir) == 2);
    CHECK(report_of(dir)["failure"]["field"] == "model.params.q[0][2]");
  }
  SUBCASE("repeated root is rejected by validate") {
    const auto dir = scratch("validate_bad");
    const Json cfg = Json::parse(R"({"model": {"family": "secant", "params": {"p": [0, 0, -1, 1]}}})");
    CHECK(invoke("validate", cfg, dir) == 2);
    const std::string msg = report_of(dir)["failure"]["message"];
    CHECK(msg.find("repeated root") != std::string::npos);
  }
  SUBCASE("nonzero x^d coefficient is rejected") {
    const auto dir = scratch("validate_skew");
    const Json cfg = Json::parse(R"({"model": {"family": "polynomial_skew", "params": {"q": [[0, 0, 1], [0], [1]]}}})");
    CHECK(invoke("validate", cfg, dir) == 2);
  }
  SUBCASE("valid torus validates") {
    const auto dir = scratch("validate_ok");
    CHECK(invoke("validate", kTorus, dir) == 0);
    CHECK(report_of(dir)["status"] == "ok");
  }
  SUBCASE("mismatched command") {
    const auto dir = scratch("mismatch");
    Json cfg = kTorus;
    cfg["command"] = "degrees";
    CHECK(invoke("ergodic", cfg, dir) == 2);
  }
  SUBCASE("green refuses an unstable map") {
    const auto dir = scratch("collision");
    const Json cfg = Json::parse(R"({"model": {"family": "cremona_composite", "params": {"factors": [{"kind": "involution"}]}}})");
    CHECK(invoke("green", cfg, dir) == 3);
    const Json r = report_of(dir);
    CHECK(r["status"] == "failure");
    CHECK(r["partial"] == true);
    CHECK(r["failure"]["kind"] == "NumericalFailure");
  }
}

TEST_CASE("full reports") {
  SUBCASE("torus sections") {
    const RunResult r = report_all(parse_config(kTorus));
    CHECK(r.exit_code == 0);
    const Json& s = r.report["sections"];
    for (const char* name : {"spectral", "pushpull", "ergodic", "contraction"}) CHECK(s.contains(name));
    CHECK(s["pushpull"]["defect_zero"] == true);
    CHECK(s["contraction"]["zero_case"] == true);
  }
  SUBCASE("skew sections") {
    const RunResult r = report_all(parse_config(kSkew));
    CHECK(r.exit_code == 0);
    CHECK(r.report["sections"]["stability"]["verdict"] == "NoObstructionUpTo(50)");
    CHECK(r.report["sections"]["green"]["functional_equation"]["pass"] == true);
    CHECK_FALSE(r.report["sections"].contains("contraction"));
    CHECK(r.report["not_applicable"].contains("contraction"));
  }
  SUBCASE("identity reports the spectral hypothesis violation") {
    const Json cfg = Json::parse(R"({"model": {"family": "torus_endo", "params": {"a": [[1, 0], [0, 1]]}},
                                     "resolution": [3, 3], "lyapunov_steps": 200})");
    const RunResult r = report_all(parse_config(cfg));
    CHECK(r.exit_code == 0);
    CHECK(r.report["sections"]["spectral"]["verdict"] == "HypothesisViolation");
  }
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  CHECK(invoke("report", kSkew, a) == 0);
  CHECK(invoke("report", kSkew, b) == 0);
  CHECK(slurp(a / "out" / "report.json") == slurp(b / "out" / "report.json"));
  CHECK(slurp(a / "out" / "grid.csv") == slurp(b / "out" / "grid.csv"));
  CHECK(fs::exists(a / "out" / "grid.meta.json"));
  CHECK(invoke("report", kSkew, b, {"--seed", "5"}) == 0);
  CHECK(report_of(b)["seed"] == 5);
}
