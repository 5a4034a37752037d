#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eprb/cli.hpp"
#include "eprb/io.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = eprb::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("eprb_test_" + name);
}

}  // namespace

TEST_CASE("io number and vector parsing") {
  using namespace eprb::io;
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-1.0) == "-1");
  CHECK(parse_double("+0.25") == 0.25);
  CHECK_THROWS_AS(parse_double("1,5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_u64("-3"), std::invalid_argument);
  CHECK(parse_vector("0,0,1") == eprb::UnitVector3(0, 0, 1));
  CHECK_THROWS_AS(parse_vector("0,0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vector("1,1,1"), std::invalid_argument);
  CHECK(parse_riemann_point("inf").is_infinite());
  CHECK(parse_riemann_point("0.5,-2") == eprb::RiemannPoint(0.5, -2));
  CHECK(to_json(eprb::RiemannPoint::infinity()) == "inf");
  CHECK(riemann_point_from_json(json{{"re", 1.0}, {"im", 2.0}}) == eprb::RiemannPoint(1, 2));
  const auto s = sampler_from_json(json::parse(R"({"sampler": {"kind": "uniform_cube", "dim": 4, "seed": 9}})"));
  CHECK(s.kind() == eprb::SamplerKind::UniformCube);
  CHECK(s.dim() == 4);
  CHECK(s.seed() == 9);
  CHECK_THROWS_AS(sampler_from_json(json{{"kind", "gaussian"}}), std::invalid_argument);
  const auto spec = model_spec_from_json(json::parse(R"({"model": "series_random", "params": {"degree": 2, "coeff_seed": 5}})"));
  CHECK(spec.degree == 2);
  CHECK(spec.coeff_seed == 5);
  CHECK_THROWS_AS(model_spec_from_json(json{{"model", "series_random"}, {"params", {{"degree", 0}}}}),
                  std::invalid_argument);
}

TEST_CASE("correlate quantum at equal settings") {
  const Result r = run({"correlate", "--model", "quantum", "--a", "0,0,1", "--b", "0,0,1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["value"] == -1.0);
  CHECK(j["exact"] == true);
  CHECK(j["stderr"] == 0.0);
}

TEST_CASE("unknown model is a validation error") {
  const Result r = run({"correlate", "--model", "nonsense", "--a", "0,0,1", "--b", "0,0,1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("nonsense") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("argument errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"correlate", "--model", "quantum", "--a", "1,1,1", "--b", "0,0,1"}).code == 1);
  CHECK(run({"correlate", "--model", "local_sign", "--a", "0,0,1", "--b", "0,0,1", "--n", "1"}).code == 1);
  CHECK(run({"correlate", "--model", "local_sign", "--a", "0,0,1", "--b", "0,0,1", "--workers", "0"}).code == 1);
  CHECK(run({"sweep", "--model", "quantum", "--steps", "1"}).code == 1);
  CHECK(run({"chsh", "--model", "quantum", "--maximize", "--budget", "10"}).code == 1);
  CHECK(run({"chsh", "--model", "quantum", "--quad", "0,0,1|1,0,0"}).code == 1);
  CHECK(run({"analyticity", "--radius", "20"}).code == 1);
  CHECK(run({"models", "--format", "xml"}).code == 1);
  CHECK(run({"correlate", "--model", "linear", "--sampler", "uniform_cube", "--a", "0,0,1", "--b", "0,0,1"}).code == 1);
  CHECK(run({"correlate", "--model", "series_random", "--param", "degree=x", "--a", "0,0,1", "--b", "0,0,1"}).code == 1);
}

TEST_CASE("probabilities outside [0, 1] exit with 2") {
  const Result r = run({"correlate", "--model", "linear", "--param", "gain=2.6", "--a", "0,0,1", "--b", "0,0,1",
                        "--n", "1000"});
  CHECK(r.code == 2);
  CHECK(r.err.find("outside [0, 1]") != std::string::npos);
}

TEST_CASE("help exits with 0") {
  const Result r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("correlate") != std::string::npos);
}

TEST_CASE("sweep CSV header and rows") {
  const Result r = run({"sweep", "--model", "local_sign", "--steps", "5", "--n", "2000", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta_rad,value,stderr,n,model,exact");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find("local_sign") != std::string::npos);
  }
  CHECK(rows == 5);
}

TEST_CASE("sweep JSON mirrors the CSV fields") {
  const Result r = run({"sweep", "--model", "quantum", "--steps", "3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["points"].size() == 3);
  for (const char* k : {"theta_rad", "value", "stderr", "n", "model", "exact"}) CHECK(j["points"][0].contains(k));
  CHECK(j["points"][0]["value"] == -1.0);
  CHECK(j["points"][2]["value"] == 1.0);
}

TEST_CASE("chsh maximize on the quantum model") {
  const Result r = run({"chsh", "--model", "quantum", "--maximize", "--budget", "1000000"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["s_value"].get<double>() - 2.8284271247461903) < 1e-6);
  for (const char* k : {"s_value", "term1", "term2", "correlations", "bound", "violated", "quad", "evaluations"})
    CHECK(j.contains(k));
  CHECK(j["bound"] == 2.0);
}

TEST_CASE("chsh on an explicit quad") {
  const Result r = run({"chsh", "--model", "constant", "--quad", "0,0,1|1,0,0|0,1,0|0,0,-1", "--n", "100"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["s_value"] == 2.0);
  CHECK(j["violated"] == false);
}

TEST_CASE("bell and analyticity reports") {
  const Result b = run({"bell", "--model", "quantum", "--a", "0,0,1", "--b", "0.8660254037844386,0,0.5",
                        "--c", "0.8660254037844387,0,-0.5"});
  REQUIRE(b.code == 0);
  CHECK(std::abs(json::parse(b.out)["excess"].get<double>() - 0.5) < 1e-12);

  const Result a = run({"analyticity", "--target", "pq", "--w", "inf"});
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  for (const char* k : {"function", "w", "h", "grid", "max_residual", "verdict", "points"}) CHECK(j.contains(k));
  CHECK(j["verdict"] == "non_analytic");
  CHECK(j["w"] == "inf");
  CHECK(j["max_residual"].get<double>() >= 0.4);

  const Result z2 = run({"analyticity", "--target", "z2", "--radius", "2"});
  REQUIRE(z2.code == 0);
  CHECK(json::parse(z2.out)["verdict"] == "analytic_within");
}

TEST_CASE("models listing") {
  const Result r = run({"models"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["models"].size() == eprb::zoo().size());
  for (const auto& m : j["models"]) CHECK(m.contains("locality_class"));
}

TEST_CASE("series output carries the raw-series label and the quantum contrast") {
  const Result r = run({"correlate", "--model", "series_random", "--param", "coeff_seed=3", "--a", "0,0,1",
                        "--b", "1,0,0", "--n", "1000"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["raw_series"] == true);
  CHECK(j["value"].get<double>() <= 0.0);
  CHECK(j["quantum_contrast"]["contradicts_quantum"] == true);
}

TEST_CASE("output is independent of the worker count") {
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"correlate", "--model", "linear", "--a", "0,0,1", "--b", "0.6,0,0.8", "--n", "30000", "--seed", "4"},
           {"sweep", "--model", "local_sign", "--steps", "7", "--n", "20000"},
           {"chsh", "--model", "series_random", "--param", "lambda_dependent=true", "--quad",
            "0,0,1|1,0,0|0,1,0|0,0,-1", "--n", "20000"}}) {
    auto one = cmd, many = cmd;
    one.insert(one.end(), {"--workers", "1"});
    many.insert(many.end(), {"--workers", "5"});
    const Result a = run(one), b = run(many);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("config file merges under explicit flags") {
  const auto path = temp_file("config.json");
  {
    std::ofstream f(path);
    f << R"({"model": "local_sign", "a": [0, 0, 1], "b": "0,0,-1", "n": 500, "seed": 2})";
  }
  const Result from_file = run({"correlate", "--config", path.string()});
  REQUIRE(from_file.code == 0);
  const json j = json::parse(from_file.out);
  CHECK(j["value"] == 1.0);
  CHECK(j["n"] == 500);
  CHECK(j["model"] == "local_sign");

  const Result flagged = run({"correlate", "--config", path.string(), "--model", "quantum"});
  REQUIRE(flagged.code == 0);
  CHECK(json::parse(flagged.out)["model"] == "quantum");
  CHECK(run({"correlate", "--config", "/nonexistent/x.json"}).code == 1);
  std::filesystem::remove(path);
}

TEST_CASE("output file") {
  const auto path = temp_file("out.json");
  const Result r = run({"models", "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(json::parse(in)["command"] == "models");
  std::filesystem::remove(path);
}
