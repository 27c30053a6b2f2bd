#include <fstream>
#include <sstream>

#include "doctest.h"
#include "growthwave/cli.hpp"
#include "growthwave/error.hpp"

using namespace growthwave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("growthwave_test_" + name);
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

cli::RunResult run(const std::string& cmd, json raw, const fs::path& out, std::ostream& diag) {
  raw["out"] = out.string();
  return cli::run(cmd, cli::parse_config(raw), diag);
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = cli::parse_config(json::parse(R"({"weight": {"family": "logpow", "b": 2}, "J": 9, "seed": 5})"));
  CHECK(c.weight.family() == WeightFamily::LogPower);
  CHECK(c.weight.parameter() == 2.0);
  CHECK(c.J == 9);
  CHECK(c.seed == 5);
  CHECK(c.threads >= 1);
  CHECK_THROWS_WITH_AS(cli::parse_config(json::parse(R"({"J": 7})")), doctest::Contains("'J'"), ValidationError);
  CHECK_THROWS_WITH_AS(cli::parse_config(json::parse(R"({"J": 21})")), doctest::Contains("[8, 20]"), ValidationError);
  CHECK_THROWS_WITH_AS(cli::parse_config(json::parse(R"({"Jx": 10})")), doctest::Contains("unknown config field"),
                       ValidationError);
  CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"weight": {"family": "exp"}})")), ValidationError);
  CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"weight": {"family": "power", "a": 0}})")), ValidationError);
  CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"seed": -1})")), ValidationError);
  CHECK_THROWS_AS(cli::parse_config(json::parse("[1, 2]")), ValidationError);
}

TEST_CASE("csv formatting") {
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(cli::format_number(-2.5e-300) == "-2.5e-300");
  auto dir = scratch("csv");
  fs::create_directories(dir);
  cli::CsvWriter w(dir / "t.csv", {"name", "value"});
  w.cell(std::string("a,b")).cell(1.5);
  w.end_row();
  w.cell(std::string("say \"hi\"")).cell(7LL);
  w.end_row();
  w.close();
  CHECK(read_text(dir / "t.csv") == "name,value\r\n\"a,b\",1.5\r\n\"say \"\"hi\"\"\",7\r\n");
}

TEST_CASE("plan command") {
  auto dir = scratch("plan");
  std::ostringstream diag;
  auto r = run("plan", json::parse(R"({"weight": {"family": "power", "a": 1}, "A": 2, "J": 10, "l_max": 5})"), dir, diag);
  REQUIRE(r.exit_code == 0);
  CHECK(diag.str().empty());
  auto doc = read_json(dir / "plan.json");
  CHECK(doc["schema_version"] == cli::kSchemaVersion);
  CHECK(doc["config"]["A"] == 2);
  CHECK(doc["results"]["alphas"] == json::parse("[0, 1, 2, 3, 4, 5]"));
  CHECK(doc["results"]["m"] == 2);
  CHECK(doc.contains("timestamp"));
  auto csv = read_text(dir / "plan.csv");
  CHECK(csv.rfind("l,alpha,v\r\n0,0,1\r\n1,1,2\r\n", 0) == 0);
}

TEST_CASE("characterize command on the constant boundary") {
  auto dir = scratch("char");
  std::ostringstream diag;
  auto r = run("characterize", json::parse(R"({"weight": {"family": "power", "a": 1}, "J": 10, "order": 4,
                                                "boundary": {"kind": "constant", "value": 1}})"),
               dir, diag);
  REQUIRE(r.exit_code == 0);
  auto res = read_json(dir / "characterize.json")["results"];
  CHECK(res["K_direct"].get<double>() == doctest::Approx(1.0));
  CHECK(res["equivalence_ratio"].get<double>() == doctest::Approx(1.0));
  CHECK(res["pass"] == true);
  CHECK(read_text(dir / "m_profile.csv").rfind("N,M_N,v_2^-N,ratio\r\n", 0) == 0);
}

TEST_CASE("determinism modulo the timestamp") {
  const auto cfg = json::parse(R"({"weight": {"family": "logpow", "b": 1}, "A": 4, "J": 9, "l_max": 4, "order": 4,
                                   "trials": 6, "seed": 11, "boundary": {"kind": "random"}})");
  for (const std::string cmd : {"synth", "osc", "seq", "pairing"}) {
    CAPTURE(cmd);
    auto d1 = scratch(cmd + "_1"), d2 = scratch(cmd + "_2");
    std::ostringstream diag;
    auto r1 = run(cmd, cfg, d1, diag);
    auto r2 = run(cmd, cfg, d2, diag);
    CHECK(diag.str().empty());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.artifacts.size() == r2.artifacts.size());
    for (std::size_t i = 0; i < r1.artifacts.size(); ++i) {
      const auto& p1 = r1.artifacts[i];
      const auto& p2 = r2.artifacts[i];
      CHECK(p1.filename() == p2.filename());
      if (p1.extension() == ".json") {
        auto j1 = read_json(p1), j2 = read_json(p2);
        j1.erase("timestamp");
        j2.erase("timestamp");
        j1["config"].erase("out");
        j2["config"].erase("out");
        CHECK(j1.dump() == j2.dump());
      } else {
        CHECK(read_text(p1) == read_text(p2));
      }
    }
  }
}

TEST_CASE("exit codes and diagnostics") {
  auto dir = scratch("errors");
  std::ostringstream diag;
  auto bad = run("nonsense", json::object(), dir, diag);
  CHECK(bad.exit_code == 1);
  auto line = diag.str();
  REQUIRE(!line.empty());
  CHECK(line.find('\n') == line.size() - 1);
  auto d = json::parse(line);
  CHECK(d["exit_code"] == 1);
  CHECK(d["error"] == "validation");

  // converse check refusal surfaces as a validation failure: counterexample on a power-type weight
  std::ostringstream diag2;
  auto ce = run("synth", json::parse(R"({"weight": {"family": "power", "a": 1}, "J": 10, "options": {"mode": "counterexample"}})"),
                dir, diag2);
  CHECK(ce.exit_code == 1);
  CHECK(diag2.str().find("power-type") != std::string::npos);

  std::ostringstream diag3;
  auto missing = cli::run_from_file("plan", dir / "missing.json", std::nullopt, dir, diag3);
  CHECK(missing.exit_code == 1);

  // unwritable output location: a regular file in place of the directory
  std::ofstream(dir / "file") << "x";
  std::ostringstream diag4;
  auto unwritable = run("plan", json::object(), dir / "file", diag4);
  CHECK(unwritable.exit_code == 1);
}

TEST_CASE("selftest command") {
  auto dir = scratch("selftest");
  std::ostringstream diag;
  auto r = run("selftest", json::parse(R"({"J": 10})"), dir, diag);
  CHECK(r.exit_code == 0);
  auto res = read_json(dir / "selftest.json")["results"];
  CHECK(res["all_pass"] == true);
  CHECK(res["checks"].size() >= 8);
}
