#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "scenario.hpp"

namespace fs = std::filesystem;
using finsler::lab::json;
using finsler::lab::parse_scenario_text;
using finsler::lab::ScenarioError;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Outcome lab(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" FINSLER_LAB_EXE "\" " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "finsler-lab-tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("malformed JSON reports the position") {
    try {
      parse_scenario_text("{\n  \"fixture\": x\n}");
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 0);
    }
  }
  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(parse_scenario_text(R"({"fixture": "klein-bottle", "operation": "reversibility"})"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(R"({"fixture": "euclidean", "operation": "teleport"})"), ScenarioError);
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov", "seed": 1, "params": {"triangls": 3}})"),
        ScenarioError);
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov", "seed": 1, "params": {"triangles": "3"}})"),
        ScenarioError);
  }
  SUBCASE("sampled operations need a seed") {
    CHECK_THROWS_AS(parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov"})"), ScenarioError);
    CHECK(parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov"})", 5).seed == 5u);
    CHECK(parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov", "seed": 3})", 9).seed == 9u);
  }
  SUBCASE("defaults are merged") {
    const auto s = parse_scenario_text(R"({"fixture": "euclidean", "operation": "toponogov", "seed": 1,
                                           "params": {"triangles": 4}})");
    CHECK(s.params["triangles"] == 4);
    CHECK(s.params.contains("tol"));
  }
  SUBCASE("every operation is in the schema") {
    const json schema = finsler::lab::scenario_schema();
    const std::string text = schema.dump();
    for (const auto& op : finsler::lab::operation_catalog()) CHECK(text.find("\"" + op.name + "\"") != std::string::npos);
  }
}

TEST_CASE("fixtures listing") {
  const Outcome o = lab("fixtures");
  CHECK(o.code == 0);
  CHECK(o.out.find("flat-cylinder") != std::string::npos);
  std::istringstream lines(o.out);
  std::string line;
  int keys = 0;
  bool cylinder = false;
  bool funk = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == ' ' || line.rfind("key", 0) == 0) continue;
    ++keys;
    if (line.rfind("flat-cylinder", 0) == 0)
      cylinder = line.find("reversible, Berwald, K≡0") != std::string::npos;
    if (line.rfind("funk-disk", 0) == 0) funk = line.find("non-reversible") != std::string::npos;
  }
  CHECK(keys == 7);
  CHECK(cylinder);
  CHECK(funk);
}

TEST_CASE("schema command emits JSON") {
  const Outcome o = lab("schema");
  CHECK(o.code == 0);
  const json schema = json::parse(o.out);
  CHECK(schema["$schema"] == "https://json-schema.org/draft/2020-12/schema");
}

TEST_CASE("exit codes") {
  const fs::path bad = write("bad.json", "{\n  \"fixture\": x\n}");
  const Outcome parse = lab("run \"" + bad.string() + "\" --out \"" + scratch("bad-out").string() + "\"");
  CHECK(parse.code == 1);
  const json err = json::parse(parse.out);
  CHECK(err["error"]["kind"] == "parse_error");
  CHECK(err["error"]["line"] == 2);

  const fs::path missing_seed = write("seedless.json", R"({"fixture": "euclidean", "operation": "toponogov"})");
  CHECK(lab("run \"" + missing_seed.string() + "\" --out \"" + scratch("seedless-out").string() + "\"").code == 1);
  CHECK(lab("run \"" + missing_seed.string() + "\" --seed 4 --out \"" + scratch("seeded-out").string() +
            "\" ")
            .code == 0);

  const fs::path hyp = write("funk.json", R"({"fixture": "funk-disk", "operation": "main-theorem-probe", "seed": 1})");
  const Outcome h = lab("run \"" + hyp.string() + "\" --out \"" + scratch("funk-out").string() + "\"");
  CHECK(h.code == 1);
  CHECK(h.out.find("hypothesis_error") != std::string::npos);

  const fs::path wrong = write("wrong.json", R"({"fixture": "euclidean", "operation": "volume_growth",
                                                 "params": {"expect_v_m": 0.5}, "seed": 1})");
  CHECK(lab("run \"" + wrong.string() + "\" --out \"" + scratch("wrong-out").string() + "\"").code == 2);
}

TEST_CASE("reports are deterministic") {
  const fs::path sc = write("det.json", R"({"name": "det", "fixture": "flat-cylinder", "operation": "volume_comparison",
                                            "params": {"radii": [0.5, 1.0, 1.5], "points": 4, "directions": 2,
                                                       "method": "monte_carlo", "samples": 20000}})");
  const fs::path a = scratch("det-a");
  const fs::path b = scratch("det-b");
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(lab("run \"" + sc.string() + "\" --seed 17 --out \"" + a.string() + "\"", "FINSLER_LAB_THREADS=1").code ==
          0);
  REQUIRE(lab("run \"" + sc.string() + "\" --seed 17 --out \"" + b.string() + "\"", "FINSLER_LAB_THREADS=4").code ==
          0);
  const json ra = json::parse(slurp(a / "report.json"));
  const json rb = json::parse(slurp(b / "report.json"));
  CHECK(ra["results"].dump() == rb["results"].dump());
  CHECK(ra["verdict"].dump() == rb["verdict"].dump());
  CHECK(ra["provenance"]["threads"] == 1);
  CHECK(slurp(a / "annulus_pairs.csv") == slurp(b / "annulus_pairs.csv"));

  const fs::path c = scratch("det-c");
  fs::remove_all(c);
  REQUIRE(lab("run \"" + sc.string() + "\" --seed 18 --out \"" + c.string() + "\"").code == 0);
  CHECK(json::parse(slurp(c / "report.json"))["results"].dump() != ra["results"].dump());
}

TEST_CASE("verdicts follow from the recorded numbers") {
  const char* scenarios[] = {
      R"({"fixture": "euclidean", "operation": "volume_growth", "params": {"expect_v_m": 0.5}, "seed": 1})",
      R"({"fixture": "flat-cylinder", "operation": "h_map", "seed": 2})",
      R"({"fixture": "euclidean", "operation": "toponogov", "seed": 3, "params": {"triangles": 5}})"};
  for (const char* text : scenarios) {
    CAPTURE(text);
    const json report = finsler::lab::run_scenario(parse_scenario_text(text)).report;
    const json& verdict = report["verdict"];
    REQUIRE(verdict["check"] == true);
    bool all = true;
    for (const json& c : verdict["criteria"]) {
      const double value = c["value"];
      const double threshold = c["threshold"];
      const std::string rel = c["relation"];
      const bool pass = rel == "<=" ? value <= threshold
                        : rel == ">=" ? value >= threshold
                        : rel == ">"  ? value > threshold
                                      : value == threshold;
      CHECK(c["pass"] == pass);
      all = all && pass;
    }
    CHECK(verdict["pass"] == all);
  }
}
