#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "finsler/errors.hpp"
#include "finsler/parallel.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using finsler::lab::json;

namespace {

void report_error(const std::string& kind, const std::string& message, const std::string& file, int line = 0,
                  int column = 0) {
  json err = {{"error", {{"kind", kind}, {"message", message}, {"file", file}}}};
  if (line > 0) {
    err["error"]["line"] = line;
    err["error"]["column"] = column;
  }
  std::cerr << err.dump() << '\n';
}

int run_one(const fs::path& file, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  std::ifstream in(file);
  if (!in) {
    report_error("io_error", "cannot open scenario file", file.string());
    return 1;
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    const auto scenario = finsler::lab::parse_scenario_text(text.str(), seed);
    const auto run = finsler::lab::run_scenario(scenario);
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "report.json") << run.report.dump(2) << '\n';
    for (const auto& a : run.artifacts) std::ofstream(out_dir / a.file_name) << a.content;
    const auto& verdict = run.report["verdict"];
    std::cout << file.filename().string() << ": "
              << (!verdict["check"].get<bool>() ? "done" : verdict["pass"].get<bool>() ? "pass" : "FAIL") << " -> "
              << (out_dir / "report.json").string() << '\n';
    return static_cast<int>(run.status);
  } catch (const finsler::lab::ScenarioError& e) {
    report_error("parse_error", e.what(), file.string(), e.line(), e.column());
  } catch (const finsler::HypothesisError& e) {
    report_error("hypothesis_error", e.what(), file.string());
  } catch (const finsler::DomainError& e) {
    report_error("domain_error", e.what(), file.string());
  } catch (const finsler::Error& e) {
    report_error("operation_error", e.what(), file.string());
  } catch (const std::exception& e) {
    report_error("internal_error", e.what(), file.string());
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("FINSLER_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) finsler::set_thread_limit(n);
  }

  CLI::App app{"finsler-lab: numerical Finsler comparison geometry"};
  app.require_subcommand(1);

  std::string path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  auto* run = app.add_subcommand("run", "run a scenario file, or every *.json in a directory");
  run->add_option("scenario", path, "scenario file or directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out, "output directory")->capture_default_str();

  app.add_subcommand("fixtures", "list the fixture registry");
  app.add_subcommand("schema", "print the scenario JSON schema");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("fixtures")) {
    std::cout << finsler::lab::fixture_table();
    return 0;
  }
  if (app.got_subcommand("schema")) {
    std::cout << finsler::lab::scenario_schema().dump(2) << '\n';
    return 0;
  }

  const fs::path target(path);
  if (!fs::is_directory(target)) return run_one(target, seed, out);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(target))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  int worst = 0;
  for (const auto& f : files) {
    const int code = run_one(f, seed, fs::path(out) / f.stem());
    if (code == 1 || (code == 2 && worst == 0)) worst = code;
  }
  return worst;
}
