#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace finsler::lab {

using nlohmann::json;

inline constexpr const char* kReportSchema = "finsler-lab/report/1";

/// Malformed or inconsistent scenario. `line`/`column` are set for JSON syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Scenario {
  std::string name;
  std::string fixture;
  json fixture_params = json::object();
  std::string operation;
  json params = json::object();  ///< merged with the operation defaults
  std::optional<std::uint64_t> seed;
  bool write_csv = true;
  json source;  ///< the scenario as written
};

/// Parses and validates a scenario document. Unknown fixtures, operations and
/// operation parameters are rejected here, as is a missing seed for sampled
/// operations (after applying `seed_override`).
Scenario parse_scenario(const json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario parse_scenario_text(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);

struct Artifact {
  std::string file_name;
  std::string content;
};

enum class Status { kPass = 0, kError = 1, kCheckFailed = 2 };

struct RunReport {
  json report;  ///< schema_version, scenario, results, verdict, provenance
  std::vector<Artifact> artifacts;
  Status status = Status::kPass;
};

/// Runs a parsed scenario. Library errors propagate as exceptions.
RunReport run_scenario(const Scenario& scenario);

/// The `results` member serialized canonically; identical for identical
/// scenario and seed.
std::string results_digest(const RunReport& run);

struct OperationInfo {
  std::string name;
  std::string summary;
  bool sampled = false;
  bool check = false;
  json defaults;
};

const std::vector<OperationInfo>& operation_catalog();

/// JSON Schema of scenario files, including every operation's parameters.
json scenario_schema();

/// Text table of the fixture registry.
std::string fixture_table();

}  // namespace finsler::lab
