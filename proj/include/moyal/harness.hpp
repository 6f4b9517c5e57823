#pragma once

// Verification scenarios and their reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moyal/catalog.hpp"
#include "moyal/domain.hpp"

namespace moyal {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { Json, Csv, Text };

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitConfigError = 2, kExitNonConvergence = 3 };

struct ScenarioConfig {
  std::string scenario;
  // coeffs: interval, product, flat-real, flat-complex
  std::string domain = "interval";
  std::optional<Complex> epsilon, a;
  std::vector<double> nus{5, 10, 20};
  int mmax = 3;
  int truncate = 2;
  std::map<std::string, double> tolerances;
  OutputFormat format = OutputFormat::Json;
  std::uint64_t seed = 20061;
  bool single_thread = false;
  std::string output_dir;
  // replaces the built-in catalog (fault-injection fixtures)
  std::optional<std::vector<DomainParams>> catalog;

  // defaults, with the output directory taken from MOYAL_OUTPUT_DIR
  static ScenarioConfig from_environment();
  static const std::map<std::string, double>& default_tolerances();
  double tol(const std::string& name) const;
  // "name=value"
  void set_tolerance(const std::string& assignment);
  void validate() const;
  nlohmann::json to_json() const;
};

enum class RecordStatus { Pass, Fail, ExpectedFail };

struct CheckRecord {
  std::string name;
  // key into data/anchors.json, or "plumbing"
  std::string anchor;
  // reference | derived | trivial | plumbing
  std::string tag;
  nlohmann::json computed, expected;
  std::optional<double> tolerance, error;
  // rel | abs | exact | le | ge | count
  std::string comparison;
  RecordStatus status = RecordStatus::Pass;
  std::string note;

  bool pass() const { return status != RecordStatus::Fail; }
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<CheckRecord> records;
  // preformatted block for text output (catalog table)
  std::string text_block;
  double seconds = 0;

  int failures() const;
  int expected_failures() const;
  bool passed() const { return failures() == 0; }
  int exit_code() const { return passed() ? kExitPass : kExitCheckFailure; }
  void append(const Report& group, const std::string& prefix);

  // deterministic: wall-clock time is left out of JSON and CSV
  nlohmann::json to_json() const;
  std::string to_csv() const;
  std::string to_text() const;
  std::string render(OutputFormat f) const;
};

Report cmd_example(int n, const ScenarioConfig& cfg);
Report cmd_coeffs(const ScenarioConfig& cfg);
Report cmd_catalog(const ScenarioConfig& cfg);
Report cmd_geometry(const ScenarioConfig& cfg);
Report cmd_duality(const ScenarioConfig& cfg);
Report cmd_complex_case(const ScenarioConfig& cfg);
Report cmd_verify_all(const ScenarioConfig& cfg);

DomainSpec coeffs_domain(const ScenarioConfig& cfg);
OutputFormat parse_format(const std::string& s);
std::string format_extension(OutputFormat f);

}  // namespace moyal
