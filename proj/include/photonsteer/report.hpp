#pragma once

// Scenario execution and report emission.
//
// JSON reports are canonical: keys sorted, no whitespace, every floating
// point value written with "%.12e". The same scenario and seed therefore
// always produce the same bytes.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "photonsteer/protocol.hpp"
#include "photonsteer/scenario.hpp"
#include "photonsteer/sterngerlach.hpp"

namespace photonsteer {

inline constexpr const char* kReportSchema = "photonsteer-report/1";
inline constexpr const char* kCurveCsvHeader = "t,overlap_re,overlap_im,overlap_abs,s_max";

/// A module error raised while running a scenario, with the scenario context.
class ScenarioRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Report {
  nlohmann::json json;
  std::vector<CurvePoint> curve;  // sg-sweep only
  std::vector<EventLog> events;   // steering runs with events requested
};

struct RunOptions {
  bool keep_events = false;
};

/// Runs a scenario that already passed check_semantics.
Report run_scenario(const Scenario& s, const RunOptions& options = {});

std::uint64_t fnv1a64(std::string_view data);
/// "fnv1a64:" followed by 16 hex digits of the canonical scenario text.
std::string config_hash(const Scenario& s);

/// Canonical serialization; throws ScenarioRunError on non-finite numbers.
std::string canonical_json(const nlohmann::json& j);
std::string report_json(const Report& r);
/// Curve table for sg-sweep, otherwise a flattened "key,value" table.
std::string report_csv(const Report& r);
/// One event per line: {"data":{...},"kind":...,"t":...,"x":...}.
std::string events_jsonl(const Report& r);

/// Writes the report; throws IoError when the file cannot be written.
void emit_report(const Report& r, OutputFormat format, const std::string& path);

// JSON encodings shared by the report and the tests.
nlohmann::json to_json(cplx z);
nlohmann::json to_json(const LabeledState& s);
nlohmann::json to_json(const DensityOp& rho);
nlohmann::json to_json(const Assemblage& a);

}  // namespace photonsteer
