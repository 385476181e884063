#pragma once

#include <map>
#include <string>
#include <vector>

#include "tos/common.hpp"

namespace tos {

enum class ScenarioKind {
  VesselArrival,
  TruckArrival,
  OrderIntake,
  HoldCommand,
  LockCommand,
  ReeferReading,
  Advance,
  Accident,
};

const char* scenario_kind_name(ScenarioKind k);
ScenarioKind parse_scenario_kind(std::string_view s);

// One line of the scenario file:
//   <ISO-8601 UTC> <KIND> key=value key=value ...
// Values must not contain spaces; lists use commas.
struct ScenarioEvent {
  TimeMs at = 0;
  ScenarioKind kind = ScenarioKind::OrderIntake;
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  bool has(const std::string& key) const { return kv.count(key) > 0; }
};

struct Scenario {
  std::vector<ScenarioEvent> events;
  std::string base_dir;  // referenced files resolve against this
};

// Parses and validates: ascending timestamps, known kinds, referenced
// BAPLIE/MOVINS files present.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::string_view text, const std::string& base_dir,
                        const std::string& origin, bool check_files = true);

std::string scenario_event_to_line(const ScenarioEvent& e);

}  // namespace tos
