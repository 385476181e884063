#include "tos/scenario.hpp"

#include <filesystem>

namespace tos {

const char* scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::VesselArrival: return "VESSEL_ARRIVAL";
    case ScenarioKind::TruckArrival: return "TRUCK_ARRIVAL";
    case ScenarioKind::OrderIntake: return "ORDER";
    case ScenarioKind::HoldCommand: return "HOLD";
    case ScenarioKind::LockCommand: return "LOCK";
    case ScenarioKind::ReeferReading: return "REEFER";
    case ScenarioKind::Advance: return "ADVANCE";
    case ScenarioKind::Accident: return "ACCIDENT";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view s) {
  if (s == "VESSEL_ARRIVAL") return ScenarioKind::VesselArrival;
  if (s == "TRUCK_ARRIVAL") return ScenarioKind::TruckArrival;
  if (s == "ORDER") return ScenarioKind::OrderIntake;
  if (s == "HOLD") return ScenarioKind::HoldCommand;
  if (s == "LOCK") return ScenarioKind::LockCommand;
  if (s == "REEFER") return ScenarioKind::ReeferReading;
  if (s == "ADVANCE") return ScenarioKind::Advance;
  if (s == "ACCIDENT") return ScenarioKind::Accident;
  fail(Err::ParseError, "unknown scenario event kind '" + std::string(s) + "'");
}

const std::string& ScenarioEvent::get(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end())
    fail(Err::ParseError, "scenario line " + std::to_string(line_no) + ": missing key '" + key +
                              "' on " + scenario_kind_name(kind));
  return it->second;
}

std::string ScenarioEvent::get_or(const std::string& key, const std::string& dflt) const {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

Scenario load_scenario(const std::string& path) {
  namespace fs = std::filesystem;
  std::string base = fs::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_scenario(read_text_file(path), base, path);
}

Scenario parse_scenario(std::string_view text, const std::string& base_dir,
                        const std::string& origin, bool check_files) {
  namespace fs = std::filesystem;
  Scenario s;
  s.base_dir = base_dir;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto tokens = split(line, ' ');
    std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
    if (tokens.size() < 2)
      fail(Err::ParseError, origin + ":" + std::to_string(line_no) + ": want '<time> <KIND> ...'");
    ScenarioEvent e;
    try {
      e.at = parse_iso8601(tokens[0]);
      e.kind = parse_scenario_kind(tokens[1]);
    } catch (const TosError& err) {
      fail(Err::ParseError, origin + ":" + std::to_string(line_no) + ": " + err.what());
    }
    e.line_no = line_no;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      auto eq = tokens[i].find('=');
      if (eq == std::string::npos || eq == 0)
        fail(Err::ParseError,
             origin + ":" + std::to_string(line_no) + ": bad key=value '" + tokens[i] + "'");
      e.kv[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
    }
    if (!s.events.empty() && e.at < s.events.back().at)
      fail(Err::UnsortedEvents, origin + ":" + std::to_string(line_no) +
                                    ": timestamps must be non-decreasing");
    if (check_files &&
        (e.kind == ScenarioKind::VesselArrival || e.kind == ScenarioKind::OrderIntake)) {
      for (const char* key : {"baplie", "movins", "edi"}) {
        auto it = e.kv.find(key);
        if (it == e.kv.end() || it->second.empty()) continue;
        fs::path p = fs::path(base_dir) / it->second;
        if (!fs::exists(p))
          fail(Err::MissingReferencedFile,
               origin + ":" + std::to_string(line_no) + ": " + p.string());
      }
    }
    s.events.push_back(std::move(e));
  }
  return s;
}

std::string scenario_event_to_line(const ScenarioEvent& e) {
  std::string out = format_iso8601(e.at);
  out += ' ';
  out += scenario_kind_name(e.kind);
  for (const auto& [k, v] : e.kv) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

}  // namespace tos
