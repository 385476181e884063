#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/edifact.hpp"
#include "tos/ids.hpp"
#include "tos/types.hpp"

namespace tos {

// Vessel cell address from a BAPLIE/MOVINS stow location (ISO bay-row-tier,
// rendered as the 7 digits BBBRRTT).
struct CellAddress {
  int bay = 0;
  int row = 0;
  int tier = 0;

  std::string str() const;

  friend bool operator==(const CellAddress&, const CellAddress&) = default;
  friend auto operator<=>(const CellAddress&, const CellAddress&) = default;
};

CellAddress parse_cell(std::string_view digits);  // throws MalformedCell

struct StowEntry {
  ContainerId container;
  CellAddress position;
  std::string size_type;
  i64 weight_kg = 0;
  std::string pod;  // where this vessel drops the box
  std::string pol;
  std::optional<std::string> final_destination;  // onward port, if declared
  std::optional<ImoClass> imo_class;

  friend bool operator==(const StowEntry&, const StowEntry&) = default;
};

enum class MovinsKind { Load, Discharge, Restow };

const char* movins_kind_name(MovinsKind k);

struct MovinsInstruction {
  MovinsKind kind = MovinsKind::Load;
  std::optional<ContainerId> container;
  std::string size_type;                // set when a container is named
  std::optional<CellAddress> cell;      // slot spec, or restow target
  std::optional<int> bay_preference;    // attaches to size/type groups

  friend bool operator==(const MovinsInstruction&, const MovinsInstruction&) = default;
};

// The segment subset each message type understands, loaded from the
// versioned mapping file (message|tag|qualifier|field rows plus a VERSION
// row). Segments outside the mapping are skipped with a warning.
class EdiMapping {
 public:
  static EdiMapping load(const std::string& path);
  static EdiMapping from_file(const DelimitedFile& f);
  // The subset this build was written against.
  static EdiMapping builtin();

  // Field bound to (message, tag, qualifier); "" when unmapped.
  const std::string& field(const std::string& message, const std::string& tag,
                           const std::string& qualifier) const;
  int version() const { return version_; }

 private:
  int version_ = 0;
  std::map<std::string, std::string> map_;  // "MSG/TAG/QUAL" -> field
};

struct BaplieResult {
  std::vector<StowEntry> entries;
  std::vector<std::string> warnings;  // skipped segments, one line each
};

struct MovinsResult {
  std::vector<MovinsInstruction> instructions;
  std::vector<std::string> warnings;
};

BaplieResult parse_baplie(const EdifactDocument& doc, const EdiMapping& mapping);
MovinsResult parse_movins(const EdifactDocument& doc, const EdiMapping& mapping);

// Builders for the same bounded subset; parse(build(x)) == x.
EdifactDocument build_baplie(const std::vector<StowEntry>& entries, const std::string& sender,
                             const std::string& recipient, TimeMs when,
                             const std::string& control_ref);
EdifactDocument build_movins(const std::vector<MovinsInstruction>& instructions,
                             const std::string& sender, const std::string& recipient, TimeMs when,
                             const std::string& control_ref);

// ---- terminal reports -------------------------------------------------------

enum class MoveDirection { Discharge, Load };

struct ConfirmedMove {
  MoveDirection direction = MoveDirection::Discharge;
  ContainerId container;
  std::string size_type;
  CellAddress cell;
  TimeMs completed_at = 0;
};

struct GateEvent {
  bool gate_in = true;  // in = receipt, out = delivery
  ContainerId container;
  std::string size_type;
  TimeMs at = 0;
};

// COARRI: per-container confirmation of discharges/loads for a visit.
EdifactDocument emit_coarri(const VesselVisit& visit, const std::vector<ConfirmedMove>& moves,
                            const std::string& sender, const std::string& recipient,
                            const std::string& control_ref);
std::vector<ConfirmedMove> parse_coarri(const EdifactDocument& doc);

// CODECO: per-container gate-in/gate-out confirmations.
EdifactDocument emit_codeco(const std::vector<GateEvent>& events, const std::string& sender,
                            const std::string& recipient, TimeMs when,
                            const std::string& control_ref);
std::vector<GateEvent> parse_codeco(const EdifactDocument& doc);

}  // namespace tos
