#include "tos/edifact_messages.hpp"

namespace tos {

std::string CellAddress::str() const {
  return pad_num(bay, 3) + pad_num(row, 2) + pad_num(tier, 2);
}

CellAddress parse_cell(std::string_view digits) {
  if (digits.size() != 7)
    fail(Err::MalformedCell, "stow cell '" + std::string(digits) + "' must be 7 digits BBBRRTT");
  for (char c : digits)
    if (c < '0' || c > '9')
      fail(Err::MalformedCell, "stow cell '" + std::string(digits) + "' must be numeric");
  CellAddress cell;
  cell.bay = static_cast<int>(parse_int(digits.substr(0, 3), "bay"));
  cell.row = static_cast<int>(parse_int(digits.substr(3, 2), "row"));
  cell.tier = static_cast<int>(parse_int(digits.substr(5, 2), "tier"));
  if (cell.bay < 1 || cell.row < 1 || cell.tier < 1)
    fail(Err::MalformedCell, "stow cell '" + std::string(digits) + "' has zero index");
  return cell;
}

const char* movins_kind_name(MovinsKind k) {
  switch (k) {
    case MovinsKind::Load: return "Load";
    case MovinsKind::Discharge: return "Discharge";
    case MovinsKind::Restow: return "Restow";
  }
  return "?";
}

// ---- mapping ----------------------------------------------------------------

EdiMapping EdiMapping::load(const std::string& path) {
  return from_file(DelimitedFile::read_file(path));
}

EdiMapping EdiMapping::from_file(const DelimitedFile& f) {
  EdiMapping m;
  auto c_msg = f.col("message"), c_tag = f.col("tag"), c_qual = f.col("qualifier"),
       c_field = f.col("field");
  for (const auto& r : f.rows()) {
    if (r[c_msg] == "VERSION") {
      m.version_ = static_cast<int>(parse_int(r[c_tag], "mapping version"));
      continue;
    }
    m.map_[r[c_msg] + "/" + r[c_tag] + "/" + r[c_qual]] = r[c_field];
  }
  if (m.version_ == 0) fail(Err::ParseError, f.origin() + ": mapping file missing VERSION row");
  return m;
}

EdiMapping EdiMapping::builtin() {
  static const char* text =
      "message|tag|qualifier|field\n"
      "VERSION|1||\n"
      "BAPLIE|LOC|147|cell\n"
      "BAPLIE|EQD|CN|container\n"
      "BAPLIE|MEA|WT|weight_kg\n"
      "BAPLIE|LOC|11|pod\n"
      "BAPLIE|LOC|9|pol\n"
      "BAPLIE|LOC|8|final_destination\n"
      "BAPLIE|DGS|IMO|imo_class\n"
      "MOVINS|HAN|LOA|load\n"
      "MOVINS|HAN|DIS|discharge\n"
      "MOVINS|HAN|RES|restow\n"
      "MOVINS|EQD|CN|container\n"
      "MOVINS|LOC|147|cell\n"
      "MOVINS|RFF|BP|bay_preference\n"
      "PRESTOW|HAN|LOA|load\n"
      "PRESTOW|HAN|DIS|discharge\n"
      "PRESTOW|HAN|RES|restow\n"
      "PRESTOW|EQD|CN|container\n"
      "PRESTOW|LOC|147|cell\n"
      "PRESTOW|RFF|BP|bay_preference\n";
  return from_file(DelimitedFile::from_string(text, "<builtin mapping>"));
}

const std::string& EdiMapping::field(const std::string& message, const std::string& tag,
                                     const std::string& qualifier) const {
  static const std::string empty;
  auto it = map_.find(message + "/" + tag + "/" + qualifier);
  return it == map_.end() ? empty : it->second;
}

// ---- BAPLIE -----------------------------------------------------------------

namespace {

// Body of the first (only) message in the interchange.
std::pair<std::size_t, std::size_t> message_body(const EdifactDocument& doc) {
  std::size_t begin = 0, end = 0;
  for (std::size_t i = 0; i < doc.segments.size(); ++i) {
    if (doc.segments[i].tag == "UNH") begin = i + 1;
    if (doc.segments[i].tag == "UNT") {
      end = i;
      break;
    }
  }
  return {begin, end};
}

}  // namespace

BaplieResult parse_baplie(const EdifactDocument& doc, const EdiMapping& mapping) {
  if (doc.message_type() != "BAPLIE")
    fail(Err::NotBaplie, "message type is '" + doc.message_type() + "'");
  BaplieResult result;
  auto [begin, end] = message_body(doc);
  std::optional<StowEntry> open;

  auto flush = [&] {
    if (!open) return;
    if (open->container.owner.empty())
      fail(Err::MalformedCell, "stow group at " + open->position.str() + " has no EQD container");
    result.entries.push_back(*open);
    open.reset();
  };

  for (std::size_t i = begin; i < end; ++i) {
    const Segment& s = doc.segments[i];
    const std::string qualifier = s.comp(0, 0);
    const std::string& field = mapping.field("BAPLIE", s.tag, qualifier);
    if (field.empty()) {
      if (s.tag != "BGM" && s.tag != "DTM" && s.tag != "TDT")  // common headers, silently fine
        result.warnings.push_back("segment " + std::to_string(i) + ": " + s.tag + "+" + qualifier +
                                  " not in mapped subset, skipped");
      continue;
    }
    if (field == "cell") {
      flush();
      open.emplace();
      open->position = parse_cell(s.comp(1, 0));
    } else if (!open) {
      result.warnings.push_back("segment " + std::to_string(i) + ": " + s.tag +
                                " before first stow cell, skipped");
    } else if (field == "container") {
      // EQD+CN+<id>+<size/type>
      try {
        open->container = validate_container_id(s.comp(1, 0));
      } catch (const TosError& e) {
        fail(Err::InvalidContainerId, e.what());
      }
      open->size_type = s.comp(2, 0);
    } else if (field == "weight_kg") {
      // MEA+WT++KGM:<kg>
      open->weight_kg = parse_int(s.comp(2, 1), "MEA weight");
    } else if (field == "pod") {
      open->pod = s.comp(1, 0);
    } else if (field == "pol") {
      open->pol = s.comp(1, 0);
    } else if (field == "final_destination") {
      open->final_destination = s.comp(1, 0);
    } else if (field == "imo_class") {
      open->imo_class = ImoClass{s.comp(1, 0)};
    }
  }
  flush();
  return result;
}

EdifactDocument build_baplie(const std::vector<StowEntry>& entries, const std::string& sender,
                             const std::string& recipient, TimeMs when,
                             const std::string& control_ref) {
  std::vector<Segment> body;
  for (const auto& e : entries) {
    body.push_back(make_segment("LOC", {{"147"}, {e.position.str()}}));
    body.push_back(make_segment("EQD", {{"CN"}, {e.container.str()}, {e.size_type}}));
    body.push_back(make_segment("MEA", {{"WT"}, {}, {"KGM", std::to_string(e.weight_kg)}}));
    if (!e.pol.empty()) body.push_back(make_segment("LOC", {{"9"}, {e.pol}}));
    if (!e.pod.empty()) body.push_back(make_segment("LOC", {{"11"}, {e.pod}}));
    if (e.final_destination)
      body.push_back(make_segment("LOC", {{"8"}, {*e.final_destination}}));
    if (e.imo_class) body.push_back(make_segment("DGS", {{"IMO"}, {e.imo_class->code}}));
  }
  return wrap_interchange(ServiceChars{}, sender, recipient, when, control_ref,
                          {wrap_message("1", "BAPLIE", std::move(body))});
}

// ---- MOVINS -----------------------------------------------------------------

MovinsResult parse_movins(const EdifactDocument& doc, const EdiMapping& mapping) {
  // PRESTOW traffic is handled as a MOVINS variant
  if (doc.message_type() != "MOVINS" && doc.message_type() != "PRESTOW")
    fail(Err::NotMovins, "message type is '" + doc.message_type() + "'");
  MovinsResult result;
  const std::string msg_type = doc.message_type();
  auto [begin, end] = message_body(doc);

  std::optional<MovinsKind> group_kind;
  std::optional<int> group_bay;
  bool last_was_container = false;

  for (std::size_t i = begin; i < end; ++i) {
    const Segment& s = doc.segments[i];
    const std::string qualifier = s.comp(0, 0);
    const std::string& field = mapping.field(msg_type, s.tag, qualifier);
    if (field.empty()) {
      if (s.tag == "HAN")
        fail(Err::MalformedInstruction, "unknown handling qualifier '" + qualifier + "'");
      if (s.tag != "BGM" && s.tag != "DTM" && s.tag != "TDT")
        result.warnings.push_back("segment " + std::to_string(i) + ": " + s.tag + "+" + qualifier +
                                  " not in mapped subset, skipped");
      continue;
    }
    if (field == "load" || field == "discharge" || field == "restow") {
      group_kind = field == "load"      ? MovinsKind::Load
                   : field == "discharge" ? MovinsKind::Discharge
                                          : MovinsKind::Restow;
      group_bay.reset();
      last_was_container = false;
    } else if (field == "bay_preference") {
      if (!group_kind)
        fail(Err::MalformedInstruction, "RFF bay preference before any handling group");
      group_bay = static_cast<int>(parse_int(s.comp(0, 1), "bay preference"));
      last_was_container = false;
    } else if (field == "container") {
      if (!group_kind) fail(Err::MalformedInstruction, "EQD before any handling group");
      MovinsInstruction ins;
      ins.kind = *group_kind;
      try {
        ins.container = validate_container_id(s.comp(1, 0));
      } catch (const TosError& e) {
        fail(Err::MalformedInstruction, e.what());
      }
      ins.size_type = s.comp(2, 0);
      ins.bay_preference = group_bay;
      result.instructions.push_back(std::move(ins));
      last_was_container = true;
    } else if (field == "cell") {
      if (!group_kind) fail(Err::MalformedInstruction, "LOC before any handling group");
      CellAddress cell = parse_cell(s.comp(1, 0));
      if (last_was_container) {
        // a cell directly after a container attaches to it (restow target)
        result.instructions.back().cell = cell;
      } else {
        MovinsInstruction ins;
        ins.kind = *group_kind;
        ins.cell = cell;
        ins.bay_preference = group_bay;
        result.instructions.push_back(std::move(ins));
      }
      last_was_container = false;
    }
  }
  return result;
}

EdifactDocument build_movins(const std::vector<MovinsInstruction>& instructions,
                             const std::string& sender, const std::string& recipient, TimeMs when,
                             const std::string& control_ref) {
  std::vector<Segment> body;
  std::optional<MovinsKind> group_kind;
  std::optional<int> group_bay;
  for (const auto& ins : instructions) {
    if (group_kind != ins.kind || (ins.bay_preference != group_bay)) {
      const char* qual = ins.kind == MovinsKind::Load      ? "LOA"
                         : ins.kind == MovinsKind::Discharge ? "DIS"
                                                             : "RES";
      body.push_back(make_segment("HAN", {{qual}}));
      group_kind = ins.kind;
      group_bay = ins.bay_preference;
      if (group_bay)
        body.push_back(make_segment("RFF", {{"BP", std::to_string(*group_bay)}}));
    }
    if (ins.container) {
      Segment eqd = make_segment("EQD", {{"CN"}, {ins.container->str()}});
      if (!ins.size_type.empty()) eqd.elements.push_back({ins.size_type});
      body.push_back(std::move(eqd));
      if (ins.cell) body.push_back(make_segment("LOC", {{"147"}, {ins.cell->str()}}));
    } else if (ins.cell) {
      body.push_back(make_segment("LOC", {{"147"}, {ins.cell->str()}}));
    } else {
      fail(Err::MalformedInstruction, "instruction needs a container or a cell");
    }
  }
  return wrap_interchange(ServiceChars{}, sender, recipient, when, control_ref,
                          {wrap_message("1", "MOVINS", std::move(body))});
}

// ---- COARRI -----------------------------------------------------------------

EdifactDocument emit_coarri(const VesselVisit& visit, const std::vector<ConfirmedMove>& moves,
                            const std::string& sender, const std::string& recipient,
                            const std::string& control_ref) {
  if (static_cast<int>(visit.status) < static_cast<int>(VisitStatus::Working))
    fail(Err::ValidationFailed,
         "visit " + visit.visit_id + " is " + visit_status_name(visit.status) +
             ", COARRI needs Working or Closed");
  if (moves.empty()) fail(Err::EmptyMoveList, "COARRI for visit " + visit.visit_id);
  std::vector<Segment> body;
  body.push_back(make_segment("TDT", {{"20"}, {visit.visit_id}}));
  TimeMs last = 0;
  for (const auto& m : moves) {
    body.push_back(
        make_segment("HAN", {{m.direction == MoveDirection::Discharge ? "DIS" : "LOA"}}));
    body.push_back(make_segment("EQD", {{"CN"}, {m.container.str()}, {m.size_type}}));
    body.push_back(make_segment("LOC", {{"147"}, {m.cell.str()}}));
    body.push_back(make_segment("DTM", {{"7", format_iso8601(m.completed_at)}}));
    last = std::max(last, m.completed_at);
  }
  return wrap_interchange(ServiceChars{}, sender, recipient, last, control_ref,
                          {wrap_message("1", "COARRI", std::move(body))});
}

std::vector<ConfirmedMove> parse_coarri(const EdifactDocument& doc) {
  if (doc.message_type() != "COARRI")
    fail(Err::EnvelopeMismatch, "message type is '" + doc.message_type() + "'");
  std::vector<ConfirmedMove> moves;
  auto [begin, end] = message_body(doc);
  for (std::size_t i = begin; i < end; ++i) {
    const Segment& s = doc.segments[i];
    if (s.tag == "HAN") {
      ConfirmedMove m;
      m.direction = s.comp(0, 0) == "DIS" ? MoveDirection::Discharge : MoveDirection::Load;
      moves.push_back(m);
    } else if (s.tag == "EQD" && !moves.empty()) {
      moves.back().container = validate_container_id(s.comp(1, 0));
      moves.back().size_type = s.comp(2, 0);
    } else if (s.tag == "LOC" && s.comp(0, 0) == "147" && !moves.empty()) {
      moves.back().cell = parse_cell(s.comp(1, 0));
    } else if (s.tag == "DTM" && !moves.empty()) {
      moves.back().completed_at = parse_iso8601(s.comp(0, 1));
    }
  }
  return moves;
}

// ---- CODECO -----------------------------------------------------------------

EdifactDocument emit_codeco(const std::vector<GateEvent>& events, const std::string& sender,
                            const std::string& recipient, TimeMs when,
                            const std::string& control_ref) {
  if (events.empty()) fail(Err::EmptyMoveList, "CODECO with no gate events");
  std::vector<Segment> body;
  for (const auto& e : events) {
    body.push_back(make_segment("HAN", {{e.gate_in ? "GIN" : "GOT"}}));
    body.push_back(make_segment("EQD", {{"CN"}, {e.container.str()}, {e.size_type}}));
    body.push_back(make_segment("DTM", {{"7", format_iso8601(e.at)}}));
  }
  return wrap_interchange(ServiceChars{}, sender, recipient, when, control_ref,
                          {wrap_message("1", "CODECO", std::move(body))});
}

std::vector<GateEvent> parse_codeco(const EdifactDocument& doc) {
  if (doc.message_type() != "CODECO")
    fail(Err::EnvelopeMismatch, "message type is '" + doc.message_type() + "'");
  std::vector<GateEvent> events;
  auto [begin, end] = message_body(doc);
  for (std::size_t i = begin; i < end; ++i) {
    const Segment& s = doc.segments[i];
    if (s.tag == "HAN") {
      GateEvent e;
      e.gate_in = s.comp(0, 0) == "GIN";
      events.push_back(e);
    } else if (s.tag == "EQD" && !events.empty()) {
      events.back().container = validate_container_id(s.comp(1, 0));
      events.back().size_type = s.comp(2, 0);
    } else if (s.tag == "DTM" && !events.empty()) {
      events.back().at = parse_iso8601(s.comp(0, 1));
    }
  }
  return events;
}

}  // namespace tos
