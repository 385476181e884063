#include <doctest.h>

#include "helpers.hpp"
#include "tos/edifact_messages.hpp"

using namespace tos;

namespace {

// Random well-formed document: random service characters half the time,
// escape-heavy payloads always (components deliberately contain the active
// service characters).
EdifactDocument random_doc(tests::Rng& rng) {
  ServiceChars sc;
  if (rng.chance(50)) {
    const std::string pool = "+:'?*#|&$%!/;.^~@=";
    std::string picked;
    while (picked.size() < 5) {
      char c = pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
      if (picked.find(c) == std::string::npos) picked += c;
    }
    sc.component_sep = picked[0];
    sc.element_sep = picked[1];
    sc.decimal_mark = picked[2];
    sc.release_char = picked[3];
    sc.segment_term = picked[4];
  }
  std::string alphabet = "ABCXYZ0189 abz";
  alphabet += sc.component_sep;
  alphabet += sc.element_sep;
  alphabet += sc.release_char;
  alphabet += sc.segment_term;

  auto component = [&] {
    std::string out;
    int len = rng.below(9);
    for (int i = 0; i < len; ++i) out += rng.pick(alphabet);
    return out;
  };

  std::vector<std::vector<Segment>> bodies;
  int messages = rng.between(1, 3);
  for (int msg = 0; msg < messages; ++msg) {
    std::vector<Segment> body;
    int segments = rng.below(6);
    for (int s = 0; s < segments; ++s) {
      Segment seg;
      for (int t = 0; t < 3; ++t) seg.tag += rng.pick("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789");
      int elements = rng.below(5);
      for (int el = 0; el < elements; ++el) {
        Composite comp;
        int components = rng.between(1, 3);
        for (int c = 0; c < components; ++c) comp.push_back(component());
        seg.elements.push_back(std::move(comp));
      }
      body.push_back(std::move(seg));
    }
    bodies.push_back(wrap_message(std::to_string(msg + 1), "TEST", std::move(body)));
  }
  return wrap_interchange(sc, "SENDER", "RECEIVER", 1704067200000LL,
                          std::to_string(rng.between(1, 9999)), std::move(bodies));
}

}  // namespace

TEST_CASE("basic interchange tokenizes with a valid envelope") {
  auto doc = tokenize("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+1'UNZ+1+1'");
  CHECK(doc.segments.size() == 4);
  CHECK(doc.segments[0].tag == "UNB");
  CHECK(doc.segments[1].tag == "UNH");
  CHECK(doc.segments[3].tag == "UNZ");
  CHECK(doc.service_chars.is_default());
}

TEST_CASE("release character decodes escaped service characters") {
  auto doc = tokenize("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+?+1'UNT+2+1'UNZ+1+1'");
  CHECK(doc.segments[1].comp(1, 0) == "+1");

  SUBCASE("all four service characters escape") {
    auto doc2 = tokenize("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+?'?+???:'UNT+2+1'UNZ+1+1'");
    CHECK(doc2.segments[1].comp(1, 0) == "'+?:");
  }
}

TEST_CASE("tokenizer error cases are distinct") {
  auto code_of = [](const std::string& text) {
    try {
      tokenize(text);
      return Err::IoError;
    } catch (const TosError& e) {
      return e.code();
    }
  };
  CHECK(code_of("") == Err::EmptyInput);
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1") == Err::UnterminatedSegment);
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+1'UNZ+1+1'junk") ==
        Err::UnterminatedSegment);
  CHECK(code_of("UNB+A?") == Err::DanglingRelease);
  CHECK(code_of("UNH+1+X'UNT+2+1'") == Err::EnvelopeMismatch);  // no UNB/UNZ
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+3+1'UNZ+1+1'") ==
        Err::EnvelopeMismatch);  // wrong count
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+9'UNZ+1+1'") ==
        Err::EnvelopeMismatch);  // ref mismatch
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+1'UNZ+2+1'") ==
        Err::EnvelopeMismatch);  // message count
  CHECK(code_of("UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+1'UNZ+1+7'") ==
        Err::EnvelopeMismatch);  // control ref
}

TEST_CASE("whitespace after terminators is tolerated, never emitted") {
  auto doc = tokenize("UNB+UNOA:2+A+B+240101:1200+1'\nUNH+1+X'\r\n  UNT+2+1'\nUNZ+1+1'\n");
  CHECK(doc.segments.size() == 4);
  CHECK(serialize(doc).find('\n') == std::string::npos);
}

TEST_CASE("empty interchange serializes to exactly two segments of text") {
  EdifactDocument doc = wrap_interchange(ServiceChars{}, "A", "B", 1704067200000LL, "7", {});
  std::string text = serialize(doc);
  CHECK(text == "UNB+UNOA:2+A+B+240101:0000+7'UNZ+0+7'");
}

TEST_CASE("component containing the terminator is escaped on output") {
  EdifactDocument doc = wrap_interchange(
      ServiceChars{}, "A", "B", 1704067200000LL, "1",
      {wrap_message("1", "TEST", {make_segment("FTX", {{"don't"}})})});
  std::string text = serialize(doc);
  CHECK(text.find("don?'t") != std::string::npos);
  CHECK(tokenize(text) == doc);
}

TEST_CASE("serialize/tokenize identity over 1000 random escape-heavy documents") {
  tests::Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    EdifactDocument doc = random_doc(rng);
    std::string once = serialize(doc);
    EdifactDocument parsed = tokenize(once);
    CHECK(parsed == doc);
    CHECK(serialize(parsed) == once);  // byte round-trip
  }
}

// ---- BAPLIE -------------------------------------------------------------------

namespace {

std::vector<StowEntry> fixture_entries() {
  std::vector<StowEntry> entries;
  StowEntry a;
  a.container = tests::make_container_id("MSK", 100001);
  a.position = {1, 2, 82};
  a.size_type = "22G1";
  a.weight_kg = 21000;
  a.pod = "MAPTM";
  a.pol = "CNSHA";
  entries.push_back(a);
  StowEntry b;
  b.container = tests::make_container_id("MSK", 100002);
  b.position = {3, 1, 82};
  b.size_type = "42G1";
  b.weight_kg = 27500;
  b.pod = "NLRTM";
  b.pol = "CNSHA";
  b.imo_class = ImoClass{"3"};
  entries.push_back(b);
  StowEntry c;
  c.container = tests::make_container_id("MSK", 100003);
  c.position = {3, 2, 82};
  c.size_type = "45R1";
  c.weight_kg = 19000;
  c.pod = "MAPTM";
  c.pol = "SGSIN";
  c.final_destination = "USNYC";
  entries.push_back(c);
  return entries;
}

}  // namespace

TEST_CASE("BAPLIE fixture with 3 EQD groups yields 3 entries, field by field") {
  // hand-built message text, independent of the builder
  std::string text =
      "UNB+UNOA:2+LINE+TERMINAL+240101:0600+88'"
      "UNH+1+BAPLIE:D:95B:UN'"
      "BGM+658'"
      "LOC+147+0010282'"
      "EQD+CN+MSKU1000016+22G1'"
      "MEA+WT++KGM:21000'"
      "LOC+9+CNSHA'"
      "LOC+11+MAPTM'"
      "LOC+147+0030182'"
      "EQD+CN+MSKU1000021+42G1'"
      "MEA+WT++KGM:27500'"
      "LOC+9+CNSHA'"
      "LOC+11+NLRTM'"
      "DGS+IMO+3'"
      "LOC+147+0030282'"
      "EQD+CN+MSKU1000037+45R1'"
      "MEA+WT++KGM:19000'"
      "LOC+9+SGSIN'"
      "LOC+11+MAPTM'"
      "LOC+8+USNYC'"
      "UNT+20+1'"
      "UNZ+1+88'";
  auto result = parse_baplie(tokenize(text), EdiMapping::builtin());
  REQUIRE(result.entries.size() == 3);
  CHECK(result.warnings.empty());
  auto want = fixture_entries();
  CHECK(result.entries[0] == want[0]);
  CHECK(result.entries[1] == want[1]);
  CHECK(result.entries[2] == want[2]);
}

TEST_CASE("BAPLIE with zero groups is an empty list; non-BAPLIE rejected") {
  EdifactDocument empty = wrap_interchange(ServiceChars{}, "A", "B", 0, "1",
                                           {wrap_message("1", "BAPLIE", {})});
  CHECK(parse_baplie(empty, EdiMapping::builtin()).entries.empty());

  EdifactDocument other = wrap_interchange(ServiceChars{}, "A", "B", 0, "1",
                                           {wrap_message("1", "COPRAR", {})});
  try {
    parse_baplie(other, EdiMapping::builtin());
    FAIL("expected NotBaplie");
  } catch (const TosError& e) {
    CHECK(e.code() == Err::NotBaplie);
  }
}

TEST_CASE("build_baplie then parse_baplie round-trips") {
  auto entries = fixture_entries();
  EdifactDocument doc = build_baplie(entries, "LINE", "TERMINAL", 1704088800000LL, "42");
  auto result = parse_baplie(doc, EdiMapping::builtin());
  CHECK(result.entries == entries);
  CHECK(result.warnings.empty());
  // and the document survives the wire
  CHECK(parse_baplie(tokenize(serialize(doc)), EdiMapping::builtin()).entries == entries);
}

TEST_CASE("BAPLIE rejects bad cells and bad container ids distinctly") {
  std::string bad_cell =
      "UNB+UNOA:2+A+B+240101:0600+1'UNH+1+BAPLIE:D:95B:UN'"
      "LOC+147+00102'EQD+CN+MSKU1000016+22G1'UNT+4+1'UNZ+1+1'";
  try {
    parse_baplie(tokenize(bad_cell), EdiMapping::builtin());
    FAIL("expected MalformedCell");
  } catch (const TosError& e) {
    CHECK(e.code() == Err::MalformedCell);
  }
  std::string bad_id =
      "UNB+UNOA:2+A+B+240101:0600+1'UNH+1+BAPLIE:D:95B:UN'"
      "LOC+147+0010282'EQD+CN+MSKU1000012+22G1'UNT+4+1'UNZ+1+1'";
  try {
    parse_baplie(tokenize(bad_id), EdiMapping::builtin());
    FAIL("expected InvalidContainerId");
  } catch (const TosError& e) {
    CHECK(e.code() == Err::InvalidContainerId);
  }
}

TEST_CASE("unknown BAPLIE segments are warnings, not failures") {
  std::string text =
      "UNB+UNOA:2+A+B+240101:0600+1'UNH+1+BAPLIE:D:95B:UN'"
      "LOC+147+0010282'EQD+CN+MSKU1000016+22G1'MEA+WT++KGM:21000'LOC+11+MAPTM'"
      "FTX+ZZZ+free text here'"
      "UNT+7+1'UNZ+1+1'";
  auto result = parse_baplie(tokenize(text), EdiMapping::builtin());
  CHECK(result.entries.size() == 1);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("FTX") != std::string::npos);
}

// ---- MOVINS -------------------------------------------------------------------

TEST_CASE("MOVINS fixture: 2 loads + 1 restow in order") {
  std::string text =
      "UNB+UNOA:2+LINE+TERMINAL+240102:0600+9'"
      "UNH+1+MOVINS:D:95B:UN'"
      "HAN+LOA'"
      "RFF+BP:3'"
      "EQD+CN+MSKU1000016+22G1'"
      "EQD+CN+MSKU1000021+42G1'"
      "HAN+RES'"
      "EQD+CN+MSKU1000037+45R1'"
      "LOC+147+0050302'"
      "UNT+9+1'"
      "UNZ+1+9'";
  auto result = parse_movins(tokenize(text), EdiMapping::builtin());
  REQUIRE(result.instructions.size() == 3);
  CHECK(result.instructions[0].kind == MovinsKind::Load);
  CHECK(result.instructions[0].bay_preference == 3);
  CHECK(result.instructions[0].container->str() == "MSKU1000016");
  CHECK(result.instructions[1].kind == MovinsKind::Load);
  CHECK(result.instructions[1].bay_preference == 3);
  CHECK(result.instructions[2].kind == MovinsKind::Restow);
  CHECK(result.instructions[2].cell == CellAddress{5, 3, 2});
  CHECK_FALSE(result.instructions[2].bay_preference.has_value());
}

TEST_CASE("empty MOVINS body yields an empty list") {
  EdifactDocument doc = wrap_interchange(ServiceChars{}, "A", "B", 0, "1",
                                         {wrap_message("1", "MOVINS", {})});
  CHECK(parse_movins(doc, EdiMapping::builtin()).instructions.empty());
}

TEST_CASE("build_movins round-trips through the parser") {
  std::vector<MovinsInstruction> instructions;
  MovinsInstruction a;
  a.kind = MovinsKind::Load;
  a.container = tests::make_container_id("CMA", 7);
  a.size_type = "22G1";
  a.bay_preference = 5;
  instructions.push_back(a);
  MovinsInstruction b;
  b.kind = MovinsKind::Load;
  b.container = tests::make_container_id("CMA", 8);
  b.size_type = "42G1";
  b.bay_preference = 5;
  instructions.push_back(b);
  MovinsInstruction c;
  c.kind = MovinsKind::Discharge;
  c.cell = CellAddress{1, 1, 82};
  instructions.push_back(c);
  auto doc = build_movins(instructions, "LINE", "TERMINAL", 1704153600000LL, "10");
  auto result = parse_movins(tokenize(serialize(doc)), EdiMapping::builtin());
  CHECK(result.instructions == instructions);
}

TEST_CASE("PRESTOW messages parse as a MOVINS variant") {
  std::string text =
      "UNB+UNOA:2+LINE+TERMINAL+240102:0600+9'"
      "UNH+1+PRESTOW:D:95B:UN'"
      "HAN+LOA'"
      "EQD+CN+MSKU1000016+22G1'"
      "UNT+4+1'"
      "UNZ+1+9'";
  auto result = parse_movins(tokenize(text), EdiMapping::builtin());
  REQUIRE(result.instructions.size() == 1);
  CHECK(result.instructions[0].kind == MovinsKind::Load);
}

TEST_CASE("malformed MOVINS instructions are rejected") {
  std::string orphan =
      "UNB+UNOA:2+A+B+240101:0600+1'UNH+1+MOVINS:D:95B:UN'"
      "EQD+CN+MSKU1000016+22G1'UNT+3+1'UNZ+1+1'";
  try {
    parse_movins(tokenize(orphan), EdiMapping::builtin());
    FAIL("expected MalformedInstruction");
  } catch (const TosError& e) {
    CHECK(e.code() == Err::MalformedInstruction);
  }
  std::string bad_han =
      "UNB+UNOA:2+A+B+240101:0600+1'UNH+1+MOVINS:D:95B:UN'"
      "HAN+XXX'UNT+3+1'UNZ+1+1'";
  CHECK_THROWS_AS(parse_movins(tokenize(bad_han), EdiMapping::builtin()), TosError);
}

// ---- COARRI / CODECO ------------------------------------------------------------

TEST_CASE("COARRI: two discharges emit two container groups and re-parse") {
  VesselVisit visit;
  visit.visit_id = "V1";
  visit.status = VisitStatus::Working;
  std::vector<ConfirmedMove> moves;
  moves.push_back({MoveDirection::Discharge, tests::make_container_id("MSK", 1), "22G1",
                   CellAddress{1, 1, 82}, 1704100000000LL});
  moves.push_back({MoveDirection::Discharge, tests::make_container_id("MSK", 2), "42G1",
                   CellAddress{1, 2, 82}, 1704100600000LL});
  EdifactDocument doc = emit_coarri(visit, moves, "TERMINAL", "LINE", "5");
  auto parsed = parse_coarri(tokenize(serialize(doc)));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].container == moves[0].container);
  CHECK(parsed[0].direction == MoveDirection::Discharge);
  CHECK(parsed[1].completed_at == moves[1].completed_at);

  SUBCASE("empty move list rejected") {
    try {
      emit_coarri(visit, {}, "T", "L", "6");
      FAIL("expected EmptyMoveList");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::EmptyMoveList);
    }
  }
  SUBCASE("visit must be at least Working") {
    VesselVisit announced;
    announced.visit_id = "V2";
    announced.status = VisitStatus::Announced;
    CHECK_THROWS_AS(emit_coarri(announced, moves, "T", "L", "7"), TosError);
  }
}

TEST_CASE("CODECO: one gate-in plus one gate-out round-trips") {
  std::vector<GateEvent> events;
  events.push_back({true, tests::make_container_id("TRK", 1), "22G1", 1704100000000LL});
  events.push_back({false, tests::make_container_id("TRK", 2), "42G1", 1704101000000LL});
  EdifactDocument doc = emit_codeco(events, "TERMINAL", "PARTNERS", 1704102000000LL, "11");
  auto parsed = parse_codeco(tokenize(serialize(doc)));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].gate_in);
  CHECK_FALSE(parsed[1].gate_in);
  CHECK(parsed[0].container == events[0].container);

  CHECK_THROWS_AS(emit_codeco({}, "T", "P", 0, "12"), TosError);
}

TEST_CASE("emitted documents always carry correct envelope counters") {
  tests::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<GateEvent> events;
    int n = rng.between(1, 7);
    for (int j = 0; j < n; ++j)
      events.push_back({rng.chance(50), tests::make_container_id("RNG", j), "22G1",
                        1704100000000LL + j * 60000LL});
    EdifactDocument doc = emit_codeco(events, "T", "P", 1704200000000LL, std::to_string(i));
    CHECK_NOTHROW(validate_envelope(doc));
    CHECK_NOTHROW(tokenize(serialize(doc)));
  }
}

TEST_CASE("mapping file is versioned") {
  CHECK(EdiMapping::builtin().version() == 1);
  CHECK_THROWS_AS(EdiMapping::from_file(DelimitedFile::from_string(
                      "message|tag|qualifier|field\nBAPLIE|LOC|147|cell\n", "<x>")),
                  TosError);
}
