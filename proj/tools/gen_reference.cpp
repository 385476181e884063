// Generates the reference scenario fixture: terminal definition, master
// data, tariffs, EDI messages and the scenario file. Fully deterministic;
// the committed fixture under tests/data/reference was produced by this
// tool and is regenerated with:
//   gen_reference <target-dir>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>

#include "tos/edifact_messages.hpp"
#include "tos/ids.hpp"

using namespace tos;
namespace fs = std::filesystem;

namespace {

// raw draws only; <random> distributions are not portable across libraries
std::mt19937_64 rng(20240101);
int draw(int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<u64>(hi - lo + 1)); }

ContainerId box_id(const std::string& owner, int serial) {
  std::string first10 = owner + "U" + pad_num(serial, 6);
  int cd = iso6346_check_digit(first10);
  ContainerId id;
  id.owner = owner;
  id.category = 'U';
  id.serial = pad_num(serial, 6);
  id.check_digit = cd;
  return id;
}

constexpr TimeMs kJan1 = 1704067200000LL;  // 2024-01-01T00:00:00Z

std::string iso(TimeMs t) { return format_iso8601(t); }

void write(const fs::path& dir, const std::string& name, const std::string& content) {
  write_text_file((dir / name).string(), content);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_reference <target-dir>\n";
    return 1;
  }
  fs::path dir(argv[1]);
  fs::create_directories(dir / "master");

  // ---- terminal definition ----------------------------------------------
  write(dir, "terminal.psv",
        "[terminal]\n"
        "key|value\n"
        "local_port|MAPTM\n"
        "quay_node|q1\n"
        "interchange_zone|zx\n"
        "clearance_m|10\n"
        "crane_rate_moves_per_hour|25\n"
        "gate_step_s|120\n"
        "gate_retry_s|900\n"
        "gate_max_retries|16\n"
        "reefer_tolerance_c|2\n"
        "sender|TERMINAL\n"
        "horizon_end|2030-01-01T00:00:00Z\n"
        "[nodes]\n"
        "id|kind\n"
        "q1|quay\n"
        "z1|zone\n"
        "z2|zone\n"
        "z3|zone\n"
        "z4|zone\n"
        "zr|zone\n"
        "zi|zone\n"
        "zx|zone\n"
        "gate|gate\n"
        "[blocks]\n"
        "id|bays|rows|max_tier|zone|kind\n"
        "A|10|5|4|z1|Standard\n"
        "B|10|5|4|z2|Standard\n"
        "C|10|5|4|z3|Standard\n"
        "D|10|5|4|z4|Standard\n"
        "R|6|4|3|zr|Reefer\n"
        "I|8|5|2|zi|Imo\n"
        "X|4|2|1|zx|Interchange\n"
        "[edges]\n"
        "a|b|meters\n"
        "q1|z1|300\n"
        "z1|z2|150\n"
        "z2|z3|150\n"
        "z3|z4|150\n"
        "z4|zx|200\n"
        "zx|gate|100\n"
        "z1|zr|250\n"
        "z3|zi|220\n"
        "q1|zr|450\n"
        "[quay]\n"
        "length_m|min_spacing_m\n"
        "700|35\n"
        "[depth]\n"
        "from_m|to_m|depth_m\n"
        "0|350|12\n"
        "350|700|15\n"
        "[quay_cranes]\n"
        "id\n"
        "QC1\nQC2\nQC3\nQC4\n");

  // ---- master data --------------------------------------------------------
  write(dir / "master", "ports.psv",
        "code|name\n"
        "MAPTM|Tanger Med\n"
        "CNSHA|Shanghai\n"
        "SGSIN|Singapore\n"
        "NLRTM|Rotterdam\n"
        "USNYC|New York\n"
        "ESALG|Algeciras\n"
        "DEHAM|Hamburg\n");
  write(dir / "master", "partners.psv",
        "id|kind|name\n"
        "LINE1|ShippingLine|Northline Container\n"
        "LINE2|ShippingLine|Meridian Shipping\n"
        "ACME|TruckingCompany|Acme Haulage\n"
        "FREIGHTCO|TruckingCompany|Freightco Logistics\n"
        "PORTAUTH|Authority|Port Authority\n");
  write(dir / "master", "services.psv",
        "id|name|rotation\n"
        "FE1|Far East Loop|CNSHA,SGSIN,MAPTM,NLRTM\n"
        "TA2|Transatlantic|MAPTM,ESALG,USNYC\n");
  write(dir / "master", "vessel_profiles.psv",
        "name|loa_m|draft_m|bays|rows|tiers|max_stack_weight_kg|max_stack_height\n"
        "ATLAS|300|14|20|10|6|160000|6\n"
        "CORSAIR|210|11|14|8|5|120000|5\n");
  write(dir / "master", "iso_types.psv",
        "code|length_ft|height|group|tare_kg|max_payload_kg\n"
        "22G1|20|Standard|General|2300|28180\n"
        "42G1|40|Standard|General|3750|26730\n"
        "45G1|40|HighCube|General|3940|28560\n"
        "L5G1|45|HighCube|General|4800|29200\n"
        "22R1|20|Standard|Reefer|3080|27400\n"
        "45R1|40|HighCube|Reefer|4110|29890\n"
        "22U1|20|Standard|OpenTop|2400|28080\n"
        "22T1|20|Standard|Tank|3640|26840\n"
        "22P1|20|Standard|Flat|2740|27740\n");
  write(dir / "master", "operators.psv", "id|name\nOPS1|Terminal Operations\n");
  write(dir / "master", "shifts.psv",
        "id|name|start_minute|end_minute|overtime\n"
        "S1|Morning|360|840|0\n"
        "S2|Evening|840|1320|0\n"
        "S3|Night|1320|360|1\n");
  write(dir / "master", "equipment.psv",
        "id|kind|speed_empty_ms|speed_laden_ms|handling_time_s|home_zone\n"
        "QC1|QuayCrane|2|1.5|90|q1\n"
        "QC2|QuayCrane|2|1.5|90|q1\n"
        "QC3|QuayCrane|2|1.5|90|q1\n"
        "QC4|QuayCrane|2|1.5|90|q1\n"
        "RTG1|Rtg|3|2|120|z1\n"
        "RTG2|Rtg|3|2|120|z2\n"
        "RTG3|Rtg|3|2|120|z3\n"
        "RTG4|Rtg|3|2|120|z4\n"
        "RTG5|Rtg|3|2|120|zr\n"
        "RTG6|Rtg|3|2|120|zi\n"
        "RTG7|Rtg|3|2|120|zx\n"
        "RS1|ReachStacker|4|3|100|zx\n"
        "TR1|Tractor|7|5|0|q1\n"
        "TR2|Tractor|7|5|0|q1\n"
        "TR3|Tractor|7|5|0|q1\n"
        "TR4|Tractor|7|5|0|q1\n"
        "TR5|Tractor|7|5|0|zx\n"
        "TR6|Tractor|7|5|0|zx\n"
        "TR7|Tractor|7|5|0|zx\n"
        "TR8|Tractor|7|5|0|zx\n");
  write(dir / "master", "staff.psv",
        "id|name|function\n"
        "ST1|A. Pointer|checker\n"
        "ST2|B. Crane|crane driver\n");
  write(dir / "master", "users.psv",
        "user|role\n"
        "admin|Admin\n"
        "planner|Planner\n"
        "gate|GateClerk\n"
        "billing|BillingClerk\n");
  write(dir / "master", "config.psv", "key|value\nterminal_name|Quayside Reference\n");
  write(dir / "master", "filters.psv",
        "id|priority|length_ft|weight_min_kg|weight_max_kg|service|pol|pod|transaction\n"
        "f_ts|1|||||||Transshipment\n"
        "f_exp|3|||||||Export\n"
        "f_imp|5|||||||Import\n");
  write(dir / "master", "assignments.psv",
        "filter_id|zones|strategy\n"
        "f_ts|z3,z4,zr,zi|Scattered\n"
        "f_exp|z2,z1,zr,zi|Grouped\n"
        "f_imp|z1,z2,zr,zi|Grouped\n");
  write(dir / "master", "stacking.psv", "keys|max_tier\nHeavierOnTop|\n");
  write(dir / "master", "imo_rules.psv",
        "class_a|class_b|rule|value\n"
        "*|*|ProhibitedTerminalWide|0\n"
        "1|3|MinDistance|3\n"
        "1|5.1|Prohibited|0\n"
        "3|8|MinDistance|2\n"
        "5.1|8|MinDistance|2\n");

  // ---- tariffs -------------------------------------------------------------
  write(dir, "tariffs.psv",
        "[contracts]\n"
        "client|valid_from|valid_to|free_storage_days\n"
        "DEFAULT|2024-01-01T00:00:00Z|2030-01-01T00:00:00Z|0\n"
        "LINE1|2024-01-01T00:00:00Z|2026-01-01T00:00:00Z|3\n"
        "ACME|2024-01-01T00:00:00Z|2026-01-01T00:00:00Z|1\n"
        "[rates]\n"
        "client|service_code|unit|price_cents|currency|discount_pct\n"
        "DEFAULT|DISCHARGE|PerMove|6000|EUR|0\n"
        "DEFAULT|LOAD|PerMove|6000|EUR|0\n"
        "DEFAULT|GATE_IN|PerMove|3500|EUR|0\n"
        "DEFAULT|GATE_OUT|PerMove|3500|EUR|0\n"
        "DEFAULT|STORAGE|PerDay|1500|EUR|0\n"
        "DEFAULT|VESSEL_SVC|Flat|250000|EUR|0\n"
        "DEFAULT|SEAL_VERIFY|Flat|2500|EUR|0\n"
        "DEFAULT|INSPECTION|Flat|9000|EUR|0\n"
        "DEFAULT|PRETRIP|Flat|4500|EUR|0\n"
        "DEFAULT|CFS|Flat|12000|EUR|0\n"
        "LINE1|DISCHARGE|PerMove|5000|EUR|5\n"
        "LINE1|LOAD|PerMove|5000|EUR|5\n"
        "LINE1|STORAGE|PerDay|1200|EUR|0\n"
        "LINE1|VESSEL_SVC|Flat|220000|EUR|0\n"
        "LINE1|RESTOW|PerMove|3500|EUR|0\n"
        "DEFAULT|RESTOW|PerMove|4000|EUR|0\n"
        "ACME|GATE_IN|PerMove|3000|EUR|0\n"
        "ACME|GATE_OUT|PerMove|3000|EUR|10\n"
        "ACME|STORAGE|PerDay|1000|EUR|0\n"
        "ACME|SEAL_VERIFY|Flat|2000|EUR|0\n"
        "ACME|PRETRIP|Flat|4000|EUR|0\n");

  // ---- containers ----------------------------------------------------------
  // V1 (ATLAS): 100 cells, 75 import + 10 transshipment + 15 onward
  // V2 (CORSAIR): 60 cells, 40 import + 20 onward
  // trucks: 40 exports (30 load on V1, 10 on V2)
  std::vector<StowEntry> v1_entries;
  std::vector<StowEntry> v2_entries;
  std::vector<ContainerId> v1_imports, v2_imports, transships;

  const char* kSizes[] = {"22G1", "42G1", "45G1"};
  int serial = 1;
  auto make_entry = [&](const std::string& owner, int bay, int row, int tier,
                        const std::string& pod, const std::string& pol) {
    StowEntry e;
    e.container = box_id(owner, serial++);
    e.position = {bay, row, tier};
    e.size_type = kSizes[static_cast<std::size_t>(draw(0, 2))];
    e.weight_kg = draw(8, 28) * 1000;
    e.pod = pod;
    e.pol = pol;
    return e;
  };

  // V1: bays 1..20, rows 1..5 used, tiers 1..1 or 2 (keep stacks shallow)
  {
    int placed = 0;
    for (int bay = 1; bay <= 20 && placed < 100; ++bay)
      for (int row = 1; row <= 5 && placed < 100; ++row) {
        ++placed;
        bool import = placed <= 75;
        bool ts = placed > 75 && placed <= 85;
        StowEntry e = make_entry("NLC", bay, row, 1, import || ts ? "MAPTM" : "NLRTM", "CNSHA");
        if (ts) {
          e.final_destination = "USNYC";
          transships.push_back(e.container);
        } else if (import) {
          if (placed <= 6) {  // reefers
            e.size_type = placed % 2 ? "45R1" : "22R1";
            e.weight_kg = draw(8, 20) * 1000;
          } else if (placed <= 12) {  // dangerous goods, classes kept apart
            e.imo_class = ImoClass{placed % 2 ? "3" : "8"};
          }
          v1_imports.push_back(e.container);
        }
        v1_entries.push_back(e);
      }
  }
  // V2: bays 1..14, rows 1..5
  {
    int placed = 0;
    for (int bay = 1; bay <= 14 && placed < 60; ++bay)
      for (int row = 1; row <= 5 && placed < 60; ++row) {
        ++placed;
        bool import = placed <= 40;
        StowEntry e = make_entry("MER", bay, row, 1, import ? "MAPTM" : "DEHAM", "SGSIN");
        if (import) {
          if (placed <= 2) {
            e.size_type = "22R1";
            e.weight_kg = draw(8, 20) * 1000;
          } else if (placed <= 5) {
            e.imo_class = ImoClass{"3"};
          }
          v2_imports.push_back(e.container);
        }
        v2_entries.push_back(e);
      }
  }

  std::vector<ContainerId> exports;
  for (int i = 0; i < 40; ++i) exports.push_back(box_id("EXP", 500000 + i));

  write(dir, "v1_baplie.edi",
        serialize(build_baplie(v1_entries, "LINE1", "TERMINAL", kJan1 + 2 * kMsPerHour, "101")));
  write(dir, "v2_baplie.edi",
        serialize(build_baplie(v2_entries, "LINE2", "TERMINAL", kJan1 + 20 * kMsPerHour, "201")));

  // V1 loads 30 exports (bay preference pattern); V2 loads 10 exports + the
  // 10 transshipment boxes discharged from V1
  {
    std::vector<MovinsInstruction> ins;
    for (int i = 0; i < 30; ++i) {
      MovinsInstruction mi;
      mi.kind = MovinsKind::Load;
      mi.container = exports[static_cast<std::size_t>(i)];
      mi.size_type = "22G1";
      mi.bay_preference = i < 10 ? std::optional(3) : i < 20 ? std::optional(9) : std::nullopt;
      ins.push_back(mi);
    }
    // two onward boxes shift on board: one to an instructed cell, one planned
    {
      MovinsInstruction r1;
      r1.kind = MovinsKind::Restow;
      r1.container = box_id("NLC", 86);
      r1.size_type = "22G1";
      r1.cell = CellAddress{1, 1, 1};
      ins.push_back(r1);
      MovinsInstruction r2;
      r2.kind = MovinsKind::Restow;
      r2.container = box_id("NLC", 87);
      r2.size_type = "22G1";
      ins.push_back(r2);
    }
    write(dir, "v1_movins.edi",
          serialize(build_movins(ins, "LINE1", "TERMINAL", kJan1 + 3 * kMsPerHour, "102")));
  }
  {
    std::vector<MovinsInstruction> ins;
    for (int i = 30; i < 40; ++i) {
      MovinsInstruction mi;
      mi.kind = MovinsKind::Load;
      mi.container = exports[static_cast<std::size_t>(i)];
      mi.size_type = "22G1";
      ins.push_back(mi);
    }
    for (const auto& id : transships) {
      MovinsInstruction mi;
      mi.kind = MovinsKind::Load;
      mi.container = id;
      mi.size_type = "42G1";
      mi.bay_preference = 5;
      ins.push_back(mi);
    }
    write(dir, "v2_movins.edi",
          serialize(build_movins(ins, "LINE2", "TERMINAL", kJan1 + 21 * kMsPerHour, "202")));
  }

  // the 200-container BAPLIE used by the message-level acceptance check
  {
    std::vector<StowEntry> big;
    int s2 = 1;
    int locals = 0;
    for (int bay = 1; bay <= 20; ++bay)
      for (int row = 1; row <= 10 && static_cast<int>(big.size()) < 200; ++row) {
        StowEntry e;
        e.container = box_id("BIG", s2++);
        e.position = {bay, row, 1};
        e.size_type = kSizes[static_cast<std::size_t>(draw(0, 2))];
        e.weight_kg = draw(8, 28) * 1000;
        bool local = draw(0, 99) < 55;
        if (local) ++locals;
        e.pod = local ? "MAPTM" : "NLRTM";
        e.pol = "CNSHA";
        big.push_back(e);
      }
    write(dir, "baplie_200.edi",
          serialize(build_baplie(big, "LINE1", "TERMINAL", kJan1, "900")));
    std::cout << "baplie_200 locals: " << locals << "\n";
  }

  // ---- scenario -------------------------------------------------------------
  // events are collected and stable-sorted by time: the generator interleaves
  // several timelines and the file must be non-decreasing
  std::vector<std::pair<TimeMs, std::string>> events;
  auto line = [&](TimeMs t, const std::string& rest) { events.emplace_back(t, rest); };

  // export order intake + delivery trucks through the small hours
  TimeMs t = kJan1 + 30 * 60 * 1000LL;  // 00:30
  for (int i = 0; i < 40; ++i) {
    const ContainerId& id = exports[static_cast<std::size_t>(i)];
    std::string order = "E" + std::to_string(i + 1);
    std::string plate = "TRK-" + pad_num(i + 1, 3);
    std::string pod = i < 30 ? "NLRTM" : "DEHAM";
    line(t, "ORDER type=1 id=" + order + " client=ACME container=" + id.str() +
                " size=22G1 weight=" + std::to_string(draw(10, 28) * 1000) + " pod=" + pod +
                " seals=SL" + pad_num(i + 1, 4) + " plate=" + plate + " customs=1");
    line(t + 5 * 60 * 1000, "TRUCK_ARRIVAL plate=" + plate + " orders=" + order);
    t += 6 * 60 * 1000;  // a truck every six minutes
  }

  // two advances and a couple of standalone service orders
  line(kJan1 + 4 * kMsPerHour, "ADVANCE client=ACME amount_cents=50000");
  line(kJan1 + 4 * kMsPerHour, "ADVANCE client=LINE1 amount_cents=1000000");
  line(kJan1 + 4 * kMsPerHour,
       "ORDER type=8 id=SVC1 client=ACME container=" + exports[0].str() + " customs=1");
  line(kJan1 + 4 * kMsPerHour + 60000,
       "ORDER type=18 id=SVC2 client=ACME container=" + exports[1].str() + " customs=1");

  // vessel one: discharge 85 (75 import + 10 transshipment), load 30 exports
  line(kJan1 + 6 * kMsPerHour,
       "VESSEL_ARRIVAL visit=V1 vessel=ATLAS service=FE1 client=LINE1 etd=" +
           iso(kJan1 + 22 * kMsPerHour) + " baplie=v1_baplie.edi movins=v1_movins.edi");

  // a customs hold placed on one import while the ship works, released later
  line(kJan1 + 7 * kMsPerHour, "HOLD action=apply authority=Customs target=container:" +
                                   v1_imports[10].str() + " reason=inspection");
  line(kJan1 + 7 * kMsPerHour + 300000,
       "ORDER type=16 id=INSP1 client=LINE1 container=" + v1_imports[10].str() + " customs=1");

  // reefer telemetry: one in range, one alarming, later back in range
  line(kJan1 + 9 * kMsPerHour, "REEFER container=" + v1_imports[0].str() + " temp=-17.6");
  line(kJan1 + 10 * kMsPerHour, "REEFER container=" + v1_imports[1].str() + " temp=-13.2");
  line(kJan1 + 11 * kMsPerHour, "REEFER container=" + v1_imports[1].str() + " temp=-17.9");

  // import pickups for vessel one boxes: 24 trucks from 14:00, one of them
  // chasing the held container (it waits until the release at 18:00)
  t = kJan1 + 14 * kMsPerHour;
  for (int i = 0; i < 24; ++i) {
    const ContainerId& id = v1_imports[static_cast<std::size_t>(i)];
    std::string order = "I" + std::to_string(i + 1);
    std::string plate = "TRK-" + pad_num(100 + i, 3);
    std::string client = i % 3 == 0 ? "FREIGHTCO" : "ACME";
    line(t, "ORDER type=3 id=" + order + " client=" + client + " container=" + id.str() +
                " customs=1 plate=" + plate);
    line(t + 5 * 60 * 1000, "TRUCK_ARRIVAL plate=" + plate + " orders=" + order);
    t += 10 * 60 * 1000;
  }
  line(kJan1 + 18 * kMsPerHour, "HOLD action=release authority=Customs target=container:" +
                                    v1_imports[10].str());

  // billing lock bridge: lock ACME briefly, then unlock
  line(kJan1 + 15 * kMsPerHour, "LOCK verb=LOCK kind=CLIENT id=FREIGHTCO");
  line(kJan1 + 16 * kMsPerHour, "LOCK verb=UNLOCK kind=CLIENT id=FREIGHTCO");

  line(kJan1 + 17 * kMsPerHour, "ACCIDENT count=1");

  // vessel two next morning: discharge 40, load 10 exports + 10 transships
  line(kJan1 + 30 * kMsPerHour,
       "VESSEL_ARRIVAL visit=V2 vessel=CORSAIR service=TA2 client=LINE2 etd=" +
           iso(kJan1 + 44 * kMsPerHour) + " baplie=v2_baplie.edi movins=v2_movins.edi");

  // pickups for vessel two imports: 16 trucks, two of them combined
  // drop+pick pairs are modeled as one truck with two orders
  t = kJan1 + 36 * kMsPerHour;
  for (int i = 0; i < 16; ++i) {
    const ContainerId& id = v2_imports[static_cast<std::size_t>(i)];
    std::string order = "J" + std::to_string(i + 1);
    std::string plate = "TRK-" + pad_num(200 + i, 3);
    line(t, "ORDER type=3 id=" + order + " client=ACME container=" + id.str() +
                " customs=1 plate=" + plate);
    if (i < 2) {
      // combined I/O: the same truck also drops off an empty
      ContainerId empty = box_id("EMT", 600000 + i);
      std::string in_order = "K" + std::to_string(i + 1);
      line(t, "ORDER type=4 id=" + in_order + " client=ACME container=" + empty.str() +
                  " size=22G1 weight=2300 status=Empty pod=MAPTM customs=1 plate=" + plate);
      line(t + 5 * 60 * 1000, "TRUCK_ARRIVAL plate=" + plate + " orders=" + order + "," +
                                  in_order);
    } else {
      line(t + 5 * 60 * 1000, "TRUCK_ARRIVAL plate=" + plate + " orders=" + order);
    }
    t += 9 * 60 * 1000;
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string sc;
  for (const auto& [at, rest] : events) sc += iso(at) + " " + rest + "\n";
  write(dir, "scenario.qsc", sc);
  std::cout << "reference fixture written to " << dir.string() << "\n";
  std::cout << "v1 entries: " << v1_entries.size() << ", v2 entries: " << v2_entries.size()
            << ", exports: " << exports.size() << "\n";
  return 0;
}
