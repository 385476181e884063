#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "tos/report.hpp"

using namespace tos;

namespace {

constexpr TimeMs kJan1 = 1704067200000LL;

HistoryEntry leg(const std::string& equipment, EquipmentKind kind, TimeMs start, TimeMs end,
                 double empty_m = 0, double laden_m = 100, bool rehandle = false,
                 const std::string& container = "TSTU0000015") {
  HistoryEntry h;
  h.equipment = equipment;
  h.kind = kind;
  h.container = container;
  h.start = start;
  h.end = end;
  h.empty_travel_m = empty_m;
  h.laden_travel_m = laden_m;
  h.rehandle = rehandle;
  return h;
}

}  // namespace

TEST_CASE("crane rate: 100 lifts in 4 hours is 25 moves per hour") {
  std::vector<HistoryEntry> history;
  for (int i = 0; i < 100; ++i)
    history.push_back(leg("QC1", EquipmentKind::QuayCrane, kJan1 + i * 60000LL,
                          kJan1 + i * 60000LL + 30000));
  YardState yard;
  YardLayout layout = tests::small_layout();
  KpiReport r = compute_kpis(history, yard, layout, kJan1, kJan1 + 4 * kMsPerHour);
  CHECK(r.crane_moves_per_hour.at("QC1") == doctest::Approx(25.0));
  CHECK(r.quay_moves == 100);
}

TEST_CASE("unproductive ratio is zero without rehandles or empty approaches") {
  std::vector<HistoryEntry> history{leg("TR1", EquipmentKind::Tractor, kJan1, kJan1 + 60000)};
  YardState yard;
  YardLayout layout = tests::small_layout();
  KpiReport r = compute_kpis(history, yard, layout, kJan1, kJan1 + kMsPerHour);
  CHECK(r.unproductive_ratio == 0.0);

  SUBCASE("rehandles and empty approaches count") {
    history.push_back(leg("TR1", EquipmentKind::Tractor, kJan1 + 100000, kJan1 + 200000, 50));
    history.push_back(
        leg("RTG1", EquipmentKind::Rtg, kJan1 + 100000, kJan1 + 150000, 0, 0, true));
    KpiReport r2 = compute_kpis(history, yard, layout, kJan1, kJan1 + kMsPerHour);
    CHECK(r2.unproductive_ratio == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("every KPI figure equals an independent recount of a random log") {
  tests::Rng rng(808);
  std::vector<HistoryEntry> history;
  std::vector<std::string> cranes{"QC1", "QC2"};
  std::vector<std::string> rtgs{"RTG1", "RTG2", "RTG3"};
  TimeMs period_end = kJan1 + 8 * kMsPerHour;
  for (int i = 0; i < 400; ++i) {
    TimeMs start = kJan1 + rng.below(7 * 60) * 60000LL;
    TimeMs end = start + rng.between(1, 10) * 60000LL;
    int pick = rng.below(3);
    EquipmentKind kind = pick == 0   ? EquipmentKind::QuayCrane
                         : pick == 1 ? EquipmentKind::Rtg
                                     : EquipmentKind::Tractor;
    std::string id = kind == EquipmentKind::QuayCrane ? cranes[rng.below(2)]
                     : kind == EquipmentKind::Rtg     ? rtgs[rng.below(3)]
                                                      : "TR1";
    history.push_back(leg(id, kind, start, end, rng.chance(30) ? 25 : 0, 100,
                          rng.chance(10)));
  }
  YardState yard;
  YardLayout layout = tests::small_layout();
  KpiReport r = compute_kpis(history, yard, layout, kJan1, period_end);

  // independent recount
  i64 total = 0, unproductive = 0, quay = 0;
  std::map<std::string, i64> per_crane, per_rtg;
  for (const auto& h : history) {
    if (h.end < kJan1 || h.end >= period_end) continue;
    ++total;
    if (h.kind == EquipmentKind::QuayCrane) {
      ++quay;
      ++per_crane[h.equipment];
    }
    if (h.kind == EquipmentKind::Rtg) ++per_rtg[h.equipment];
    if (h.rehandle || h.empty_travel_m > 0) ++unproductive;
  }
  CHECK(r.total_legs == total);
  CHECK(r.quay_moves == quay);
  CHECK(r.unproductive_ratio == doctest::Approx(static_cast<double>(unproductive) / total));
  double hours = 8.0;
  for (const auto& [crane, n] : per_crane)
    CHECK(r.crane_moves_per_hour.at(crane) == doctest::Approx(n / hours));
  i64 lo = INT64_MAX, hi = 0;
  for (const auto& [id, n] : per_rtg) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  CHECK(r.rtg_balance == hi - lo);
  CHECK(r.unproductive_ratio >= 0.0);
  CHECK(r.unproductive_ratio <= 1.0);

  SUBCASE("empty period is rejected") {
    CHECK_THROWS_AS(compute_kpis(history, yard, layout, kJan1, kJan1), TosError);
  }
  SUBCASE("reports over identical logs are byte-identical") {
    KpiReport again = compute_kpis(history, yard, layout, kJan1, period_end);
    CHECK(kpi_to_kv(r) == kpi_to_kv(again));
    CHECK(kpi_to_psv(r) == kpi_to_psv(again));
  }
}

TEST_CASE("authority stats: TEU convention and dangerous goods") {
  std::map<std::string, ContainerTrafficInfo> traffic;
  traffic["AAAU0000013"] = {2, std::nullopt};          // one 40 ft box
  traffic["BBBU0000011"] = {1, std::optional<std::string>("3")};
  std::vector<HistoryEntry> history{
      leg("QC1", EquipmentKind::QuayCrane, kJan1, kJan1 + 60000, 0, 0, false, "AAAU0000013"),
      leg("QC1", EquipmentKind::QuayCrane, kJan1 + 60000, kJan1 + 120000, 0, 0, false,
          "BBBU0000011"),
      leg("TR1", EquipmentKind::Tractor, kJan1, kJan1 + 60000)};
  AuthorityStats s = authority_stats(history, traffic, kJan1, kJan1 + kMsPerHour, 1);
  CHECK(s.boxes == 2);
  CHECK(s.teu == 3);  // 2 + 1
  CHECK(s.dangerous_by_class.at("3") == 1);
  CHECK(s.work_accidents == 1);
  CHECK(s.productivity_moves_per_hour == doctest::Approx(2.0));

  SUBCASE("no IMO traffic leaves the table empty") {
    AuthorityStats none = authority_stats({history[0]}, traffic, kJan1, kJan1 + kMsPerHour);
    CHECK(none.dangerous_by_class.empty());
  }
}

TEST_CASE("archive tiers: the five canonical ages land where they must") {
  TimeMs now = kJan1;
  auto rec = [&](int years, i64 id) {
    ArchiveRecord r;
    r.id = id;
    r.timestamp = now - years * kMsPerYear;
    r.category = "move";
    r.payload = "p" + std::to_string(id);
    return r;
  };
  std::vector<ArchiveRecord> records{rec(2, 1), rec(3, 2), rec(9, 3), rec(10, 4), rec(11, 5)};
  ArchivePartition p = partition_archive(records, now);
  REQUIRE(p.operational.size() == 1);
  CHECK(p.operational[0].id == 1);
  REQUIRE(p.midterm.size() == 2);
  CHECK(p.midterm[0].id == 2);
  CHECK(p.midterm[1].id == 3);
  REQUIRE(p.longterm.size() == 2);
  CHECK(p.longterm[0].id == 4);
  CHECK(p.longterm[1].id == 5);

  SUBCASE("future records are rejected") {
    try {
      partition_archive({rec(-1, 6)}, now);
      FAIL("expected FutureTimestamp");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::FutureTimestamp);
    }
  }
}

TEST_CASE("partition is total and disjoint on 10000 random records") {
  tests::Rng rng(515);
  TimeMs now = kJan1;
  std::vector<ArchiveRecord> records;
  for (i64 i = 0; i < 10000; ++i) {
    ArchiveRecord r;
    r.id = i;
    r.timestamp = now - rng.below(20 * 365) * kMsPerDay;
    r.category = "move";
    records.push_back(r);
  }
  ArchivePartition p = partition_archive(records, now);
  CHECK(p.operational.size() + p.midterm.size() + p.longterm.size() == records.size());
  std::set<i64> seen;
  auto absorb = [&](const std::vector<ArchiveRecord>& tier, ArchiveTier which) {
    for (const auto& r : tier) {
      CHECK(seen.insert(r.id).second);
      CHECK(tier_for_age(now - r.timestamp) == which);
    }
  };
  absorb(p.operational, ArchiveTier::Operational);
  absorb(p.midterm, ArchiveTier::MidTerm);
  absorb(p.longterm, ArchiveTier::LongTerm);
  CHECK(seen.size() == records.size());
}

TEST_CASE("long-term dump: typed header, count-preserving, byte-stable") {
  std::vector<ArchiveRecord> records;
  for (i64 i = 0; i < 5; ++i) {
    ArchiveRecord r;
    r.id = i;
    r.timestamp = kJan1 - i * kMsPerDay;
    r.category = i % 2 ? "invoice" : "move";
    r.payload = "payload " + std::to_string(i);
    records.push_back(r);
  }
  std::string dump = export_longterm(records);
  CHECK(split(trim(dump), '\n').size() == 6);  // header + 5
  auto back = import_longterm(dump);
  CHECK(back == records);
  CHECK(export_longterm(back) == dump);  // byte-stable round trip

  SUBCASE("empty export is header-only and re-imports empty") {
    std::string empty = export_longterm({});
    CHECK(split(trim(empty), '\n').size() == 1);
    CHECK(import_longterm(empty).empty());
  }
  SUBCASE("wrong header is rejected") {
    CHECK_THROWS_AS(import_longterm("id|timestamp\n"), TosError);
  }
}
