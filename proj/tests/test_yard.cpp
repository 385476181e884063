#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tos/yard.hpp"

using namespace tos;

namespace {

CollectionFilter pod_filter(const std::string& id, int priority, const std::string& pod) {
  CollectionFilter f;
  f.id = id;
  f.priority = priority;
  f.pod = pod;
  return f;
}

AreaAssignment assign(const std::string& filter, std::vector<std::string> zones,
                      AreaStrategy strategy) {
  AreaAssignment a;
  a.filter_id = filter;
  a.zones = std::move(zones);
  a.strategy = strategy;
  return a;
}

struct World {
  YardLayout layout = tests::small_layout();
  SizeTypeTable table = tests::test_size_table();
  YardState state;
  ImoRuleTable imo;
  StackingPolicy policy = parse_stacking_policy("HeavierOnTop");
};

// Brute force: every feasible slot under the same rules, then the canonical
// minimum. Mirrors plan_slot's contract without sharing its scan order.
std::optional<YardPosition> brute_force_grouped(const World& w, const Container& c,
                                                const AreaAssignment& a) {
  std::vector<YardPosition> feasible;
  for (const auto& zone : a.zones) {
    for (const auto& block_id : w.layout.blocks_in_zone(zone)) {
      const Block& b = w.layout.block(block_id);
      if (b.kind != BlockKind::Standard) continue;
      for (int bay = 1; bay <= b.bays; ++bay)
        for (int row = 1; row <= b.rows; ++row) {
          int h = w.state.stack_height(block_id, bay, row);
          if (h >= b.max_tier) continue;
          const StoredContainer* top = w.state.stack_top(block_id, bay, row);
          if (top && c.gross_weight_kg < top->box.gross_weight_kg) continue;
          if (c.imo_class &&
              !check_imo_placement(w.state, w.layout, {block_id, bay, row, h + 1},
                                   *c.imo_class, w.imo)
                   .ok)
            continue;
          feasible.push_back({block_id, bay, row, h + 1});
        }
    }
    if (!feasible.empty()) {
      // canonical order inside the first zone that has room
      std::sort(feasible.begin(), feasible.end());
      return feasible.front();
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("classification picks the lowest priority number") {
  auto table = tests::test_size_table();
  std::vector<CollectionFilter> filters{pod_filter("rtm", 2, "NLRTM"),
                                        pod_filter("rtm-prio", 1, "NLRTM"),
                                        pod_filter("nyc", 3, "USNYC")};
  Container c = tests::make_box(1, 20000, "NLRTM");
  CHECK(classify_container(c, filters, table) == "rtm-prio");
  Container n = tests::make_box(2, 20000, "USNYC");
  CHECK(classify_container(n, filters, table) == "nyc");
  Container u = tests::make_box(3, 20000, "DEHAM");
  CHECK_FALSE(classify_container(u, filters, table).has_value());  // manual queue
}

TEST_CASE("filters need at least one predicate and match conjunctively") {
  CollectionFilter f;
  f.id = "x";
  CHECK_FALSE(f.has_predicate());
  f.pod = "NLRTM";
  f.weight_min_kg = 15000;
  auto table = tests::test_size_table();
  CHECK(f.matches(tests::make_box(1, 20000, "NLRTM"), table, ""));
  CHECK_FALSE(f.matches(tests::make_box(2, 10000, "NLRTM"), table, ""));
  CHECK_FALSE(f.matches(tests::make_box(3, 20000, "USNYC"), table, ""));
}

TEST_CASE("grouped strategy fills the first zone in canonical order") {
  World w;
  Container c = tests::make_box(1);
  auto a = assign("f", {"z1", "z2"}, AreaStrategy::Grouped);
  YardPosition pos = plan_slot(c, a, w.state, w.layout, w.imo, w.policy, w.table);
  CHECK(pos == YardPosition{"A", 1, 1, 1});
}

TEST_CASE("scattered strategy balances per-zone counts") {
  // 4 zones via a custom layout
  YardLayout layout;
  for (int z = 1; z <= 4; ++z) {
    layout.add_node("z" + std::to_string(z), NodeKind::Zone);
    Block b;
    b.id = "B" + std::to_string(z);
    b.bays = 4;
    b.rows = 3;
    b.max_tier = 3;
    b.zone = "z" + std::to_string(z);
    layout.add_block(b);
  }
  layout.add_edge("z1", "z2", 100);
  layout.add_edge("z2", "z3", 100);
  layout.add_edge("z3", "z4", 100);
  layout.validate();

  World w;
  w.layout = layout;
  auto a = assign("f", {"z1", "z2", "z3", "z4"}, AreaStrategy::Scattered);
  for (int i = 0; i < 8; ++i) {
    Container c = tests::make_box(i);
    YardPosition pos = plan_slot(c, a, w.state, w.layout, w.imo, w.policy, w.table);
    w.state.place(c, pos, w.layout, "f");
  }
  for (int z = 1; z <= 4; ++z)
    CHECK(w.state.count_collection_in_zone("f", "z" + std::to_string(z), w.layout) == 2);
}

TEST_CASE("heaviest-over-lighter: heavy tops the stack, light starts a new one") {
  World w;
  auto a = assign("f", {"z1"}, AreaStrategy::Grouped);
  Container light = tests::make_box(1, 10000);
  YardPosition p1 = plan_slot(light, a, w.state, w.layout, w.imo, w.policy, w.table);
  w.state.place(light, p1, w.layout, "f");
  REQUIRE(p1 == YardPosition{"A", 1, 1, 1});

  Container heavy = tests::make_box(2, 25000);
  YardPosition p2 = plan_slot(heavy, a, w.state, w.layout, w.imo, w.policy, w.table);
  CHECK(p2 == YardPosition{"A", 1, 1, 2});  // stacks on the lighter one
  w.state.place(heavy, p2, w.layout, "f");

  Container lighter = tests::make_box(3, 5000);
  YardPosition p3 = plan_slot(lighter, a, w.state, w.layout, w.imo, w.policy, w.table);
  CHECK(p3 == YardPosition{"A", 1, 2, 1});  // cannot top the heavy stack
}

TEST_CASE("plan_slot equals brute-force canonical minimum on random small yards") {
  tests::Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    World w;
    w.layout = tests::small_layout(1, 4, 3, 3);
    auto a = assign("f", {"z1", "z2"}, AreaStrategy::Grouped);
    for (int i = 0; i < 40; ++i) {
      Container c = tests::make_box(i, rng.between(5, 30) * 1000);
      auto expect = brute_force_grouped(w, c, a);
      if (!expect) {
        CHECK_THROWS_AS(
            plan_slot(c, a, w.state, w.layout, w.imo, w.policy, w.table), TosError);
        break;
      }
      YardPosition pos = plan_slot(c, a, w.state, w.layout, w.imo, w.policy, w.table);
      CHECK(pos == *expect);
      w.state.place(c, pos, w.layout, "f");
      w.state.check_invariants(w.layout);
    }
  }
}

TEST_CASE("IMO minimum distance uses Chebyshev geometry within a block") {
  World w;
  w.imo.set_rule("1", "3", {false, 3});
  Container a = tests::make_box(1);
  a.imo_class = ImoClass{"1"};
  w.state.place(a, {"A", 1, 1, 1}, w.layout);

  SUBCASE("closer than the minimum violates") {
    auto res = check_imo_placement(w.state, w.layout, {"A", 3, 3, 1}, ImoClass{"3"}, w.imo);
    CHECK_FALSE(res.ok);  // Chebyshev distance 2 < 3
    CHECK(res.other_pos == YardPosition{"A", 1, 1, 1});
  }
  SUBCASE("exactly the minimum passes") {
    CHECK(check_imo_placement(w.state, w.layout, {"A", 4, 1, 1}, ImoClass{"3"}, w.imo).ok);
  }
  SUBCASE("unrelated classes ignore each other") {
    CHECK(check_imo_placement(w.state, w.layout, {"A", 1, 2, 1}, ImoClass{"8"}, w.imo).ok);
  }
  SUBCASE("empty yard is always ok") {
    YardState empty;
    CHECK(check_imo_placement(empty, w.layout, {"A", 1, 1, 1}, ImoClass{"1"}, w.imo).ok);
  }
}

TEST_CASE("prohibited pairs: block scope by default, terminal-wide when configured") {
  World w;
  w.imo.set_rule("1", "5.1", {true, 0});
  Container a = tests::make_box(1);
  a.imo_class = ImoClass{"1"};
  w.state.place(a, {"A", 1, 1, 1}, w.layout);

  CHECK_FALSE(
      check_imo_placement(w.state, w.layout, {"A", 4, 3, 1}, ImoClass{"5.1"}, w.imo).ok);
  // different block (other zone) passes under the block-scope rule
  CHECK(check_imo_placement(w.state, w.layout, {"B", 1, 1, 1}, ImoClass{"5.1"}, w.imo).ok);

  w.imo.prohibited_terminal_wide = true;
  CHECK_FALSE(
      check_imo_placement(w.state, w.layout, {"B", 1, 1, 1}, ImoClass{"5.1"}, w.imo).ok);
}

TEST_CASE("IMO check agrees with an exhaustive scan oracle on random yards") {
  tests::Rng rng(55);
  World w;
  w.imo.set_rule("1", "3", {false, 2});
  w.imo.set_rule("1", "5.1", {true, 0});
  std::vector<std::string> classes{"1", "3", "5.1", "8"};
  for (int i = 0; i < 20; ++i) {
    Container c = tests::make_box(i);
    if (rng.chance(60)) c.imo_class = ImoClass{classes[rng.below(4)]};
    // place anywhere legal by gravity, ignoring IMO (to exercise violations)
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::string block = rng.chance(50) ? "A" : "B";
      int bay = rng.between(1, 4), row = rng.between(1, 3);
      int h = w.state.stack_height(block, bay, row);
      if (h >= 3) continue;
      w.state.place(c, {block, bay, row, h + 1}, w.layout);
      break;
    }
  }
  // oracle: full pairwise scan
  for (int bay = 1; bay <= 4; ++bay)
    for (int row = 1; row <= 3; ++row)
      for (const auto& cls : classes) {
        for (const std::string block : {"A", "B"}) {
          int h = w.state.stack_height(block, bay, row);
          if (h >= 3) continue;
          YardPosition pos{block, bay, row, h + 1};
          bool oracle_ok = true;
          for (const auto& [id, sc] : w.state.all()) {
            if (!sc.box.imo_class) continue;
            auto rule = w.imo.rule_for(ImoClass{cls}, *sc.box.imo_class);
            if (!rule) continue;
            bool same_block = sc.pos.block == pos.block;
            if (rule->prohibited && same_block) oracle_ok = false;
            if (!rule->prohibited && same_block) {
              int cheb =
                  std::max(std::abs(sc.pos.bay - pos.bay), std::abs(sc.pos.row - pos.row));
              if (cheb < rule->min_distance) oracle_ok = false;
            }
          }
          CHECK(check_imo_placement(w.state, w.layout, pos, ImoClass{cls}, w.imo).ok ==
                oracle_ok);
        }
      }
}

TEST_CASE("every slot accepted by plan_slot passes the IMO check") {
  World w;
  w.layout = tests::small_layout(1, 4, 3, 3);
  // dedicated IMO blocks so dangerous boxes have somewhere to go
  Block imo_block;
  imo_block.id = "D";
  imo_block.bays = 6;
  imo_block.rows = 4;
  imo_block.max_tier = 2;
  imo_block.zone = "z1";
  imo_block.kind = BlockKind::Imo;
  w.layout.add_block(imo_block);
  w.imo.set_rule("1", "3", {false, 2});
  auto a = assign("f", {"z1"}, AreaStrategy::Grouped);
  tests::Rng rng(8);
  std::vector<std::string> classes{"1", "3"};
  for (int i = 0; i < 12; ++i) {
    Container c = tests::make_box(i);
    c.imo_class = ImoClass{classes[rng.below(2)]};
    try {
      YardPosition pos = plan_slot(c, a, w.state, w.layout, w.imo, w.policy, w.table);
      CHECK(check_imo_placement(w.state, w.layout, pos, *c.imo_class, w.imo).ok);
      w.state.place(c, pos, w.layout, "f");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::NoFeasibleSlot);
      break;
    }
  }
}

TEST_CASE("rehandle estimation steps the greedy simulation") {
  CHECK(estimate_rehandles({"A"}, {"A"}) == 0);
  CHECK(estimate_rehandles({"A", "B", "C"}, {"C", "B", "A"}) == 0);  // top-down
  CHECK(estimate_rehandles({"A", "B", "C"}, {"A", "B", "C"}) == 2);
  CHECK(estimate_rehandles({"A", "B", "C"}, {"A", "C", "B"}) == 3);  // C blocks again
  CHECK(estimate_rehandles({"A", "B", "C", "D"}, {"A", "D", "C", "B"}) == 5);
  CHECK(estimate_rehandles({"A", "B", "C"}, {"B", "C", "A"}) == 1);
  SUBCASE("blockers always spill to the lowest-indexed other stack") {
    CHECK(estimate_rehandles({"A", "B", "C"}, {"A", "C", "B"}, 2) == 3);
  }
  SUBCASE("retrieval order must permute the stack") {
    try {
      estimate_rehandles({"A", "B"}, {"A"});
      FAIL("expected NotAPermutation");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::NotAPermutation);
    }
    CHECK_THROWS_AS(estimate_rehandles({"A", "B"}, {"A", "A"}), TosError);
  }
}

TEST_CASE("capacity report sums match a full rescan") {
  World w;
  tests::Rng rng(66);
  auto report0 = capacity_report(w.state, w.layout);
  CHECK(report0.at("z1").occupied == 0);
  CHECK(report0.at("z1").pct == 0.0);
  CHECK(report0.at("z1").slots == 36);  // 4*3*3

  int placed = 0;
  for (int i = 0; i < 25; ++i) {
    Container c = tests::make_box(i);
    std::string block = rng.chance(50) ? "A" : "B";
    int bay = rng.between(1, 4), row = rng.between(1, 3);
    int h = w.state.stack_height(block, bay, row);
    if (h >= 3) continue;
    w.state.place(c, {block, bay, row, h + 1}, w.layout);
    ++placed;
  }
  auto report = capacity_report(w.state, w.layout);
  int total_slots = 0, total_occupied = 0;
  for (const auto& [zone, cap] : report) {
    total_slots += cap.slots;
    total_occupied += cap.occupied;
    CHECK(cap.free_slots == cap.slots - cap.occupied);
    // rescan oracle
    CHECK(cap.occupied == w.state.count_in_zone(zone, w.layout));
  }
  CHECK(total_slots == w.layout.total_slots());
  CHECK(total_occupied == placed);
}

TEST_CASE("one container shows up in exactly one zone") {
  World w;
  Container c = tests::make_box(1);
  w.state.place(c, {"A", 1, 1, 1}, w.layout);
  int zones_with_content = 0;
  for (const auto& [zone, cap] : capacity_report(w.state, w.layout))
    if (cap.occupied > 0) ++zones_with_content;
  CHECK(zones_with_content == 1);
}

TEST_CASE("manual override enforces gravity on both ends") {
  World w;
  Container a = tests::make_box(1), b = tests::make_box(2);
  w.state.place(a, {"A", 1, 1, 1}, w.layout);
  w.state.place(b, {"A", 1, 1, 2}, w.layout);

  SUBCASE("moving the buried container would float the other") {
    try {
      manual_override(w.state, a.id, {"A", 2, 1, 1}, w.layout);
      FAIL("expected WouldFloat");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::WouldFloat);
    }
  }
  SUBCASE("moving onto an occupied slot is rejected") {
    try {
      manual_override(w.state, b.id, {"A", 1, 1, 1}, w.layout);
      FAIL("expected SlotOccupied");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::SlotOccupied);
    }
  }
  SUBCASE("moving into thin air is rejected") {
    CHECK_THROWS_AS(manual_override(w.state, b.id, {"A", 2, 1, 2}, w.layout), TosError);
  }
  SUBCASE("unknown container") {
    try {
      manual_override(w.state, tests::make_container_id("ZZZ", 9), {"A", 2, 1, 1}, w.layout);
      FAIL("expected UnknownContainer");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::UnknownContainer);
    }
  }
  SUBCASE("legal move succeeds atomically and is logged as Manual") {
    manual_override(w.state, b.id, {"A", 2, 1, 1}, w.layout);
    CHECK(w.state.find(b.id)->pos == YardPosition{"A", 2, 1, 1});
    w.state.check_invariants(w.layout);
    REQUIRE_FALSE(w.state.move_log().empty());
    CHECK(w.state.move_log().back().kind == YardMoveKind::Manual);
  }
}

TEST_CASE("yard invariants hold through random operation sequences") {
  tests::Rng rng(123);
  World w;
  std::vector<Container> in_yard;
  for (int step = 0; step < 300; ++step) {
    int action = rng.below(3);
    if (action == 0 || in_yard.empty()) {
      Container c = tests::make_box(step);
      std::string block = rng.chance(50) ? "A" : "B";
      int bay = rng.between(1, 4), row = rng.between(1, 3);
      int h = w.state.stack_height(block, bay, row);
      if (h >= 3) continue;
      w.state.place(c, {block, bay, row, h + 1}, w.layout);
      in_yard.push_back(c);
    } else if (action == 1) {
      // remove a random container if it is on top
      const Container& c = in_yard[static_cast<std::size_t>(
          rng.below(static_cast<int>(in_yard.size())))];
      const StoredContainer* sc = w.state.find(c.id);
      YardPosition above = sc->pos;
      above.tier += 1;
      if (!w.state.occupied(above)) {
        w.state.remove(c.id);
        in_yard.erase(std::find_if(in_yard.begin(), in_yard.end(),
                                   [&](const Container& x) { return x.id == c.id; }));
      }
    } else {
      const Container& c = in_yard[static_cast<std::size_t>(
          rng.below(static_cast<int>(in_yard.size())))];
      try {
        manual_override(w.state, c.id,
                        {rng.chance(50) ? "A" : "B", rng.between(1, 4), rng.between(1, 3),
                         rng.between(1, 3)},
                        w.layout);
      } catch (const TosError&) {
        // rejected moves must leave the state untouched; invariants below
      }
    }
    w.state.check_invariants(w.layout);
    CHECK(w.state.size() == in_yard.size());
  }
}

TEST_CASE("config loaders parse filters and assignments") {
  auto filters = parse_filters(DelimitedFile::from_string(
      "id|priority|length_ft|weight_min_kg|weight_max_kg|service|pol|pod|transaction\n"
      "rtm|1||||||NLRTM|Import\n"
      "heavy|2||24000|||||\n",
      "<filters>"));
  REQUIRE(filters.size() == 2);
  CHECK(filters[0].pod == "NLRTM");
  CHECK(filters[0].transaction == Transaction::Import);
  CHECK(filters[1].weight_min_kg == 24000);

  CHECK_THROWS_AS(parse_filters(DelimitedFile::from_string(
                      "id|priority|length_ft|weight_min_kg|weight_max_kg|service|pol|pod|"
                      "transaction\nempty|1|||||||\n",
                      "<filters>")),
                  TosError);
}
