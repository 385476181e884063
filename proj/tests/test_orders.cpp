#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "tos/orders.hpp"

using namespace tos;

namespace {

OrderPayload payload(const std::string& id, OrderType type, bool with_container = true) {
  OrderPayload p;
  p.order_id = id;
  p.type = type;
  p.client = "ACME";
  if (with_container) p.container = tests::make_container_id("ORD", 1);
  p.customs_cleared = true;
  p.at = 1000;
  return p;
}

GateTransaction truck(const std::string& plate, std::vector<std::string> orders) {
  GateTransaction t;
  t.plate = plate;
  t.order_ids = std::move(orders);
  t.timestamps.emplace_back(GateState::ArrivedPreGate, 0);
  return t;
}

}  // namespace

TEST_CASE("the twenty order types are all distinct and numbered 1..20") {
  std::set<std::string> names;
  for (int n = 1; n <= 20; ++n) names.insert(order_type_name(parse_order_type(n)));
  CHECK(names.size() == 20);
  CHECK_THROWS_AS(parse_order_type(0), TosError);
  CHECK_THROWS_AS(parse_order_type(21), TosError);
}

TEST_CASE("create/amend/cancel lifecycle") {
  OrderStore store;
  ServiceOrder& o =
      manage_order(store, OrderAction::Create, payload("O1", OrderType::ReceiveFullByTruck));
  CHECK(o.status == OrderStatus::Created);

  SUBCASE("container-bound types demand a container") {
    try {
      manage_order(store, OrderAction::Create,
                   payload("O2", OrderType::DeliverFullToTruck, false));
      FAIL("expected MissingContainer");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::MissingContainer);
    }
    // vessel-call orders do not
    CHECK_NOTHROW(manage_order(store, OrderAction::Create,
                               payload("O3", OrderType::VesselCall, false)));
  }
  SUBCASE("amend touches only non-identity fields") {
    OrderPayload amend;
    amend.order_id = "O1";
    amend.expected_plate = "TRUCK-7";
    manage_order(store, OrderAction::Amend, amend);
    CHECK(store.order("O1").expected_plate == "TRUCK-7");

    // change-of-vessel requests re-bind the order to another visit
    OrderPayload rebind;
    rebind.order_id = "O1";
    rebind.visit = "V2";
    manage_order(store, OrderAction::Amend, rebind);
    CHECK(store.order("O1").visit == "V2");

    OrderPayload bad;
    bad.order_id = "O1";
    bad.container = tests::make_container_id("XXX", 9);
    CHECK_THROWS_AS(manage_order(store, OrderAction::Amend, bad), TosError);
  }
  SUBCASE("cancel is terminal; terminal orders reject further changes") {
    OrderPayload cancel;
    cancel.order_id = "O1";
    cancel.cancel_reason = "client request";
    manage_order(store, OrderAction::Cancel, cancel);
    CHECK(store.order("O1").status == OrderStatus::Cancelled);
    try {
      manage_order(store, OrderAction::Cancel, cancel);
      FAIL("expected TerminalStatus");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::TerminalStatus);
    }
    CHECK_THROWS_AS(manage_order(store, OrderAction::Amend, cancel), TosError);
  }
  SUBCASE("unknown order") {
    OrderPayload ghost;
    ghost.order_id = "NOPE";
    try {
      manage_order(store, OrderAction::Cancel, ghost);
      FAIL("expected UnknownOrder");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::UnknownOrder);
    }
  }
}

TEST_CASE("status graph is exactly the documented chain plus cancel") {
  // property: random action sequences never reach an undocumented transition
  tests::Rng rng(314);
  for (int trial = 0; trial < 200; ++trial) {
    OrderStore store;
    manage_order(store, OrderAction::Create, payload("X", OrderType::ReceiveFullByTruck));
    OrderStatus prev = store.order("X").status;
    for (int step = 0; step < 6; ++step) {
      int action = rng.below(4);
      try {
        switch (action) {
          case 0: validate_order(store, "X"); break;
          case 1: start_order(store, "X"); break;
          case 2: complete_order(store, "X"); break;
          case 3: {
            OrderPayload c;
            c.order_id = "X";
            manage_order(store, OrderAction::Cancel, c);
            break;
          }
        }
        OrderStatus next = store.order("X").status;
        bool legal = (prev == OrderStatus::Created && next == OrderStatus::Validated) ||
                     (prev == OrderStatus::Validated && next == OrderStatus::InProgress) ||
                     (prev == OrderStatus::InProgress && next == OrderStatus::Completed) ||
                     (next == OrderStatus::Cancelled && prev != OrderStatus::Completed &&
                      prev != OrderStatus::Cancelled);
        CHECK(legal);
        prev = next;
      } catch (const TosError&) {
        CHECK(store.order("X").status == prev);  // rejected actions change nothing
      }
    }
  }
}

TEST_CASE("gate transaction walks the chain and stamps times") {
  OrderStore store;
  manage_order(store, OrderAction::Create, payload("O1", OrderType::ReceiveFullByTruck));
  validate_order(store, "O1");
  GateTransaction txn = truck("AA-11-BB", {"O1"});

  TimeMs t = 1000;
  std::vector<GateState> seen;
  for (int i = 0; i < 6; ++i) seen.push_back(gate_advance(txn, store, t += 60000));
  CHECK(seen == std::vector<GateState>{GateState::AdminChecked, GateState::InstructionIssued,
                                       GateState::PhysicalChecked, GateState::AtInterchange,
                                       GateState::Completed, GateState::Exited});
  CHECK_THROWS_AS(gate_advance(txn, store, t += 60000), TosError);
  // timestamps strictly along the chain
  for (std::size_t i = 1; i < txn.timestamps.size(); ++i) {
    CHECK(txn.timestamps[i].second > txn.timestamps[i - 1].second);
    CHECK(static_cast<int>(txn.timestamps[i].first) >
          static_cast<int>(txn.timestamps[i - 1].first));
  }
}

TEST_CASE("gate preconditions: validation, customs, holds") {
  OrderStore store;
  manage_order(store, OrderAction::Create, payload("O1", OrderType::ReceiveFullByTruck));
  GateTransaction txn = truck("AA-11-BB", {"O1"});

  SUBCASE("unvalidated order blocks") {
    try {
      gate_advance(txn, store, 1000);
      FAIL("expected OrderNotValidated");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::OrderNotValidated);
    }
  }
  SUBCASE("unpaid customs blocks") {
    validate_order(store, "O1");
    store.order("O1").customs_cleared = false;
    try {
      gate_advance(txn, store, 1000);
      FAIL("expected CustomsUnpaid");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::CustomsUnpaid);
    }
  }
  SUBCASE("active hold blocks until the right authority releases") {
    validate_order(store, "O1");
    apply_hold_to_order(store, "O1", {HoldAuthority::Customs, "inspection", true});
    try {
      gate_advance(txn, store, 1000);
      FAIL("expected HoldActive");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::HoldActive);
    }
    // the line cannot lift a customs hold
    try {
      release_hold_on_order(store, "O1", HoldAuthority::Line);
      FAIL("expected AuthorityMismatch");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::AuthorityMismatch);
    }
    release_hold_on_order(store, "O1", HoldAuthority::Customs);
    CHECK(gate_advance(txn, store, 1000) == GateState::AdminChecked);
  }
  SUBCASE("container-level hold blocks too") {
    validate_order(store, "O1");
    std::string cid = store.order("O1").container->str();
    apply_hold_to_container(store, cid, {HoldAuthority::PortAuthority, "billing", true});
    CHECK_THROWS_AS(gate_advance(txn, store, 1000), TosError);
    release_hold_on_container(store, cid, HoldAuthority::PortAuthority);
    CHECK_NOTHROW(gate_advance(txn, store, 1000));
    CHECK_THROWS_AS(release_hold_on_container(store, cid, HoldAuthority::PortAuthority),
                    TosError);  // NoSuchHold once released
  }
}

TEST_CASE("physical check compares field by field and lists every mismatch") {
  OrderStore store;
  OrderPayload p = payload("O1", OrderType::ReceiveFullByTruck);
  p.expected_seals = {"S1", "S2"};
  manage_order(store, OrderAction::Create, p);
  validate_order(store, "O1");
  GateTransaction txn = truck("AA-11-BB", {"O1"});
  gate_advance(txn, store, 1000);
  gate_advance(txn, store, 2000);
  REQUIRE(txn.state == GateState::InstructionIssued);

  ObservedTruck obs;
  obs.container_id = p.container->str();
  obs.plate = "AA-11-BB";
  obs.seals = {"S1", "S2"};

  SUBCASE("exact match passes") {
    auto res = physical_check(txn, store, obs);
    CHECK(res.pass);
    CHECK(res.mismatches.empty());
  }
  SUBCASE("seal mismatch is reported") {
    obs.seals = {"S1", "WRONG"};
    auto res = physical_check(txn, store, obs);
    CHECK_FALSE(res.pass);
    REQUIRE(res.mismatches.size() == 1);
    CHECK(res.mismatches[0].find("seals") != std::string::npos);
  }
  SUBCASE("two mismatches are both listed") {
    obs.seals = {"S1"};
    obs.plate = "ZZ-99-ZZ";
    auto res = physical_check(txn, store, obs);
    CHECK_FALSE(res.pass);
    CHECK(res.mismatches.size() == 2);
  }
  SUBCASE("wrong state rejects the check") {
    GateTransaction fresh = truck("BB-22-CC", {"O1"});
    try {
      physical_check(fresh, store, obs);
      FAIL("expected WrongState");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::WrongState);
    }
  }
}

TEST_CASE("reefer readings append in time order and alarm outside tolerance") {
  ReeferLog log;
  log.container = "TSTU0000015";
  log.connected = true;

  CHECK_FALSE(record_reefer(log, 1000, -17.5, -18.0, 2.0).has_value());
  auto alarm = record_reefer(log, 2000, -14.0, -18.0, 2.0);
  REQUIRE(alarm.has_value());
  CHECK(alarm->reading_c == -14.0);
  CHECK(log.readings.size() == 2);

  SUBCASE("time must not go backwards") {
    try {
      record_reefer(log, 1500, -18.0, -18.0, 2.0);
      FAIL("expected NonMonotonicTime");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::NonMonotonicTime);
    }
  }
  SUBCASE("disconnected unit rejects readings") {
    ReeferLog off;
    off.container = "X";
    off.connected = false;
    try {
      record_reefer(off, 1, -18, -18, 2);
      FAIL("expected NotConnected");
    } catch (const TosError& e) {
      CHECK(e.code() == Err::NotConnected);
    }
  }
  SUBCASE("boundary reading equal to tolerance does not alarm") {
    CHECK_FALSE(record_reefer(log, 3000, -16.0, -18.0, 2.0).has_value());
  }
}
