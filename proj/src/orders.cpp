#include "tos/orders.hpp"

#include <algorithm>
#include <cmath>

namespace tos {

const char* order_type_name(OrderType t) {
  switch (t) {
    case OrderType::ReceiveFullByTruck: return "ReceiveFullByTruck";
    case OrderType::DeliverEmptyToTruck: return "DeliverEmptyToTruck";
    case OrderType::DeliverFullToTruck: return "DeliverFullToTruck";
    case OrderType::ReceiveEmpty: return "ReceiveEmpty";
    case OrderType::LoadOnVessel: return "LoadOnVessel";
    case OrderType::DischargeFromVessel: return "DischargeFromVessel";
    case OrderType::VesselCall: return "VesselCall";
    case OrderType::SealVerification: return "SealVerification";
    case OrderType::SealWarehousing: return "SealWarehousing";
    case OrderType::ContainerCondition: return "ContainerCondition";
    case OrderType::ImoStickerControl: return "ImoStickerControl";
    case OrderType::CfsOperations: return "CfsOperations";
    case OrderType::FumigationCleaning: return "FumigationCleaning";
    case OrderType::Repositioning: return "Repositioning";
    case OrderType::ChangeVesselService: return "ChangeVesselService";
    case OrderType::CustomsInspection: return "CustomsInspection";
    case OrderType::VesselServices: return "VesselServices";
    case OrderType::ReeferPreTrip: return "ReeferPreTrip";
    case OrderType::Restow: return "Restow";
    case OrderType::AuthorityBottleneck: return "AuthorityBottleneck";
  }
  return "?";
}

OrderType parse_order_type(int number) {
  if (number < 1 || number > 20)
    fail(Err::ParseError, "order type " + std::to_string(number) + " outside 1..20");
  return static_cast<OrderType>(number);
}

bool order_requires_container(OrderType t) {
  switch (t) {
    case OrderType::VesselCall:
    case OrderType::SealWarehousing:
    case OrderType::VesselServices:
    case OrderType::Restow:
    case OrderType::AuthorityBottleneck:
      return false;
    default:
      return true;
  }
}

const char* order_status_name(OrderStatus s) {
  switch (s) {
    case OrderStatus::Created: return "Created";
    case OrderStatus::Validated: return "Validated";
    case OrderStatus::InProgress: return "InProgress";
    case OrderStatus::Completed: return "Completed";
    case OrderStatus::Cancelled: return "Cancelled";
  }
  return "?";
}

const char* hold_authority_name(HoldAuthority a) {
  switch (a) {
    case HoldAuthority::Customs: return "Customs";
    case HoldAuthority::PortAuthority: return "PortAuthority";
    case HoldAuthority::Line: return "Line";
  }
  return "?";
}

HoldAuthority parse_hold_authority(std::string_view s) {
  if (s == "Customs") return HoldAuthority::Customs;
  if (s == "PortAuthority") return HoldAuthority::PortAuthority;
  if (s == "Line") return HoldAuthority::Line;
  fail(Err::ParseError, "unknown hold authority '" + std::string(s) + "'");
}

bool ServiceOrder::has_active_hold() const {
  return std::any_of(holds.begin(), holds.end(), [](const Hold& h) { return h.active; });
}

const char* gate_state_name(GateState s) {
  switch (s) {
    case GateState::ArrivedPreGate: return "ArrivedPreGate";
    case GateState::AdminChecked: return "AdminChecked";
    case GateState::InstructionIssued: return "InstructionIssued";
    case GateState::PhysicalChecked: return "PhysicalChecked";
    case GateState::AtInterchange: return "AtInterchange";
    case GateState::Completed: return "Completed";
    case GateState::Exited: return "Exited";
  }
  return "?";
}

ServiceOrder& OrderStore::order(const std::string& id) {
  auto it = orders.find(id);
  if (it == orders.end()) fail(Err::UnknownOrder, id);
  return it->second;
}

const ServiceOrder* OrderStore::find(const std::string& id) const {
  auto it = orders.find(id);
  return it == orders.end() ? nullptr : &it->second;
}

bool OrderStore::container_held(const std::string& container_id) const {
  auto it = container_holds.find(container_id);
  if (it != container_holds.end() && it->second.active) return true;
  for (const auto& [id, o] : orders)
    if (o.container && o.container->str() == container_id && !o.terminal() &&
        o.has_active_hold())
      return true;
  return false;
}

// ---- order lifecycle -----------------------------------------------------------

ServiceOrder& manage_order(OrderStore& store, OrderAction action, const OrderPayload& payload) {
  switch (action) {
    case OrderAction::Create: {
      if (payload.order_id.empty()) fail(Err::ValidationFailed, "order id empty");
      if (store.orders.count(payload.order_id)) fail(Err::DuplicateId, payload.order_id);
      if (!payload.type) fail(Err::ValidationFailed, "order type required");
      ServiceOrder o;
      o.order_id = payload.order_id;
      o.type = *payload.type;
      o.client = payload.client.value_or("");
      o.container = payload.container;
      o.visit = payload.visit;
      o.created_at = payload.at;
      if (payload.expected_plate) o.expected_plate = *payload.expected_plate;
      if (payload.expected_seals) o.expected_seals = *payload.expected_seals;
      if (payload.customs_cleared) o.customs_cleared = *payload.customs_cleared;
      if (order_requires_container(o.type) && !o.container)
        fail(Err::MissingContainer, "order type " + std::string(order_type_name(o.type)) +
                                        " needs a container");
      return store.orders.emplace(o.order_id, std::move(o)).first->second;
    }
    case OrderAction::Amend: {
      ServiceOrder& o = store.order(payload.order_id);
      if (o.terminal())
        fail(Err::TerminalStatus, payload.order_id + " is " + order_status_name(o.status));
      // identity fields (type, client, container) are frozen after creation
      if (payload.type && *payload.type != o.type)
        fail(Err::ValidationFailed, payload.order_id + ": order type is immutable");
      if (payload.container &&
          (!o.container || !(*payload.container == *o.container)))
        fail(Err::ValidationFailed, payload.order_id + ": container binding is immutable");
      if (payload.client && *payload.client != o.client)
        fail(Err::ValidationFailed, payload.order_id + ": client is immutable");
      if (payload.visit) o.visit = payload.visit;  // type 15: re-bind to another visit
      if (payload.expected_plate) o.expected_plate = *payload.expected_plate;
      if (payload.expected_seals) o.expected_seals = *payload.expected_seals;
      if (payload.customs_cleared) o.customs_cleared = *payload.customs_cleared;
      return o;
    }
    case OrderAction::Cancel: {
      ServiceOrder& o = store.order(payload.order_id);
      if (o.terminal())
        fail(Err::TerminalStatus, payload.order_id + " is " + order_status_name(o.status));
      o.status = OrderStatus::Cancelled;
      o.cancel_reason = payload.cancel_reason;
      return o;
    }
  }
  fail(Err::ValidationFailed, "unreachable order action");
}

namespace {

void step_status(ServiceOrder& o, OrderStatus from, OrderStatus to) {
  if (o.status != from)
    fail(Err::OutOfOrderTransition, o.order_id + " is " + order_status_name(o.status) +
                                        ", expected " + order_status_name(from));
  o.status = to;
}

}  // namespace

void validate_order(OrderStore& store, const std::string& order_id) {
  step_status(store.order(order_id), OrderStatus::Created, OrderStatus::Validated);
}

void start_order(OrderStore& store, const std::string& order_id) {
  step_status(store.order(order_id), OrderStatus::Validated, OrderStatus::InProgress);
}

void complete_order(OrderStore& store, const std::string& order_id) {
  step_status(store.order(order_id), OrderStatus::InProgress, OrderStatus::Completed);
}

// ---- gate ----------------------------------------------------------------------

GateState gate_advance(GateTransaction& txn, OrderStore& store, TimeMs at) {
  if (txn.order_ids.empty())
    fail(Err::ValidationFailed, "gate transaction " + txn.plate + " carries no orders");
  if (txn.state == GateState::Exited)
    fail(Err::OutOfOrderTransition, txn.plate + " already exited");

  // admin prerequisites hold for every state change up to the interchange
  for (const auto& oid : txn.order_ids) {
    const ServiceOrder& o = store.order(oid);
    if (o.status == OrderStatus::Created || o.status == OrderStatus::Cancelled)
      fail(Err::OrderNotValidated, oid + " is " + order_status_name(o.status));
    if (o.has_active_hold()) fail(Err::HoldActive, oid + " carries an active hold");
    if (o.container && store.container_held(o.container->str()))
      fail(Err::HoldActive, o.container->str() + " is held");
    if (!o.customs_cleared) fail(Err::CustomsUnpaid, oid + ": customs clearance unpaid");
  }

  txn.state = static_cast<GateState>(static_cast<int>(txn.state) + 1);
  if (!txn.timestamps.empty() && txn.timestamps.back().second > at)
    fail(Err::NonMonotonicTime, txn.plate + ": gate timestamps must not decrease");
  txn.timestamps.emplace_back(txn.state, at);
  return txn.state;
}

PhysicalCheckResult physical_check(const GateTransaction& txn, const OrderStore& store,
                                   const ObservedTruck& observed) {
  if (txn.state != GateState::InstructionIssued)
    fail(Err::WrongState, txn.plate + " is at " + gate_state_name(txn.state) +
                              ", physical check happens after InstructionIssued");
  PhysicalCheckResult result;
  if (observed.plate != txn.plate)
    result.mismatches.push_back("plate: expected " + txn.plate + ", saw " + observed.plate);

  // find the order the observed container belongs to
  const ServiceOrder* match = nullptr;
  for (const auto& oid : txn.order_ids) {
    const ServiceOrder* o = store.find(oid);
    if (o && o->container && o->container->str() == observed.container_id) {
      match = o;
      break;
    }
  }
  if (!match) {
    if (!observed.container_id.empty())
      result.mismatches.push_back("container: " + observed.container_id +
                                  " not on any order of this truck");
  } else {
    if (match->expected_seals != observed.seals) {
      std::string want = join(match->expected_seals, ',');
      std::string got = join(observed.seals, ',');
      result.mismatches.push_back("seals: expected [" + want + "], saw [" + got + "]");
    }
    if (!observed.imo_stickers_ok) result.mismatches.push_back("imo stickers: check failed");
  }
  result.pass = result.mismatches.empty();
  return result;
}

// ---- holds ---------------------------------------------------------------------

void apply_hold_to_order(OrderStore& store, const std::string& order_id, const Hold& hold) {
  store.order(order_id).holds.push_back(hold);
}

void release_hold_on_order(OrderStore& store, const std::string& order_id,
                           HoldAuthority authority) {
  ServiceOrder& o = store.order(order_id);
  bool found_any = false;
  for (auto& h : o.holds) {
    if (!h.active) continue;
    found_any = true;
    if (h.authority == authority) {
      h.active = false;
      return;
    }
  }
  if (found_any)
    fail(Err::AuthorityMismatch,
         order_id + ": no active hold imposed by " + hold_authority_name(authority));
  fail(Err::NoSuchHold, order_id + " has no active hold");
}

void apply_hold_to_container(OrderStore& store, const std::string& container_id,
                             const Hold& hold) {
  store.container_holds[container_id] = hold;
}

void release_hold_on_container(OrderStore& store, const std::string& container_id,
                               HoldAuthority authority) {
  auto it = store.container_holds.find(container_id);
  if (it == store.container_holds.end() || !it->second.active)
    fail(Err::NoSuchHold, container_id + " has no active hold");
  if (it->second.authority != authority)
    fail(Err::AuthorityMismatch, container_id + ": hold belongs to " +
                                     hold_authority_name(it->second.authority));
  it->second.active = false;
}

// ---- reefer --------------------------------------------------------------------

std::optional<ReeferAlarm> record_reefer(ReeferLog& log, TimeMs at, double reading_c,
                                         double setpoint_c, double tolerance_c) {
  if (!log.connected) fail(Err::NotConnected, log.container + " is not on power");
  if (!log.readings.empty() && log.readings.back().first > at)
    fail(Err::NonMonotonicTime, log.container + ": reading at " + format_iso8601(at) +
                                    " precedes the last one");
  log.readings.emplace_back(at, reading_c);
  if (std::abs(reading_c - setpoint_c) > tolerance_c)
    return ReeferAlarm{log.container, at, reading_c, setpoint_c};
  return std::nullopt;
}

}  // namespace tos
