#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/ids.hpp"
#include "tos/types.hpp"

namespace tos {

// The service-request catalogue. Numbering follows the terminal's standard
// list of client services (1..20).
enum class OrderType {
  ReceiveFullByTruck = 1,
  DeliverEmptyToTruck = 2,
  DeliverFullToTruck = 3,
  ReceiveEmpty = 4,
  LoadOnVessel = 5,
  DischargeFromVessel = 6,
  VesselCall = 7,
  SealVerification = 8,
  SealWarehousing = 9,
  ContainerCondition = 10,
  ImoStickerControl = 11,
  CfsOperations = 12,
  FumigationCleaning = 13,
  Repositioning = 14,
  ChangeVesselService = 15,
  CustomsInspection = 16,
  VesselServices = 17,
  ReeferPreTrip = 18,
  Restow = 19,
  AuthorityBottleneck = 20,
};

const char* order_type_name(OrderType t);
OrderType parse_order_type(int number);

// Types that make no sense without a container attached.
bool order_requires_container(OrderType t);

enum class OrderStatus { Created, Validated, InProgress, Completed, Cancelled };

const char* order_status_name(OrderStatus s);

enum class HoldAuthority { Customs, PortAuthority, Line };

const char* hold_authority_name(HoldAuthority a);
HoldAuthority parse_hold_authority(std::string_view s);

struct Hold {
  HoldAuthority authority = HoldAuthority::Customs;
  std::string reason;
  bool active = true;
};

struct ServiceOrder {
  std::string order_id;
  OrderType type = OrderType::ReceiveFullByTruck;
  std::string client;  // partner id
  std::optional<ContainerId> container;
  std::optional<std::string> visit;
  OrderStatus status = OrderStatus::Created;
  TimeMs created_at = 0;
  std::vector<Hold> holds;
  std::string cancel_reason;
  // expected physicals for the gate check
  std::string expected_plate;
  std::vector<std::string> expected_seals;
  bool customs_cleared = false;

  bool terminal() const {
    return status == OrderStatus::Completed || status == OrderStatus::Cancelled;
  }
  bool has_active_hold() const;
};

enum class GateState {
  ArrivedPreGate,
  AdminChecked,
  InstructionIssued,
  PhysicalChecked,
  AtInterchange,
  Completed,
  Exited,
};

const char* gate_state_name(GateState s);

struct GateTransaction {
  std::string plate;
  std::vector<std::string> order_ids;  // one truck may carry several orders
  GateState state = GateState::ArrivedPreGate;
  std::vector<std::pair<GateState, TimeMs>> timestamps;
};

struct ReeferLog {
  std::string container;
  std::vector<std::pair<TimeMs, double>> readings;
  bool connected = false;
};

struct OrderStore {
  std::map<std::string, ServiceOrder> orders;
  std::map<std::string, Hold> container_holds;  // container id -> hold
  std::map<std::string, ReeferLog> reefer_logs;

  ServiceOrder& order(const std::string& id);
  const ServiceOrder* find(const std::string& id) const;
  bool container_held(const std::string& container_id) const;
};

// ---- operations ---------------------------------------------------------------

enum class OrderAction { Create, Amend, Cancel };

struct OrderPayload {
  std::string order_id;
  std::optional<OrderType> type;
  std::optional<std::string> client;
  std::optional<ContainerId> container;
  std::optional<std::string> visit;
  std::optional<std::string> expected_plate;
  std::optional<std::vector<std::string>> expected_seals;
  std::optional<bool> customs_cleared;
  std::string cancel_reason;
  TimeMs at = 0;
};

// Create -> status Created; Amend only touches non-identity fields (type,
// client and container are frozen after creation); Cancel from any
// non-terminal status.
ServiceOrder& manage_order(OrderStore& store, OrderAction action, const OrderPayload& payload);

void validate_order(OrderStore& store, const std::string& order_id);
void start_order(OrderStore& store, const std::string& order_id);
void complete_order(OrderStore& store, const std::string& order_id);

// Advances the transaction exactly one state along the gate chain after the
// admin prerequisites pass (orders validated, customs paid, nothing held).
GateState gate_advance(GateTransaction& txn, OrderStore& store, TimeMs at);

struct ObservedTruck {
  std::string container_id;
  std::string plate;
  std::vector<std::string> seals;
  bool imo_stickers_ok = true;
};

struct PhysicalCheckResult {
  bool pass = true;
  std::vector<std::string> mismatches;
};

// Field-by-field comparison of the pointer's observation against the order
// data; every mismatch is listed.
PhysicalCheckResult physical_check(const GateTransaction& txn, const OrderStore& store,
                                   const ObservedTruck& observed);

void apply_hold_to_order(OrderStore& store, const std::string& order_id, const Hold& hold);
void release_hold_on_order(OrderStore& store, const std::string& order_id,
                           HoldAuthority authority);
void apply_hold_to_container(OrderStore& store, const std::string& container_id,
                             const Hold& hold);
void release_hold_on_container(OrderStore& store, const std::string& container_id,
                               HoldAuthority authority);

struct ReeferAlarm {
  std::string container;
  TimeMs at = 0;
  double reading_c = 0;
  double setpoint_c = 0;
};

// Appends a reading; alarms when it strays more than `tolerance_c` from the
// setpoint. Readings must arrive in time order on a connected unit.
std::optional<ReeferAlarm> record_reefer(ReeferLog& log, TimeMs at, double reading_c,
                                         double setpoint_c, double tolerance_c);

}  // namespace tos
