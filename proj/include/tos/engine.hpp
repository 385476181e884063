#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tos/auth.hpp"
#include "tos/berth.hpp"
#include "tos/billing.hpp"
#include "tos/dispatch.hpp"
#include "tos/edifact_messages.hpp"
#include "tos/master.hpp"
#include "tos/orders.hpp"
#include "tos/report.hpp"
#include "tos/scenario.hpp"
#include "tos/vessel.hpp"
#include "tos/yard.hpp"

namespace tos {

// Everything the engine reads, as raw file texts. Snapshots embed these so a
// restored engine is self-contained (BAPLIE/MOVINS files referenced by not-
// yet-processed events are re-read from scenario_base_dir).
struct EngineInputs {
  std::string terminal_text;
  std::string tariffs_text;
  std::map<std::string, std::string> master_files;  // filename -> text
  std::string filters_text;
  std::string assignments_text;
  std::string stacking_keys;  // e.g. "HeavierOnTop"
  std::string imo_rules_text;
  std::string mapping_text;  // empty -> builtin subset
  std::string scenario_text;
  std::string scenario_base_dir;
  i64 seed = 0;
};

// Reads all input files for a run from their CLI paths.
EngineInputs gather_inputs(const std::string& scenario_path, const std::string& terminal_path,
                           const std::string& tariffs_path, const std::string& master_dir,
                           i64 seed);

struct RunOutputs {
  std::map<std::string, std::string> files;  // filename -> content
};

// Per-move bookkeeping the engine needs when a chain finishes.
enum class MoveKind { Discharge, Load, Rehandle, GateIn, GateOut };

const char* move_kind_name(MoveKind k);

struct MoveMeta {
  MoveKind kind = MoveKind::Discharge;
  bool restow = false;  // part of a shipboard restow pair; unbilled as moves
  std::string container;
  std::string visit;          // vessel moves
  std::string gate_plate;     // gate moves
  std::string order_id;       // gate moves
  std::string client;         // billed party
  std::optional<YardPosition> place_at;  // physical placement on final Set
  std::optional<CellAddress> cell;       // vessel cell
  std::string size_type;
  std::string collection;
  std::string vessel_binding;
};

struct VisitOps {
  enum class Phase { Waiting, Discharging, Loading, Finished };
  std::string visit_id;
  std::string client;
  Phase phase = Phase::Waiting;
  StowagePlan arrival_plan{""};
  StowagePlan load_plan{""};
  std::vector<MovinsInstruction> movins;
  std::vector<std::string> cranes;
  std::vector<ConfirmedMove> confirmed;
  std::set<i64> open_moves;
  std::vector<std::string> load_skips;  // held/missing containers, recorded
};

struct GateOps {
  GateTransaction txn;
  std::set<i64> open_moves;
  int retries = 0;
  bool parked = false;
};

class Engine {
 public:
  explicit Engine(EngineInputs inputs);

  // Processes every event to completion and produces the output tree.
  RunOutputs run();

  // Serialized full state; restore() continues a run mid-flight.
  // run(restore(snapshot at t)) tail-equals the uninterrupted run.
  std::string snapshot() const;
  static Engine restore(const std::string& snapshot_text);

  // Ask for a snapshot just before the first event at or after `t`.
  void set_snapshot_at(TimeMs t) { snapshot_at_ = t; }
  const std::string& pending_snapshot() const { return pending_snapshot_; }

  // test/tooling access
  const YardState& yard() const { return physical_; }
  const YardLayout& layout() const { return terminal_.layout; }
  const MasterStore& master() const { return master_; }
  const std::vector<HistoryEntry>& history() const { return sim_.history(); }
  const AuditLog& audit() const { return audit_; }
  const std::vector<Invoice>& invoices() const { return invoices_; }
  const BerthPlan& berth_plan() const { return berth_; }

  // Occupancy trace for safety audits: a copy of the yard and of every stow
  // plan after each physical mutation. Off by default.
  void enable_traces() { record_traces_ = true; }
  const std::vector<YardState>& yard_trace() const { return yard_trace_; }
  const std::vector<std::pair<std::string, StowagePlan>>& stow_trace() const {
    return stow_trace_;
  }

 private:
  // --- static configuration (parsed from inputs, never mutated) ---
  EngineInputs inputs_;
  TerminalFile terminal_;
  TariffBook tariffs_;
  MasterStore master_;
  std::vector<CollectionFilter> filters_;
  std::vector<AreaAssignment> assignments_;
  StackingPolicy stacking_;
  ImoRuleTable imo_;
  EdiMapping mapping_;
  Scenario scenario_;

  std::string local_port_;
  double clearance_m_ = 10;
  double crane_rate_ = 25;  // moves/hour/crane
  TimeMs gate_step_ms_ = 0;
  TimeMs gate_retry_ms_ = 0;
  int gate_max_retries_ = 0;
  double reefer_tolerance_c_ = 2.0;
  std::set<std::string> unavailable_zones_;

  // --- dynamic state ---
  DispatchSim sim_;
  YardState physical_;
  YardState planned_;
  BerthPlan berth_;
  OrderStore orders_;
  std::map<std::string, VisitOps> visits_;
  std::map<std::string, GateOps> gates_;
  std::map<i64, MoveMeta> move_meta_;
  i64 next_move_id_ = 1;
  std::size_t next_scenario_idx_ = 0;
  // per-stack and per-crane serialization: last move touching the resource
  std::map<std::string, std::pair<i64, std::size_t>> last_touch_;

  std::map<std::string, Container> known_boxes_;  // registered via orders/EDI
  std::vector<BillingEvent> billing_events_;
  i64 next_billing_id_ = 1;
  std::vector<Advance> advances_;
  std::vector<Invoice> invoices_;
  InvoiceSequence invoice_seq_{0};
  std::map<std::string, TimeMs> storage_in_;          // container -> gate/quay in time
  std::map<std::string, std::string> storage_client_; // container -> billed client
  std::vector<StorageInterval> closed_storage_;
  std::map<std::string, ContainerTrafficInfo> traffic_;

  std::vector<GateEvent> gate_events_;  // CODECO
  std::map<std::string, std::string> list_exports_;  // per-visit work lists
  std::vector<std::string> instruction_docs_;
  std::vector<std::string> run_log_;
  std::vector<ReeferAlarm> reefer_alarms_;
  i64 work_accidents_ = 0;
  AuditLog audit_;

  // conservation counters; the base is the yard population when the run
  // originally started (carried through snapshots)
  i64 discharged_ = 0, loaded_ = 0, gate_in_ = 0, gate_out_ = 0;
  i64 conservation_base_ = 0;

  std::map<std::string, EdifactDocument> edi_out_;  // filename -> document
  int edi_ref_ = 1;

  TimeMs run_begin_ = 0;
  TimeMs snapshot_at_ = -1;
  std::string pending_snapshot_;
  bool record_traces_ = false;
  std::vector<YardState> yard_trace_;
  std::vector<std::pair<std::string, StowagePlan>> stow_trace_;

  // --- plumbing ---
  void parse_inputs();
  void log(TimeMs at, const std::string& what);
  void audit_cmd(TimeMs at, const std::string& user, const std::string& command);
  std::string next_edi_ref();

  // scenario handlers
  void handle_scenario(const ScenarioEvent& e);
  void on_vessel_arrival(const ScenarioEvent& e);
  void on_truck_arrival(const ScenarioEvent& e);
  void on_order_intake(const ScenarioEvent& e);
  void on_hold(const ScenarioEvent& e);
  void on_lock(const ScenarioEvent& e);
  void on_reefer(const ScenarioEvent& e);

  // vessel flow
  void begin_vessel_work(const std::string& visit_id);
  void start_load_phase(VisitOps& ops);
  void finish_visit(VisitOps& ops);

  // gate flow
  void gate_step(const std::string& plate);
  void start_interchange(GateOps& g);
  void finish_gate(GateOps& g);
  void run_service_order(const std::string& order_id);

  // chain plumbing
  i64 new_move(MoveMeta meta, const std::string& from, const std::string& to,
               const std::string& required_quay_crane = "");
  void gate_leg_on_stack(i64 move_id, std::size_t leg_index, const YardPosition& pos);
  void gate_leg_on_prev(i64 move_id, std::size_t leg_index, i64 prev_move,
                        std::size_t prev_leg);
  std::vector<i64> dig_out(const std::string& container_id, const std::string& client);
  void on_leg_complete(const Completion& c);
  void on_chain_done(i64 move_id);

  Container container_from_entry(const StowEntry& e) const;
  Container container_from_order(const ServiceOrder& o) const;
  YardPosition plan_into_yard(const Container& c, const std::string& service,
                              const std::string& vessel_binding);

  void add_billing_event(const std::string& record_type, const std::string& service_code,
                         const std::string& client, const std::string& container, i64 qty,
                         TimeMs at, EventSource source = EventSource::Tos);
  void open_storage(const std::string& container, const std::string& client, TimeMs at);
  void close_storage(const std::string& container, TimeMs at);

  void trace_yard();
  void trace_stow(const std::string& visit_id, const StowagePlan& plan);
  void check_conservation() const;

  RunOutputs collect_outputs();
};

}  // namespace tos
