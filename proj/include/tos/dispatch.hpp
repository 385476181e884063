#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/layout.hpp"
#include "tos/types.hpp"

namespace tos {

enum class LegAction { Lift, Haul, Set };
enum class LegStatus { Pending, Assigned, Running, Done };

const char* leg_action_name(LegAction a);
const char* leg_status_name(LegStatus s);

struct Leg {
  EquipmentKind kind = EquipmentKind::Tractor;
  std::string from;
  std::string to;
  LegAction action = LegAction::Haul;
  LegStatus status = LegStatus::Pending;
  std::string equipment;  // set once assigned
  TimeMs start = 0;
  TimeMs end = 0;
  double empty_travel_m = 0;
  double laden_travel_m = 0;
  // cross-chain ordering: this leg may not start until each referenced
  // (move, leg) is Done. Keeps stack and crane work physically sequential.
  std::vector<std::pair<i64, std::size_t>> prereqs;
  // pins the leg to one specific unit (e.g. the crane owning the bay range)
  std::string required_equipment;
};

// One container move expanded into sequential equipment legs
// (yard crane -> tractor -> quay crane, or the reverse).
struct JobChain {
  i64 move_id = 0;
  std::vector<Leg> legs;
  std::string container;
  bool rehandle = false;  // restows/reshuffles count as unproductive

  bool done() const;
  // Index of the first leg that is Pending with all predecessors Done.
  std::optional<std::size_t> ready_leg() const;
};

// Expands a container move between two travel-graph nodes. Quay endpoints
// get the three-leg chain from the operating procedure; zone-to-zone moves
// use yard cranes on both ends; a move inside one zone is a single yard
// crane leg.
JobChain expand_move(i64 move_id, const std::string& container, const std::string& from,
                     const std::string& to, const YardLayout& layout);

struct EquipmentState {
  EquipmentSpec spec;
  std::string position;  // travel-graph node
  TimeMs busy_until = 0;
  std::optional<std::pair<i64, std::size_t>> current;  // (move_id, leg index)
};

struct HistoryEntry {
  std::string equipment;
  EquipmentKind kind = EquipmentKind::Tractor;
  i64 move_id = 0;
  std::size_t leg_index = 0;
  LegAction action = LegAction::Haul;
  std::string container;
  TimeMs start = 0;
  TimeMs end = 0;
  double empty_travel_m = 0;
  double laden_travel_m = 0;
  bool rehandle = false;
};

struct SimEvent {
  TimeMs time = 0;
  i64 seq = 0;
  enum class Kind { LegComplete, Callback } kind = Kind::LegComplete;
  i64 move_id = 0;
  std::size_t leg_index = 0;
  std::string tag;  // engine callbacks carry an opaque tag
};

// Next-event clock: time never decreases; ties break on the insertion
// sequence number.
class SimClock {
 public:
  TimeMs now() const { return now_; }
  void advance_to(TimeMs t);
  bool empty() const { return queue_.empty(); }
  TimeMs next_time() const;
  void push(SimEvent e);  // assigns the sequence number
  SimEvent pop();         // advances now to the event time

  const std::map<std::pair<TimeMs, i64>, SimEvent>& pending() const { return queue_; }
  i64 next_seq() const { return next_seq_; }
  void restore_seq(i64 seq) { next_seq_ = seq; }
  void restore_now(TimeMs t) { now_ = t; }

 private:
  TimeMs now_ = 0;
  i64 next_seq_ = 0;
  std::map<std::pair<TimeMs, i64>, SimEvent> queue_;
};

struct Assignment {
  i64 move_id = 0;
  std::size_t leg_index = 0;
  std::string equipment;
};

struct Completion {
  i64 move_id = 0;
  std::size_t leg_index = 0;
  TimeMs at = 0;
  bool chain_done = false;
  std::string callback_tag;  // non-empty for Callback events
};

struct IdleEntry {
  std::string equipment;
  TimeMs idle_since = 0;
  TimeMs idle_for = 0;
};

// Owns the chains, the fleet and the clock; the engine drives it and also
// parks its own timed callbacks on the same queue so everything shares one
// deterministic timeline.
class DispatchSim {
 public:
  explicit DispatchSim(const YardLayout* layout = nullptr) : layout_(layout) {}

  void set_layout(const YardLayout* layout) { layout_ = layout; }
  void add_equipment(const EquipmentSpec& spec);
  void add_chain(JobChain chain);
  void push_callback(TimeMs at, const std::string& tag);

  // Assigns every ready leg to the idle unit of the required kind with the
  // least empty travel (ties: lower equipment id); schedules completions.
  std::vector<Assignment> dispatch_next();

  // Pops the earliest event. LegComplete events confirm the leg (driver
  // confirmation is simulated); Callback events surface to the caller.
  Completion advance_clock();

  // Marks a Running leg Done, frees the equipment at now, readies the
  // successor and appends history.
  void record_confirmation(i64 move_id, std::size_t leg_index);

  std::vector<IdleEntry> idle_report() const;

  bool all_done() const;
  bool has_pending_events() const { return !clock_.empty(); }

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }
  const std::map<i64, JobChain>& chains() const { return chains_; }
  const JobChain& chain(i64 move_id) const;
  const std::map<std::string, EquipmentState>& fleet() const { return fleet_; }
  EquipmentState& equipment(const std::string& id);
  const std::vector<HistoryEntry>& history() const { return history_; }

  // internal-state access for snapshots
  std::map<i64, JobChain>& chains_mut() { return chains_; }
  std::map<std::string, EquipmentState>& fleet_mut() { return fleet_; }
  std::vector<HistoryEntry>& history_mut() { return history_; }

 private:
  const YardLayout* layout_ = nullptr;
  SimClock clock_;
  std::map<i64, JobChain> chains_;
  std::map<std::string, EquipmentState> fleet_;
  std::vector<HistoryEntry> history_;
};

// History export, one leg per line.
std::string history_to_psv(const std::vector<HistoryEntry>& history);

}  // namespace tos
