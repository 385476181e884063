#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tos/edifact_messages.hpp"
#include "tos/yard.hpp"

namespace tos {

// Cell-indexed stowage for one visit. add() enforces bounds, duplicate
// cells, stack weight/height limits and gravity against the profile.
class StowagePlan {
 public:
  explicit StowagePlan(std::string visit_id = "") : visit_id_(std::move(visit_id)) {}

  void add(const StowEntry& e, const VesselProfile& profile);
  // For deltas kept against an external base plan: skips the stack checks
  // (the caller validates against the combined plan).
  void add_unchecked(const StowEntry& e);
  void remove(const CellAddress& cell);
  const StowEntry* at(const CellAddress& cell) const;

  const std::string& visit_id() const { return visit_id_; }
  const std::map<CellAddress, StowEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  i64 stack_weight(int bay, int row) const;
  int stack_height(int bay, int row) const;

  // Full invariant sweep used by tests and snapshot audits.
  void check_invariants(const VesselProfile& profile) const;

 private:
  std::string visit_id_;
  std::map<CellAddress, StowEntry> entries_;
};

// Entries bound for the local port, top tier first within each stack
// (stacks in bay-then-row order). `extra_containers` forces entries ashore
// regardless of POD (restow pairs).
std::vector<StowEntry> build_discharge_list(const StowagePlan& plan,
                                            const std::string& local_port);
std::vector<StowEntry> build_discharge_list(const StowagePlan& plan,
                                            const std::string& local_port,
                                            const std::set<std::string>& extra_containers);

struct LoadList {
  std::vector<MovinsInstruction> loadable;  // instructed and present in the yard
  std::vector<MovinsInstruction> missing;   // instructed but absent
  std::vector<std::string> duplicates;      // repeated container ids, first kept
};

LoadList build_load_list(const std::vector<MovinsInstruction>& instructions,
                         const YardState& yard);

struct LoadItem {
  ContainerId container;
  std::string size_type;
  i64 weight_kg = 0;
  std::string pod;
  std::optional<int> bay_preference;
};

// Places each item in its preferred bay when a feasible cell exists there,
// otherwise the first feasible cell in canonical order (bay, row, tier
// ascending). Returns the stowage delta; per-item notes record preferred
// bays that were skipped (full or over weight).
struct StowResult {
  StowagePlan delta;
  std::vector<std::string> notes;
};

StowResult assign_stow_positions(const std::vector<LoadItem>& loadable,
                                 const VesselProfile& profile, const std::string& visit_id,
                                 const StowagePlan& existing = StowagePlan{});

struct MoveInstruction {
  MovinsKind kind = MovinsKind::Load;
  ContainerId container;
  std::string size_type;
  std::optional<YardPosition> yard_pos;  // origin (loads) / destination (discharges)
  std::optional<CellAddress> cell;       // vessel cell
};

struct WorkQueue {
  std::string crane_id;
  std::vector<MoveInstruction> moves;
};

// Splits bays into contiguous ranges, one per crane, minimizing the largest
// move count (cranes cannot cross each other). Loads go bottom-tier-first;
// in mixed queues discharges precede loads within a bay.
std::vector<WorkQueue> sequence_loading(const StowagePlan& delta, const YardState& yard,
                                        const std::vector<std::string>& cranes);

std::vector<WorkQueue> sequence_moves(const std::vector<StowEntry>& discharges,
                                      const StowagePlan& load_delta, const YardState& yard,
                                      const std::vector<std::string>& cranes);

// Yard rehandles the load queues would induce: containers leave the yard in
// queue order, blockers relocate greedily (one auxiliary stack).
int detect_restows(const std::vector<WorkQueue>& queues, const YardState& yard);

// Delimited exports of the working lists.
std::string stow_entries_to_psv(const std::vector<StowEntry>& entries);
std::string load_list_to_psv(const LoadList& list);

}  // namespace tos
