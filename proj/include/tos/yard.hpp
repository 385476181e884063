#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/layout.hpp"
#include "tos/types.hpp"

namespace tos {

// Operator-defined grouping of containers into collections. All present
// predicates must match; lowest priority number wins among matches.
struct CollectionFilter {
  std::string id;
  int priority = 0;
  std::optional<int> length_ft;
  std::optional<i64> weight_min_kg;
  std::optional<i64> weight_max_kg;
  std::optional<std::string> service;
  std::optional<std::string> pol;
  std::optional<std::string> pod;
  std::optional<Transaction> transaction;

  bool has_predicate() const;
  bool matches(const Container& c, const SizeTypeTable& table,
               const std::string& service_ctx) const;
};

enum class AreaStrategy { Grouped, Scattered };

const char* strategy_name(AreaStrategy s);

// Strategy 1 groups a collection into one area; Strategy 2 scatters it over
// several zones so RTG work splits evenly. Import defaults to Grouped,
// transshipment to Scattered.
AreaStrategy default_strategy(Transaction t);

struct AreaAssignment {
  std::string filter_id;
  std::vector<std::string> zones;  // preference order
  AreaStrategy strategy = AreaStrategy::Grouped;
};

enum class StackRule {
  HeavierOnTop,   // candidate weight >= weight below (the configured default)
  LighterOnTop,
  SamePod,
  SameVessel,
};

StackRule parse_stack_rule(std::string_view s);
const char* stack_rule_name(StackRule r);

struct StackingPolicy {
  std::vector<StackRule> rules;  // all must hold against the stack top
  std::optional<int> max_tier_override;
};

// Pairwise IMO segregation: either a minimum Chebyshev bay/row distance
// within a block, or a full prohibition. Symmetric by construction.
class ImoRuleTable {
 public:
  struct Rule {
    bool prohibited = false;
    int min_distance = 0;  // slots, Chebyshev over (bay, row)
  };

  void set_rule(const std::string& class_a, const std::string& class_b, Rule rule);
  std::optional<Rule> rule_for(const ImoClass& a, const ImoClass& b) const;

  // When set, Prohibited pairs conflict across the whole terminal, not just
  // inside one block.
  bool prohibited_terminal_wide = false;

  static ImoRuleTable load(const std::string& path);
  static ImoRuleTable from_file(const DelimitedFile& f);

 private:
  std::map<std::pair<std::string, std::string>, Rule> rules_;
};

enum class YardMoveKind { Plan, Manual, Remove };

struct YardMoveLogEntry {
  std::string container;
  std::optional<YardPosition> from;
  std::optional<YardPosition> to;
  YardMoveKind kind = YardMoveKind::Plan;
};

struct StoredContainer {
  Container box;
  YardPosition pos;
  std::string collection;  // classifying filter id, "" if manually planned
  std::string vessel;      // visit binding, "" if none
};

// Yard occupancy: container -> position bijection with gravity (no floating
// tiers). Mutations validate both invariants.
class YardState {
 public:
  void place(const Container& box, const YardPosition& pos, const YardLayout& layout,
             const std::string& collection = "", const std::string& vessel = "");
  Container remove(const ContainerId& id);

  bool occupied(const YardPosition& pos) const { return by_pos_.count(pos) > 0; }
  const StoredContainer* find(const ContainerId& id) const;
  const StoredContainer* find(const std::string& id_str) const;
  const std::string* at(const YardPosition& pos) const;
  int stack_height(const std::string& block, int bay, int row) const;
  // Container id at the top of a stack; nullptr for empty stacks.
  const StoredContainer* stack_top(const std::string& block, int bay, int row) const;
  std::vector<std::string> stack_ids(const std::string& block, int bay, int row) const;

  std::size_t size() const { return by_id_.size(); }
  const std::map<std::string, StoredContainer>& all() const { return by_id_; }
  int count_in_zone(const std::string& zone, const YardLayout& layout) const;
  int count_collection_in_zone(const std::string& collection, const std::string& zone,
                               const YardLayout& layout) const;

  const std::vector<YardMoveLogEntry>& move_log() const { return move_log_; }

  // Both maps agree and every occupied tier rests on an occupied tier below.
  void check_invariants(const YardLayout& layout) const;

 private:
  std::map<std::string, StoredContainer> by_id_;
  std::map<YardPosition, std::string> by_pos_;
  std::vector<YardMoveLogEntry> move_log_;
};

// Lowest-priority-number matching filter, or nullopt for the manual queue.
std::optional<std::string> classify_container(const Container& c,
                                              const std::vector<CollectionFilter>& filters,
                                              const SizeTypeTable& table,
                                              const std::string& service_ctx = "");

struct ImoCheckResult {
  bool ok = true;
  YardPosition other_pos;  // offending neighbour when !ok
  std::string reason;
};

ImoCheckResult check_imo_placement(const YardState& state, const YardLayout& layout,
                                   const YardPosition& pos, const ImoClass& cls,
                                   const ImoRuleTable& table);

// Slot selection under the assignment strategy, stacking policy, IMO table,
// tier limits and block-kind routing (reefer boxes to Reefer blocks, IMO
// boxes to Imo blocks, nothing planned into Interchange blocks).
YardPosition plan_slot(const Container& c, const AreaAssignment& assignment,
                       const YardState& state, const YardLayout& layout,
                       const ImoRuleTable& imo, const StackingPolicy& policy,
                       const SizeTypeTable& table, const std::string& vessel_ctx = "");

// Greedy relocation count: blockers above each retrieval target move to the
// lowest-indexed other stack and may be recounted when they block again.
// Stack and aux stacks are bottom-to-top id lists; stack index 0 is the
// origin.
int estimate_rehandles(const std::vector<std::string>& stack,
                       const std::vector<std::string>& retrieval_order, int aux_stacks = 1);

struct ZoneCapacity {
  int slots = 0;
  int occupied = 0;
  int free_slots = 0;
  double pct = 0.0;
};

std::map<std::string, ZoneCapacity> capacity_report(const YardState& state,
                                                    const YardLayout& layout);

// Operator drag-and-drop: atomic re-position with gravity checks on both
// ends; logged as Manual.
void manual_override(YardState& state, const ContainerId& id, const YardPosition& new_pos,
                     const YardLayout& layout);

// ---- config loaders ---------------------------------------------------------

std::vector<CollectionFilter> load_filters(const std::string& path);
std::vector<CollectionFilter> parse_filters(const DelimitedFile& f);
std::vector<AreaAssignment> load_assignments(const std::string& path,
                                             const std::vector<CollectionFilter>& filters,
                                             const YardLayout& layout);
// An empty strategy column falls back to the transaction default of the
// filter (Grouped for import/export, Scattered for transshipment).
std::vector<AreaAssignment> parse_assignments(const DelimitedFile& f,
                                              const std::vector<CollectionFilter>& filters,
                                              const YardLayout& layout);
StackingPolicy parse_stacking_policy(std::string_view keys, std::optional<int> max_tier = {});

}  // namespace tos
