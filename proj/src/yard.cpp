#include "tos/yard.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tos {

bool CollectionFilter::has_predicate() const {
  return length_ft || weight_min_kg || weight_max_kg || service || pol || pod || transaction;
}

bool CollectionFilter::matches(const Container& c, const SizeTypeTable& table,
                               const std::string& service_ctx) const {
  if (length_ft && table.decode(c.size_type).length_ft != *length_ft) return false;
  if (weight_min_kg && c.gross_weight_kg < *weight_min_kg) return false;
  if (weight_max_kg && c.gross_weight_kg > *weight_max_kg) return false;
  if (service && service_ctx != *service) return false;
  if (pol && c.pol != *pol) return false;
  if (pod && c.pod != *pod) return false;
  if (transaction && c.transaction != *transaction) return false;
  return true;
}

const char* strategy_name(AreaStrategy s) {
  return s == AreaStrategy::Grouped ? "Grouped" : "Scattered";
}

AreaStrategy default_strategy(Transaction t) {
  return t == Transaction::Transshipment ? AreaStrategy::Scattered : AreaStrategy::Grouped;
}

StackRule parse_stack_rule(std::string_view s) {
  if (s == "HeavierOnTop") return StackRule::HeavierOnTop;
  if (s == "LighterOnTop") return StackRule::LighterOnTop;
  if (s == "SamePod") return StackRule::SamePod;
  if (s == "SameVessel") return StackRule::SameVessel;
  fail(Err::ParseError, "unknown stacking rule '" + std::string(s) + "'");
}

const char* stack_rule_name(StackRule r) {
  switch (r) {
    case StackRule::HeavierOnTop: return "HeavierOnTop";
    case StackRule::LighterOnTop: return "LighterOnTop";
    case StackRule::SamePod: return "SamePod";
    case StackRule::SameVessel: return "SameVessel";
  }
  return "?";
}

// ---- IMO rules ---------------------------------------------------------------

void ImoRuleTable::set_rule(const std::string& class_a, const std::string& class_b, Rule rule) {
  auto key = class_a <= class_b ? std::make_pair(class_a, class_b)
                                : std::make_pair(class_b, class_a);
  rules_[key] = rule;
}

std::optional<ImoRuleTable::Rule> ImoRuleTable::rule_for(const ImoClass& a,
                                                         const ImoClass& b) const {
  auto key = a.code <= b.code ? std::make_pair(a.code, b.code) : std::make_pair(b.code, a.code);
  auto it = rules_.find(key);
  if (it == rules_.end()) return std::nullopt;
  return it->second;
}

ImoRuleTable ImoRuleTable::load(const std::string& path) {
  return from_file(DelimitedFile::read_file(path));
}

ImoRuleTable ImoRuleTable::from_file(const DelimitedFile& f) {
  ImoRuleTable t;
  auto c_a = f.col("class_a"), c_b = f.col("class_b"), c_rule = f.col("rule"),
       c_val = f.col("value");
  for (const auto& r : f.rows()) {
    if (r[c_a] == "*" && r[c_b] == "*") {
      if (r[c_rule] == "ProhibitedTerminalWide") t.prohibited_terminal_wide = r[c_val] == "1";
      continue;
    }
    Rule rule;
    if (r[c_rule] == "Prohibited") {
      rule.prohibited = true;
    } else if (r[c_rule] == "MinDistance") {
      rule.min_distance = static_cast<int>(parse_int(r[c_val], "min distance"));
      if (rule.min_distance < 0) fail(Err::ValidationFailed, "min distance must be >= 0");
    } else {
      fail(Err::ParseError, f.origin() + ": bad IMO rule '" + r[c_rule] + "'");
    }
    t.set_rule(r[c_a], r[c_b], rule);
  }
  return t;
}

// ---- yard state --------------------------------------------------------------

void YardState::place(const Container& box, const YardPosition& pos, const YardLayout& layout,
                      const std::string& collection, const std::string& vessel) {
  layout.require_position(pos);
  std::string id = box.id.str();
  if (by_id_.count(id)) fail(Err::DuplicateId, id + " already in yard");
  if (by_pos_.count(pos)) fail(Err::SlotOccupied, pos.str());
  if (pos.tier != stack_height(pos.block, pos.bay, pos.row) + 1)
    fail(Err::WouldFloat, id + " at " + pos.str() + " would not rest on the stack top");
  by_id_[id] = StoredContainer{box, pos, collection, vessel};
  by_pos_[pos] = id;
  move_log_.push_back({id, std::nullopt, pos, YardMoveKind::Plan});
}

Container YardState::remove(const ContainerId& id) {
  auto it = by_id_.find(id.str());
  if (it == by_id_.end()) fail(Err::UnknownContainer, id.str());
  const YardPosition& pos = it->second.pos;
  YardPosition above = pos;
  above.tier += 1;
  if (by_pos_.count(above))
    fail(Err::WouldFloat, id.str() + " at " + pos.str() + " has a container on top");
  Container box = it->second.box;
  by_pos_.erase(pos);
  move_log_.push_back({id.str(), pos, std::nullopt, YardMoveKind::Remove});
  by_id_.erase(it);
  return box;
}

const StoredContainer* YardState::find(const ContainerId& id) const { return find(id.str()); }

const StoredContainer* YardState::find(const std::string& id_str) const {
  auto it = by_id_.find(id_str);
  return it == by_id_.end() ? nullptr : &it->second;
}

const std::string* YardState::at(const YardPosition& pos) const {
  auto it = by_pos_.find(pos);
  return it == by_pos_.end() ? nullptr : &it->second;
}

int YardState::stack_height(const std::string& block, int bay, int row) const {
  int h = 0;
  YardPosition p{block, bay, row, 1};
  while (by_pos_.count(p)) {
    ++h;
    ++p.tier;
  }
  return h;
}

const StoredContainer* YardState::stack_top(const std::string& block, int bay, int row) const {
  int h = stack_height(block, bay, row);
  if (h == 0) return nullptr;
  return find(by_pos_.at(YardPosition{block, bay, row, h}));
}

std::vector<std::string> YardState::stack_ids(const std::string& block, int bay, int row) const {
  std::vector<std::string> out;
  YardPosition p{block, bay, row, 1};
  while (true) {
    auto it = by_pos_.find(p);
    if (it == by_pos_.end()) break;
    out.push_back(it->second);
    ++p.tier;
  }
  return out;
}

int YardState::count_in_zone(const std::string& zone, const YardLayout& layout) const {
  int n = 0;
  for (const auto& [id, sc] : by_id_)
    if (layout.zone_of_block(sc.pos.block) == zone) ++n;
  return n;
}

int YardState::count_collection_in_zone(const std::string& collection, const std::string& zone,
                                        const YardLayout& layout) const {
  int n = 0;
  for (const auto& [id, sc] : by_id_)
    if (sc.collection == collection && layout.zone_of_block(sc.pos.block) == zone) ++n;
  return n;
}

void YardState::check_invariants(const YardLayout& layout) const {
  if (by_id_.size() != by_pos_.size())
    fail(Err::ValidationFailed, "yard maps out of sync");
  for (const auto& [id, sc] : by_id_) {
    auto it = by_pos_.find(sc.pos);
    if (it == by_pos_.end() || it->second != id)
      fail(Err::ValidationFailed, "yard bijection broken for " + id);
    layout.require_position(sc.pos);
    for (int t = 1; t < sc.pos.tier; ++t)
      if (!by_pos_.count(YardPosition{sc.pos.block, sc.pos.bay, sc.pos.row, t}))
        fail(Err::ValidationFailed, id + " floats at " + sc.pos.str());
  }
}

// ---- operations --------------------------------------------------------------

std::optional<std::string> classify_container(const Container& c,
                                              const std::vector<CollectionFilter>& filters,
                                              const SizeTypeTable& table,
                                              const std::string& service_ctx) {
  const CollectionFilter* best = nullptr;
  for (const auto& f : filters) {
    if (!f.matches(c, table, service_ctx)) continue;
    if (!best || f.priority < best->priority) best = &f;
  }
  if (!best) return std::nullopt;  // manual-planning queue
  return best->id;
}

ImoCheckResult check_imo_placement(const YardState& state, const YardLayout& layout,
                                   const YardPosition& pos, const ImoClass& cls,
                                   const ImoRuleTable& table) {
  layout.require_position(pos);
  for (const auto& [id, sc] : state.all()) {
    if (!sc.box.imo_class) continue;
    auto rule = table.rule_for(cls, *sc.box.imo_class);
    if (!rule) continue;
    bool same_block = sc.pos.block == pos.block;
    if (rule->prohibited) {
      if (same_block || table.prohibited_terminal_wide)
        return {false, sc.pos,
                "classes " + cls.code + "/" + sc.box.imo_class->code + " prohibited together"};
      continue;
    }
    if (same_block) {
      int cheb = std::max(std::abs(sc.pos.bay - pos.bay), std::abs(sc.pos.row - pos.row));
      if (cheb < rule->min_distance)
        return {false, sc.pos,
                "classes " + cls.code + "/" + sc.box.imo_class->code + " need distance " +
                    std::to_string(rule->min_distance) + ", have " + std::to_string(cheb)};
    }
  }
  return {};
}

namespace {

bool block_kind_admits(const Block& block, const Container& c, const SizeTypeTable& table) {
  if (block.kind == BlockKind::Interchange) return false;
  bool is_reefer = table.decode(c.size_type).group == SizeGroup::Reefer;
  if (is_reefer != (block.kind == BlockKind::Reefer)) return false;
  if (c.imo_class.has_value() != (block.kind == BlockKind::Imo)) return false;
  return true;
}

bool policy_admits(const StackingPolicy& policy, const Container& c,
                   const StoredContainer* below, const std::string& vessel_ctx) {
  if (!below) return true;  // ground slot
  for (StackRule rule : policy.rules) {
    switch (rule) {
      case StackRule::HeavierOnTop:
        if (c.gross_weight_kg < below->box.gross_weight_kg) return false;
        break;
      case StackRule::LighterOnTop:
        if (c.gross_weight_kg > below->box.gross_weight_kg) return false;
        break;
      case StackRule::SamePod:
        if (c.pod != below->box.pod) return false;
        break;
      case StackRule::SameVessel:
        if (vessel_ctx != below->vessel) return false;
        break;
    }
  }
  return true;
}

// The one placeable slot of a stack, or nullopt when the stack is closed to
// this container (full, policy reject, IMO reject).
std::optional<YardPosition> try_stack(const Container& c, const std::string& block_id, int bay,
                                      int row, const YardState& state, const YardLayout& layout,
                                      const ImoRuleTable& imo, const StackingPolicy& policy,
                                      const std::string& vessel_ctx, int max_tier,
                                      bool& imo_blocked) {
  int height = state.stack_height(block_id, bay, row);
  if (height >= max_tier) return std::nullopt;
  YardPosition pos{block_id, bay, row, height + 1};
  const StoredContainer* top = state.stack_top(block_id, bay, row);
  if (!policy_admits(policy, c, top, vessel_ctx)) return std::nullopt;
  if (c.imo_class) {
    ImoCheckResult check = check_imo_placement(state, layout, pos, *c.imo_class, imo);
    if (!check.ok) {
      imo_blocked = true;
      return std::nullopt;
    }
  }
  return pos;
}

std::optional<YardPosition> scan_zone(const Container& c, const std::string& zone,
                                      const YardState& state, const YardLayout& layout,
                                      const ImoRuleTable& imo, const StackingPolicy& policy,
                                      const SizeTypeTable& table, const std::string& vessel_ctx,
                                      bool& imo_blocked) {
  for (const auto& block_id : layout.blocks_in_zone(zone)) {
    const Block& block = layout.block(block_id);
    if (!block_kind_admits(block, c, table)) continue;
    int max_tier = block.max_tier;
    if (policy.max_tier_override) max_tier = std::min(max_tier, *policy.max_tier_override);
    for (int bay = 1; bay <= block.bays; ++bay)
      for (int row = 1; row <= block.rows; ++row)
        if (auto pos = try_stack(c, block_id, bay, row, state, layout, imo, policy, vessel_ctx,
                                 max_tier, imo_blocked))
          return pos;
  }
  return std::nullopt;
}

}  // namespace

YardPosition plan_slot(const Container& c, const AreaAssignment& assignment,
                       const YardState& state, const YardLayout& layout,
                       const ImoRuleTable& imo, const StackingPolicy& policy,
                       const SizeTypeTable& table, const std::string& vessel_ctx) {
  if (assignment.zones.empty())
    fail(Err::ValidationFailed, "assignment " + assignment.filter_id + " has no zones");

  std::vector<std::string> zone_order = assignment.zones;
  if (assignment.strategy == AreaStrategy::Scattered) {
    // least-loaded first, measured in containers of this collection;
    // stable sort keeps the assignment's zone order for ties
    std::stable_sort(zone_order.begin(), zone_order.end(),
                     [&](const std::string& a, const std::string& b) {
                       return state.count_collection_in_zone(assignment.filter_id, a, layout) <
                              state.count_collection_in_zone(assignment.filter_id, b, layout);
                     });
  }

  bool imo_blocked = false;
  for (const auto& zone : zone_order)
    if (auto pos = scan_zone(c, zone, state, layout, imo, policy, table, vessel_ctx, imo_blocked))
      return *pos;

  if (imo_blocked && c.imo_class)
    fail(Err::ImoProhibited, c.id.str() + ": IMO segregation leaves no feasible slot");
  fail(Err::NoFeasibleSlot, c.id.str() + ": no slot in zones of " + assignment.filter_id);
}

int estimate_rehandles(const std::vector<std::string>& stack,
                       const std::vector<std::string>& retrieval_order, int aux_stacks) {
  if (aux_stacks < 1) fail(Err::ValidationFailed, "need at least one auxiliary stack");
  {
    auto a = stack;
    auto b = retrieval_order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) fail(Err::NotAPermutation, "retrieval order must permute the stack");
  }

  std::vector<std::vector<std::string>> piles(1 + aux_stacks);
  piles[0] = stack;
  int rehandles = 0;
  for (const auto& target : retrieval_order) {
    std::size_t home = piles.size();
    std::size_t depth = 0;
    for (std::size_t i = 0; i < piles.size(); ++i) {
      auto it = std::find(piles[i].begin(), piles[i].end(), target);
      if (it != piles[i].end()) {
        home = i;
        depth = static_cast<std::size_t>(it - piles[i].begin());
        break;
      }
    }
    // relocate blockers top-down to the lowest-indexed other pile
    std::size_t spill = 0;
    while (spill == home) ++spill;
    while (piles[home].size() > depth + 1) {
      piles[spill].push_back(piles[home].back());
      piles[home].pop_back();
      ++rehandles;
    }
    piles[home].pop_back();
  }
  return rehandles;
}

std::map<std::string, ZoneCapacity> capacity_report(const YardState& state,
                                                    const YardLayout& layout) {
  std::map<std::string, ZoneCapacity> report;
  for (const auto& zone : layout.zones()) report[zone];
  for (const auto& [id, block] : layout.blocks()) report[block.zone].slots += block.slot_count();
  for (const auto& [id, sc] : state.all()) report[layout.zone_of_block(sc.pos.block)].occupied++;
  for (auto& [zone, cap] : report) {
    cap.free_slots = cap.slots - cap.occupied;
    cap.pct = cap.slots == 0 ? 0.0 : 100.0 * cap.occupied / cap.slots;
  }
  return report;
}

void manual_override(YardState& state, const ContainerId& id, const YardPosition& new_pos,
                     const YardLayout& layout) {
  const StoredContainer* sc = state.find(id);
  if (!sc) fail(Err::UnknownContainer, id.str());
  layout.require_position(new_pos);
  if (state.occupied(new_pos)) fail(Err::SlotOccupied, new_pos.str());

  YardPosition old_pos = sc->pos;
  YardPosition above_old = old_pos;
  above_old.tier += 1;
  if (state.occupied(above_old))
    fail(Err::WouldFloat, id.str() + " has a container on top at " + old_pos.str());
  // target must rest on the stack top; moving within the same stack can only
  // mean re-placing on the slot just vacated, which is a no-op at best
  int target_height = state.stack_height(new_pos.block, new_pos.bay, new_pos.row);
  bool same_stack = new_pos.block == old_pos.block && new_pos.bay == old_pos.bay &&
                    new_pos.row == old_pos.row;
  if (same_stack || new_pos.tier != target_height + 1)
    fail(Err::WouldFloat, id.str() + " cannot float at " + new_pos.str());

  StoredContainer moved = *sc;
  state.remove(id);
  state.place(moved.box, new_pos, layout, moved.collection, moved.vessel);
  // rewrite the tail of the log as one manual move
  auto& log = const_cast<std::vector<YardMoveLogEntry>&>(state.move_log());
  log.pop_back();
  log.pop_back();
  log.push_back({id.str(), old_pos, new_pos, YardMoveKind::Manual});
}

// ---- config ------------------------------------------------------------------

std::vector<CollectionFilter> load_filters(const std::string& path) {
  return parse_filters(DelimitedFile::read_file(path));
}

std::vector<CollectionFilter> parse_filters(const DelimitedFile& f) {
  std::vector<CollectionFilter> out;
  auto c_id = f.col("id"), c_prio = f.col("priority"), c_len = f.col("length_ft"),
       c_wmin = f.col("weight_min_kg"), c_wmax = f.col("weight_max_kg"),
       c_service = f.col("service"), c_pol = f.col("pol"), c_pod = f.col("pod"),
       c_txn = f.col("transaction");
  std::set<int> priorities;
  for (const auto& r : f.rows()) {
    CollectionFilter cf;
    cf.id = r[c_id];
    cf.priority = static_cast<int>(parse_int(r[c_prio], "priority"));
    if (!priorities.insert(cf.priority).second)
      fail(Err::ValidationFailed, f.origin() + ": duplicate filter priority " + r[c_prio]);
    if (!r[c_len].empty()) cf.length_ft = static_cast<int>(parse_int(r[c_len], "length_ft"));
    if (!r[c_wmin].empty()) cf.weight_min_kg = parse_int(r[c_wmin], "weight_min_kg");
    if (!r[c_wmax].empty()) cf.weight_max_kg = parse_int(r[c_wmax], "weight_max_kg");
    if (!r[c_service].empty()) cf.service = r[c_service];
    if (!r[c_pol].empty()) cf.pol = r[c_pol];
    if (!r[c_pod].empty()) cf.pod = r[c_pod];
    if (!r[c_txn].empty()) {
      if (r[c_txn] == "Import")
        cf.transaction = Transaction::Import;
      else if (r[c_txn] == "Export")
        cf.transaction = Transaction::Export;
      else if (r[c_txn] == "Transshipment")
        cf.transaction = Transaction::Transshipment;
      else
        fail(Err::ParseError, f.origin() + ": bad transaction '" + r[c_txn] + "'");
    }
    if (!cf.has_predicate())
      fail(Err::ValidationFailed, f.origin() + ": filter " + cf.id + " has no predicate");
    out.push_back(std::move(cf));
  }
  return out;
}

std::vector<AreaAssignment> load_assignments(const std::string& path,
                                             const std::vector<CollectionFilter>& filters,
                                             const YardLayout& layout) {
  return parse_assignments(DelimitedFile::read_file(path), filters, layout);
}

std::vector<AreaAssignment> parse_assignments(const DelimitedFile& f,
                                              const std::vector<CollectionFilter>& filters,
                                              const YardLayout& layout) {
  auto c_fid = f.col("filter_id"), c_zones = f.col("zones"), c_strat = f.col("strategy");
  std::vector<AreaAssignment> out;
  for (const auto& r : f.rows()) {
    AreaAssignment a;
    a.filter_id = r[c_fid];
    auto filter = std::find_if(filters.begin(), filters.end(),
                               [&](const CollectionFilter& cf) { return cf.id == a.filter_id; });
    if (filter == filters.end())
      fail(Err::DanglingReference,
           f.origin() + ": assignment for unknown filter " + a.filter_id);
    a.zones = split(r[c_zones], ',');
    if (a.zones.empty() || a.zones.front().empty())
      fail(Err::ValidationFailed, f.origin() + ": assignment " + a.filter_id + " has no zones");
    for (const auto& z : a.zones)
      if (!layout.has_node(z) || layout.node_kind(z) != NodeKind::Zone)
        fail(Err::DanglingReference, f.origin() + ": assignment zone " + z + " not in layout");
    if (r[c_strat] == "Grouped") {
      a.strategy = AreaStrategy::Grouped;
    } else if (r[c_strat] == "Scattered") {
      a.strategy = AreaStrategy::Scattered;
    } else if (r[c_strat].empty()) {
      a.strategy = filter->transaction ? default_strategy(*filter->transaction)
                                       : AreaStrategy::Grouped;
    } else {
      fail(Err::ParseError, f.origin() + ": bad strategy '" + r[c_strat] + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

StackingPolicy parse_stacking_policy(std::string_view keys, std::optional<int> max_tier) {
  StackingPolicy p;
  for (const auto& token : split(keys, ','))
    if (!token.empty()) p.rules.push_back(parse_stack_rule(trim(token)));
  if (p.rules.empty()) fail(Err::ValidationFailed, "stacking policy needs at least one rule");
  p.max_tier_override = max_tier;
  return p;
}

}  // namespace tos
