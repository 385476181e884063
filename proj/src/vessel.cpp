#include "tos/vessel.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace tos {

void StowagePlan::add(const StowEntry& e, const VesselProfile& profile) {
  const CellAddress& cell = e.position;
  if (cell.bay > profile.bays || cell.row > profile.rows || cell.tier > profile.tiers)
    fail(Err::NoFeasibleCell, "cell " + cell.str() + " outside profile " + profile.name);
  if (entries_.count(cell)) fail(Err::SlotOccupied, "cell " + cell.str() + " already stowed");
  int height = stack_height(cell.bay, cell.row);
  if (cell.tier != height + 1)
    fail(Err::WouldFloat, "cell " + cell.str() + " would float (stack height " +
                              std::to_string(height) + ")");
  if (height + 1 > profile.max_stack_height)
    fail(Err::NoFeasibleCell, "stack " + std::to_string(cell.bay) + "/" +
                                  std::to_string(cell.row) + " at max height");
  if (stack_weight(cell.bay, cell.row) + e.weight_kg > profile.max_stack_weight_kg)
    fail(Err::StackWeightExceeded,
         "stack " + std::to_string(cell.bay) + "/" + std::to_string(cell.row) + " would carry " +
             std::to_string(stack_weight(cell.bay, cell.row) + e.weight_kg) + " kg, limit " +
             std::to_string(profile.max_stack_weight_kg));
  entries_[cell] = e;
}

void StowagePlan::add_unchecked(const StowEntry& e) {
  if (entries_.count(e.position))
    fail(Err::SlotOccupied, "cell " + e.position.str() + " already stowed");
  entries_[e.position] = e;
}

void StowagePlan::remove(const CellAddress& cell) {
  auto it = entries_.find(cell);
  if (it == entries_.end()) fail(Err::UnknownContainer, "cell " + cell.str() + " empty");
  CellAddress above = cell;
  above.tier += 1;
  if (entries_.count(above))
    fail(Err::WouldFloat, "cell " + cell.str() + " has a container above");
  entries_.erase(it);
}

const StowEntry* StowagePlan::at(const CellAddress& cell) const {
  auto it = entries_.find(cell);
  return it == entries_.end() ? nullptr : &it->second;
}

i64 StowagePlan::stack_weight(int bay, int row) const {
  i64 total = 0;
  for (const auto& [cell, e] : entries_)
    if (cell.bay == bay && cell.row == row) total += e.weight_kg;
  return total;
}

int StowagePlan::stack_height(int bay, int row) const {
  int h = 0;
  for (const auto& [cell, e] : entries_)
    if (cell.bay == bay && cell.row == row) h = std::max(h, cell.tier);
  return h;
}

void StowagePlan::check_invariants(const VesselProfile& profile) const {
  std::map<std::pair<int, int>, std::set<int>> stacks;
  std::map<std::pair<int, int>, i64> weights;
  for (const auto& [cell, e] : entries_) {
    if (cell.bay > profile.bays || cell.row > profile.rows || cell.tier > profile.tiers)
      fail(Err::ValidationFailed, "stow cell " + cell.str() + " outside profile");
    stacks[{cell.bay, cell.row}].insert(cell.tier);
    weights[{cell.bay, cell.row}] += e.weight_kg;
  }
  for (const auto& [key, tiers] : stacks) {
    int expect = 1;
    for (int t : tiers) {
      if (t != expect)
        fail(Err::ValidationFailed, "floating container in stack bay " +
                                        std::to_string(key.first) + " row " +
                                        std::to_string(key.second));
      ++expect;
    }
    if (static_cast<int>(tiers.size()) > profile.max_stack_height)
      fail(Err::ValidationFailed, "stack over height limit");
    if (weights.at(key) > profile.max_stack_weight_kg)
      fail(Err::ValidationFailed, "stack over weight limit");
  }
}

// ---- lists -------------------------------------------------------------------

std::vector<StowEntry> build_discharge_list(const StowagePlan& plan,
                                            const std::string& local_port) {
  return build_discharge_list(plan, local_port, {});
}

std::vector<StowEntry> build_discharge_list(const StowagePlan& plan,
                                            const std::string& local_port,
                                            const std::set<std::string>& extra_containers) {
  // group by stack, keep bay/row order, tiers descending so the top comes off
  // first
  std::vector<StowEntry> out;
  std::map<std::pair<int, int>, std::vector<StowEntry>> stacks;
  for (const auto& [cell, e] : plan.entries())
    if (e.pod == local_port || extra_containers.count(e.container.str()))
      stacks[{cell.bay, cell.row}].push_back(e);
  for (auto& [key, entries] : stacks) {
    std::sort(entries.begin(), entries.end(),
              [](const StowEntry& a, const StowEntry& b) {
                return a.position.tier > b.position.tier;
              });
    for (auto& e : entries) out.push_back(std::move(e));
  }
  return out;
}

LoadList build_load_list(const std::vector<MovinsInstruction>& instructions,
                         const YardState& yard) {
  LoadList out;
  std::set<std::string> seen;
  for (const auto& ins : instructions) {
    if (ins.kind != MovinsKind::Load || !ins.container) continue;
    std::string id = ins.container->str();
    if (!seen.insert(id).second) {
      out.duplicates.push_back(id);
      continue;
    }
    if (yard.find(id))
      out.loadable.push_back(ins);
    else
      out.missing.push_back(ins);
  }
  return out;
}

// ---- stow assignment ---------------------------------------------------------

namespace {

std::optional<CellAddress> first_feasible_in_bay(const StowagePlan& plan,
                                                 const VesselProfile& profile, int bay,
                                                 i64 weight_kg, bool& weight_blocked) {
  for (int row = 1; row <= profile.rows; ++row) {
    int height = plan.stack_height(bay, row);
    if (height >= profile.tiers || height >= profile.max_stack_height) continue;
    if (plan.stack_weight(bay, row) + weight_kg > profile.max_stack_weight_kg) {
      weight_blocked = true;
      continue;
    }
    return CellAddress{bay, row, height + 1};
  }
  return std::nullopt;
}

}  // namespace

StowResult assign_stow_positions(const std::vector<LoadItem>& loadable,
                                 const VesselProfile& profile, const std::string& visit_id,
                                 const StowagePlan& existing) {
  StowResult result;
  result.delta = StowagePlan(visit_id);
  // working copy including pre-existing stow so limits account for both
  StowagePlan work = existing;

  for (const auto& item : loadable) {
    std::optional<CellAddress> chosen;
    bool weight_blocked = false;
    if (item.bay_preference) {
      chosen = first_feasible_in_bay(work, profile, *item.bay_preference, item.weight_kg,
                                     weight_blocked);
      if (!chosen)
        result.notes.push_back(item.container.str() + ": preferred bay " +
                               std::to_string(*item.bay_preference) +
                               (weight_blocked ? " over stack weight limit" : " full") +
                               ", rerouted");
    }
    if (!chosen) {
      for (int bay = 1; bay <= profile.bays && !chosen; ++bay) {
        bool ignored = false;
        chosen = first_feasible_in_bay(work, profile, bay, item.weight_kg, ignored);
      }
    }
    if (!chosen)
      fail(Err::NoFeasibleCell, item.container.str() + ": vessel " + profile.name + " full");
    StowEntry e;
    e.container = item.container;
    e.position = *chosen;
    e.size_type = item.size_type;
    e.weight_kg = item.weight_kg;
    e.pod = item.pod;
    work.add(e, profile);
    result.delta.add_unchecked(e);
  }
  work.check_invariants(profile);
  return result;
}

// ---- sequencing --------------------------------------------------------------

namespace {

// Minimal-maximum contiguous partition of per-bay move counts into k ranges
// (classic linear partitioning, DP over prefix sums). Returns the range
// boundaries as end indices; among optima the earliest cuts are taken.
std::vector<std::size_t> partition_bays(const std::vector<int>& counts, std::size_t k) {
  std::size_t n = counts.size();
  if (k == 0) fail(Err::ValidationFailed, "no cranes to sequence for");
  std::vector<i64> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + counts[i];

  constexpr i64 kInf = std::numeric_limits<i64>::max() / 4;
  // best[j][i]: minimal max-range-sum splitting the first i bays into j ranges
  std::vector<std::vector<i64>> best(k + 1, std::vector<i64>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> cut(k + 1, std::vector<std::size_t>(n + 1, 0));
  best[0][0] = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    best[j][0] = 0;  // empty ranges allowed when cranes outnumber bays
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t split = 0; split <= i; ++split) {
        if (best[j - 1][split] == kInf) continue;
        i64 range = prefix[i] - prefix[split];
        i64 value = std::max(best[j - 1][split], range);
        if (value < best[j][i]) {
          best[j][i] = value;
          cut[j][i] = split;
        }
      }
    }
  }
  std::vector<std::size_t> ends(k);
  std::size_t at = n;
  for (std::size_t j = k; j >= 1; --j) {
    ends[j - 1] = at;
    at = cut[j][at];
  }
  return ends;
}

MoveInstruction load_move(const StowEntry& e, const YardState& yard) {
  MoveInstruction m;
  m.kind = MovinsKind::Load;
  m.container = e.container;
  m.size_type = e.size_type;
  m.cell = e.position;
  if (const StoredContainer* sc = yard.find(e.container)) m.yard_pos = sc->pos;
  return m;
}

}  // namespace

std::vector<WorkQueue> sequence_moves(const std::vector<StowEntry>& discharges,
                                      const StowagePlan& load_delta, const YardState& yard,
                                      const std::vector<std::string>& cranes) {
  // per-bay buckets; discharges first (top tier down), then loads (bottom up)
  std::map<int, std::vector<MoveInstruction>> bays;
  {
    std::map<int, std::vector<StowEntry>> dis;
    for (const auto& e : discharges) dis[e.position.bay].push_back(e);
    for (auto& [bay, entries] : dis) {
      std::sort(entries.begin(), entries.end(), [](const StowEntry& a, const StowEntry& b) {
        if (a.position.row != b.position.row) return a.position.row < b.position.row;
        return a.position.tier > b.position.tier;
      });
      for (const auto& e : entries) {
        MoveInstruction m;
        m.kind = MovinsKind::Discharge;
        m.container = e.container;
        m.size_type = e.size_type;
        m.cell = e.position;
        bays[bay].push_back(std::move(m));
      }
    }
  }
  {
    std::map<int, std::vector<StowEntry>> loads;
    for (const auto& [cell, e] : load_delta.entries()) loads[cell.bay].push_back(e);
    for (auto& [bay, entries] : loads) {
      std::sort(entries.begin(), entries.end(), [](const StowEntry& a, const StowEntry& b) {
        if (a.position.row != b.position.row) return a.position.row < b.position.row;
        return a.position.tier < b.position.tier;  // bottom tier first
      });
      for (const auto& e : entries) bays[bay].push_back(load_move(e, yard));
    }
  }

  std::vector<int> bay_ids;
  std::vector<int> counts;
  for (const auto& [bay, moves] : bays) {
    bay_ids.push_back(bay);
    counts.push_back(static_cast<int>(moves.size()));
  }

  std::vector<WorkQueue> queues;
  for (const auto& c : cranes) queues.push_back({c, {}});
  if (bays.empty() || cranes.empty()) return queues;

  auto ends = partition_bays(counts, cranes.size());
  std::size_t begin = 0;
  for (std::size_t q = 0; q < queues.size(); ++q) {
    for (std::size_t i = begin; i < ends[q]; ++i)
      for (auto& m : bays[bay_ids[i]]) queues[q].moves.push_back(m);
    begin = ends[q];
  }
  return queues;
}

std::vector<WorkQueue> sequence_loading(const StowagePlan& delta, const YardState& yard,
                                        const std::vector<std::string>& cranes) {
  return sequence_moves({}, delta, yard, cranes);
}

// ---- restow detection --------------------------------------------------------

namespace {

// Greedy dig count without the permutation requirement: targets leave in
// order, anything above them relocates to the lowest-indexed other pile.
int dig_rehandles(const std::vector<std::string>& stack,
                  const std::vector<std::string>& retrieval_order, int aux_stacks) {
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
    if (home == piles.size()) continue;  // not in this stack
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

}  // namespace

int detect_restows(const std::vector<WorkQueue>& queues, const YardState& yard) {
  // global retrieval order: queue order, then position within the queue
  std::vector<std::string> order;
  for (const auto& q : queues)
    for (const auto& m : q.moves)
      if (m.yard_pos) order.push_back(m.container.str());

  // bucket the order per yard stack and simulate each dig
  std::map<std::tuple<std::string, int, int>, std::vector<std::string>> per_stack;
  for (const auto& id : order) {
    const StoredContainer* sc = yard.find(id);
    if (!sc) continue;
    per_stack[{sc->pos.block, sc->pos.bay, sc->pos.row}].push_back(id);
  }
  int total = 0;
  for (const auto& [key, retrievals] : per_stack) {
    auto [block, bay, row] = key;
    total += dig_rehandles(yard.stack_ids(block, bay, row), retrievals, 1);
  }
  return total;
}

std::string stow_entries_to_psv(const std::vector<StowEntry>& entries) {
  std::string out = "container|bay|row|tier|size_type|weight_kg|pod|pol|final_destination|imo\n";
  for (const auto& e : entries) {
    out += e.container.str() + "|" + std::to_string(e.position.bay) + "|" +
           std::to_string(e.position.row) + "|" + std::to_string(e.position.tier) + "|" +
           e.size_type + "|" + std::to_string(e.weight_kg) + "|" + e.pod + "|" + e.pol + "|" +
           (e.final_destination ? *e.final_destination : "-") + "|" +
           (e.imo_class ? e.imo_class->code : "-") + "\n";
  }
  return out;
}

std::string load_list_to_psv(const LoadList& list) {
  std::string out = "status|container|bay_preference\n";
  auto row = [&](const char* status, const MovinsInstruction& ins) {
    out += std::string(status) + "|" + (ins.container ? ins.container->str() : "-") + "|" +
           (ins.bay_preference ? std::to_string(*ins.bay_preference) : "-") + "\n";
  };
  for (const auto& ins : list.loadable) row("loadable", ins);
  for (const auto& ins : list.missing) row("missing", ins);
  for (const auto& dup : list.duplicates) out += "duplicate|" + dup + "|-\n";
  return out;
}

}  // namespace tos
