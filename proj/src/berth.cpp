#include "tos/berth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tos {

const BerthWindow* BerthPlan::find(const std::string& visit_id) const {
  for (const auto& w : windows)
    if (w.visit_id == visit_id) return &w;
  return nullptr;
}

BerthWindow* BerthPlan::find_mut(const std::string& visit_id) {
  for (auto& w : windows)
    if (w.visit_id == visit_id) return &w;
  return nullptr;
}

bool BerthPlan::windows_disjoint() const {
  for (std::size_t i = 0; i < windows.size(); ++i)
    for (std::size_t j = i + 1; j < windows.size(); ++j) {
      const auto& a = windows[i];
      const auto& b = windows[j];
      bool pos_overlap = a.start_m < b.end_m && b.start_m < a.end_m;
      bool time_overlap = a.start < b.end && b.start < a.end;
      if (pos_overlap && time_overlap) return false;
    }
  return true;
}

u64 BerthPlan::state_hash() const {
  std::string blob;
  for (const auto& w : windows) {
    blob += w.visit_id;
    blob += "|" + std::to_string(w.start_m) + "|" + std::to_string(w.end_m);
    blob += "|" + std::to_string(w.start) + "|" + std::to_string(w.end);
    for (const auto& c : w.cranes) blob += "," + c;
    blob += ";";
  }
  return fnv1a64(blob);
}

namespace {

// Leftmost position p such that [p, p+need) fits in [0, length), clears the
// depth profile and avoids every busy interval. nullopt if none.
std::optional<double> leftmost_gap(const Quay& quay, double need, double draft,
                                   const std::vector<std::pair<double, double>>& busy) {
  // blocked = busy windows + depth-infeasible segments
  std::vector<std::pair<double, double>> blocked = busy;
  for (const auto& seg : quay.depth_profile)
    if (seg.depth_m < draft) blocked.emplace_back(seg.from_m, seg.to_m);
  std::sort(blocked.begin(), blocked.end());

  double cursor = 0;
  for (const auto& [from, to] : blocked) {
    if (from - cursor >= need) return cursor;
    cursor = std::max(cursor, to);
  }
  if (quay.length_m - cursor >= need) return cursor;
  return std::nullopt;
}

}  // namespace

std::optional<BerthSlot> whatif_capacity(const BerthPlan& plan, const VesselVisit& visit,
                                         const VesselProfile& profile, double clearance_m) {
  const Quay& quay = plan.quay;
  double need = profile.loa_m + clearance_m;
  if (need > quay.length_m)
    fail(Err::VesselTooLong, visit.visit_id + ": needs " + std::to_string(need) + " m of quay");
  if (leftmost_gap(quay, need, profile.draft_m, {}) == std::nullopt)
    fail(Err::DraftExceedsDepth, visit.visit_id + ": draft " + std::to_string(profile.draft_m) +
                                     " m does not fit the depth profile");

  TimeMs duration = visit.etd - visit.eta;
  // Candidate starts: the ETA itself plus every moment the quay frees up.
  std::set<TimeMs> candidates{std::max(visit.eta, plan.horizon_begin)};
  for (const auto& w : plan.windows)
    if (w.end > visit.eta) candidates.insert(w.end);

  for (TimeMs t : candidates) {
    if (t >= plan.horizon_end || t + duration > plan.horizon_end) continue;
    std::vector<std::pair<double, double>> busy;
    for (const auto& w : plan.windows)
      if (w.start < t + duration && t < w.end) busy.emplace_back(w.start_m, w.end_m);
    if (auto p = leftmost_gap(quay, need, profile.draft_m, busy))
      return BerthSlot{t, *p};
  }
  return std::nullopt;
}

BerthWindow allocate_berth(BerthPlan& plan, const VesselVisit& visit,
                           const VesselProfile& profile, double clearance_m) {
  auto slot = whatif_capacity(plan, visit, profile, clearance_m);
  if (!slot)
    fail(Err::NoFeasibleWindow,
         visit.visit_id + ": no berth within horizon ending " + format_iso8601(plan.horizon_end));
  BerthWindow w;
  w.visit_id = visit.visit_id;
  w.start_m = slot->position_m;
  w.end_m = slot->position_m + profile.loa_m + clearance_m;
  w.start = slot->start;
  w.end = slot->start + (visit.etd - visit.eta);
  plan.windows.push_back(w);
  return w;
}

void release_window(BerthPlan& plan, const std::string& visit_id) {
  auto it = std::find_if(plan.windows.begin(), plan.windows.end(),
                         [&](const BerthWindow& w) { return w.visit_id == visit_id; });
  if (it == plan.windows.end()) fail(Err::UnknownVisit, visit_id);
  plan.windows.erase(it);
}

CraneAssignment assign_cranes(const VesselVisit& visit, const VesselProfile& profile,
                              int move_count, double moves_per_hour_per_crane, const Quay& quay) {
  if (move_count < 0) fail(Err::ValidationFailed, "move count must be >= 0");
  if (moves_per_hour_per_crane <= 0) fail(Err::ValidationFailed, "crane rate must be > 0");
  CraneAssignment out;
  if (move_count == 0) return out;

  double hours = static_cast<double>(visit.etd - visit.eta) / kMsPerHour;
  out.required = std::max(1, static_cast<int>(std::ceil(
                                 move_count / (moves_per_hour_per_crane * hours))));
  int spacing_cap = static_cast<int>(std::floor(profile.loa_m / quay.crane_min_spacing_m));
  int pool_cap = static_cast<int>(quay.crane_pool.size());
  out.assigned = std::min({out.required, spacing_cap, pool_cap});
  out.infeasible = out.assigned < out.required;
  out.crane_ids.assign(quay.crane_pool.begin(), quay.crane_pool.begin() + out.assigned);
  return out;
}

}  // namespace tos
