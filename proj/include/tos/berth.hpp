#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tos/layout.hpp"
#include "tos/types.hpp"

namespace tos {

// One allocation on the two-axis planning grid: a quay position interval
// crossed with a time interval. Both half-open.
struct BerthWindow {
  std::string visit_id;
  double start_m = 0;
  double end_m = 0;
  TimeMs start = 0;
  TimeMs end = 0;
  std::vector<std::string> cranes;

  friend bool operator==(const BerthWindow&, const BerthWindow&) = default;
};

struct BerthPlan {
  Quay quay;
  std::vector<BerthWindow> windows;
  TimeMs horizon_begin = 0;
  TimeMs horizon_end = 0;

  const BerthWindow* find(const std::string& visit_id) const;
  BerthWindow* find_mut(const std::string& visit_id);
  // True iff no two windows overlap in both axes.
  bool windows_disjoint() const;
  // State hash for purity checks.
  u64 state_hash() const;
};

struct BerthSlot {
  TimeMs start = 0;
  double position_m = 0;
};

// Earliest feasible berth for the visit: start >= ETA, lowest position among
// equal starts, service duration = ETD - ETA. Pure; allocate_berth inserts
// the result.
std::optional<BerthSlot> whatif_capacity(const BerthPlan& plan, const VesselVisit& visit,
                                         const VesselProfile& profile, double clearance_m);

BerthWindow allocate_berth(BerthPlan& plan, const VesselVisit& visit,
                           const VesselProfile& profile, double clearance_m);

void release_window(BerthPlan& plan, const std::string& visit_id);

struct CraneAssignment {
  int required = 0;   // what the workload demands
  int assigned = 0;   // what fits under the spacing/pool caps
  std::vector<std::string> crane_ids;
  bool infeasible = false;  // required > assigned; operators must be told
};

// Crane count from workload and window: max(1, ceil(moves / (rate * hours)))
// when moves > 0, capped by floor(LOA / min spacing) and by the pool.
CraneAssignment assign_cranes(const VesselVisit& visit, const VesselProfile& profile,
                              int move_count, double moves_per_hour_per_crane, const Quay& quay);

}  // namespace tos
