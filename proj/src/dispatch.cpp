#include "tos/dispatch.hpp"

#include <algorithm>
#include <cmath>

namespace tos {

const char* leg_action_name(LegAction a) {
  switch (a) {
    case LegAction::Lift: return "Lift";
    case LegAction::Haul: return "Haul";
    case LegAction::Set: return "Set";
  }
  return "?";
}

const char* leg_status_name(LegStatus s) {
  switch (s) {
    case LegStatus::Pending: return "Pending";
    case LegStatus::Assigned: return "Assigned";
    case LegStatus::Running: return "Running";
    case LegStatus::Done: return "Done";
  }
  return "?";
}

bool JobChain::done() const {
  return std::all_of(legs.begin(), legs.end(),
                     [](const Leg& l) { return l.status == LegStatus::Done; });
}

std::optional<std::size_t> JobChain::ready_leg() const {
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (legs[i].status == LegStatus::Done) continue;
    if (legs[i].status == LegStatus::Pending) return i;
    return std::nullopt;  // Assigned/Running leg in flight
  }
  return std::nullopt;
}

JobChain expand_move(i64 move_id, const std::string& container, const std::string& from,
                     const std::string& to, const YardLayout& layout) {
  NodeKind from_kind = layout.node_kind(from);  // throws UnknownNode
  NodeKind to_kind = layout.node_kind(to);

  JobChain chain;
  chain.move_id = move_id;
  chain.container = container;

  auto leg = [](EquipmentKind kind, const std::string& a, const std::string& b, LegAction act) {
    Leg l;
    l.kind = kind;
    l.from = a;
    l.to = b;
    l.action = act;
    return l;
  };

  if (from_kind == NodeKind::Quay && to_kind == NodeKind::Quay)
    fail(Err::ValidationFailed, "quay-to-quay move has no chain");

  if (from_kind == NodeKind::Quay) {
    // discharge: quay crane lifts ashore, tractor hauls, yard crane sets
    chain.legs.push_back(leg(EquipmentKind::QuayCrane, from, from, LegAction::Lift));
    chain.legs.push_back(leg(EquipmentKind::Tractor, from, to, LegAction::Haul));
    chain.legs.push_back(leg(EquipmentKind::Rtg, to, to, LegAction::Set));
  } else if (to_kind == NodeKind::Quay) {
    // load: yard crane lifts onto a chassis, tractor hauls, quay crane sets
    chain.legs.push_back(leg(EquipmentKind::Rtg, from, from, LegAction::Lift));
    chain.legs.push_back(leg(EquipmentKind::Tractor, from, to, LegAction::Haul));
    chain.legs.push_back(leg(EquipmentKind::QuayCrane, to, to, LegAction::Set));
  } else if (from == to) {
    // reshuffle inside one zone: a single yard crane handles it
    chain.legs.push_back(leg(EquipmentKind::Rtg, from, to, LegAction::Lift));
  } else {
    chain.legs.push_back(leg(EquipmentKind::Rtg, from, from, LegAction::Lift));
    chain.legs.push_back(leg(EquipmentKind::Tractor, from, to, LegAction::Haul));
    chain.legs.push_back(leg(EquipmentKind::Rtg, to, to, LegAction::Set));
  }
  return chain;
}

// ---- clock -------------------------------------------------------------------

void SimClock::advance_to(TimeMs t) {
  if (t < now_)
    fail(Err::ValidationFailed, "clock cannot go back from " + format_iso8601(now_) + " to " +
                                    format_iso8601(t));
  now_ = t;
}

TimeMs SimClock::next_time() const {
  if (queue_.empty()) fail(Err::EmptyQueue, "no pending events");
  return queue_.begin()->first.first;
}

void SimClock::push(SimEvent e) {
  e.seq = next_seq_++;
  queue_[{e.time, e.seq}] = e;
}

SimEvent SimClock::pop() {
  if (queue_.empty()) fail(Err::EmptyQueue, "no pending events");
  auto it = queue_.begin();
  SimEvent e = it->second;
  queue_.erase(it);
  advance_to(e.time);
  return e;
}

// ---- simulation --------------------------------------------------------------

void DispatchSim::add_equipment(const EquipmentSpec& spec) {
  if (fleet_.count(spec.id)) fail(Err::DuplicateId, "equipment " + spec.id);
  EquipmentState st;
  st.spec = spec;
  st.position = spec.home_zone;
  st.busy_until = clock_.now();
  fleet_[spec.id] = st;
}

void DispatchSim::add_chain(JobChain chain) {
  if (chains_.count(chain.move_id))
    fail(Err::DuplicateId, "move " + std::to_string(chain.move_id));
  chains_[chain.move_id] = std::move(chain);
}

void DispatchSim::push_callback(TimeMs at, const std::string& tag) {
  SimEvent e;
  e.time = at;
  e.kind = SimEvent::Kind::Callback;
  e.tag = tag;
  clock_.push(e);
}

std::vector<Assignment> DispatchSim::dispatch_next() {
  std::vector<Assignment> out;
  for (auto& [move_id, chain] : chains_) {
    auto idx = chain.ready_leg();
    if (!idx) continue;
    Leg& leg = chain.legs[*idx];

    bool blocked = false;
    for (const auto& [pm, pl] : leg.prereqs) {
      const JobChain& pc = chains_.at(pm);
      if (pc.legs.at(pl).status != LegStatus::Done) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;

    // nearest idle unit of the right kind; ties go to the lower id (map order)
    EquipmentState* best = nullptr;
    double best_dist = 0;
    for (auto& [id, eq] : fleet_) {
      if (eq.spec.kind != leg.kind) continue;
      if (!leg.required_equipment.empty() && id != leg.required_equipment) continue;
      if (eq.current || eq.busy_until > clock_.now()) continue;
      double d = layout_->distance(eq.position, leg.from);
      if (!best || d < best_dist) {
        best = &eq;
        best_dist = d;
      }
    }
    if (!best) continue;  // stays Pending until a unit frees up

    leg.status = LegStatus::Assigned;
    leg.equipment = best->spec.id;
    leg.empty_travel_m = best_dist;
    leg.laden_travel_m = layout_->distance(leg.from, leg.to);
    TimeMs duration =
        static_cast<TimeMs>(std::llround(1000.0 * leg.empty_travel_m / best->spec.speed_empty_ms)) +
        static_cast<TimeMs>(std::llround(1000.0 * leg.laden_travel_m / best->spec.speed_laden_ms));
    if (is_lifting_kind(leg.kind)) duration += best->spec.handling_time_ms;
    leg.start = clock_.now();
    leg.end = leg.start + duration;
    leg.status = LegStatus::Running;

    best->current = {move_id, *idx};
    best->busy_until = leg.end;
    best->position = leg.to;

    SimEvent e;
    e.time = leg.end;
    e.kind = SimEvent::Kind::LegComplete;
    e.move_id = move_id;
    e.leg_index = *idx;
    clock_.push(e);

    out.push_back({move_id, *idx, best->spec.id});
  }
  return out;
}

Completion DispatchSim::advance_clock() {
  SimEvent e = clock_.pop();
  Completion c;
  c.at = e.time;
  if (e.kind == SimEvent::Kind::Callback) {
    c.callback_tag = e.tag;
    return c;
  }
  c.move_id = e.move_id;
  c.leg_index = e.leg_index;
  record_confirmation(e.move_id, e.leg_index);
  c.chain_done = chains_.at(e.move_id).done();
  return c;
}

void DispatchSim::record_confirmation(i64 move_id, std::size_t leg_index) {
  auto it = chains_.find(move_id);
  if (it == chains_.end()) fail(Err::UnknownContainer, "move " + std::to_string(move_id));
  JobChain& chain = it->second;
  if (leg_index >= chain.legs.size())
    fail(Err::NotRunning, "move " + std::to_string(move_id) + " has no leg " +
                              std::to_string(leg_index));
  Leg& leg = chain.legs[leg_index];
  if (leg.status != LegStatus::Running)
    fail(Err::NotRunning, "move " + std::to_string(move_id) + " leg " +
                              std::to_string(leg_index) + " is " + leg_status_name(leg.status));
  leg.status = LegStatus::Done;

  EquipmentState& eq = fleet_.at(leg.equipment);
  eq.current.reset();
  eq.busy_until = clock_.now();

  HistoryEntry h;
  h.equipment = leg.equipment;
  h.kind = leg.kind;
  h.move_id = move_id;
  h.leg_index = leg_index;
  h.action = leg.action;
  h.container = chain.container;
  h.start = leg.start;
  h.end = leg.end;
  h.empty_travel_m = leg.empty_travel_m;
  h.laden_travel_m = leg.laden_travel_m;
  h.rehandle = chain.rehandle;
  history_.push_back(std::move(h));
}

std::vector<IdleEntry> DispatchSim::idle_report() const {
  std::vector<IdleEntry> out;
  for (const auto& [id, eq] : fleet_) {
    if (eq.current || eq.busy_until > clock_.now()) continue;
    out.push_back({id, eq.busy_until, clock_.now() - eq.busy_until});
  }
  return out;
}

bool DispatchSim::all_done() const {
  return std::all_of(chains_.begin(), chains_.end(),
                     [](const auto& kv) { return kv.second.done(); });
}

const JobChain& DispatchSim::chain(i64 move_id) const {
  auto it = chains_.find(move_id);
  if (it == chains_.end()) fail(Err::UnknownContainer, "move " + std::to_string(move_id));
  return it->second;
}

EquipmentState& DispatchSim::equipment(const std::string& id) {
  auto it = fleet_.find(id);
  if (it == fleet_.end()) fail(Err::UnknownTarget, "equipment " + id);
  return it->second;
}

std::string history_to_psv(const std::vector<HistoryEntry>& history) {
  std::string out =
      "equipment|kind|move_id|leg|action|container|start|end|empty_travel_m|laden_travel_m|"
      "rehandle\n";
  char buf[64];
  for (const auto& h : history) {
    out += h.equipment;
    out += '|';
    out += equipment_kind_name(h.kind);
    out += '|';
    out += std::to_string(h.move_id);
    out += '|';
    out += std::to_string(h.leg_index);
    out += '|';
    out += leg_action_name(h.action);
    out += '|';
    out += h.container;
    out += '|';
    out += format_iso8601(h.start);
    out += '|';
    out += format_iso8601(h.end);
    out += '|';
    std::snprintf(buf, sizeof(buf), "%.1f", h.empty_travel_m);
    out += buf;
    out += '|';
    std::snprintf(buf, sizeof(buf), "%.1f", h.laden_travel_m);
    out += buf;
    out += '|';
    out += h.rehandle ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace tos
