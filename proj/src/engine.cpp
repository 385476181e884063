#include "tos/engine.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace tos {

namespace {

// snapshot text escaping for free-form fields
std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '%')
      out += "%25";
    else if (c == '|')
      out += "%7C";
    else if (c == '\n')
      out += "%0A";
    else
      out += c;
  }
  return out;
}

std::string unesc(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      std::string hex = s.substr(i + 1, 2);
      if (hex == "25") { out += '%'; i += 2; continue; }
      if (hex == "7C") { out += '|'; i += 2; continue; }
      if (hex == "0A") { out += '\n'; i += 2; continue; }
    }
    out += s[i];
  }
  return out;
}

std::string opt_str(const std::optional<std::string>& v) { return v ? *v : "-"; }

constexpr TimeMs kDefaultGateStepMs = 2 * 60 * kMsPerSecond;
constexpr TimeMs kDefaultGateRetryMs = 15 * 60 * kMsPerSecond;
constexpr TimeMs kDefaultServiceMs = 30 * 60 * kMsPerSecond;

}  // namespace

const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::Discharge: return "Discharge";
    case MoveKind::Load: return "Load";
    case MoveKind::Rehandle: return "Rehandle";
    case MoveKind::GateIn: return "GateIn";
    case MoveKind::GateOut: return "GateOut";
  }
  return "?";
}

EngineInputs gather_inputs(const std::string& scenario_path, const std::string& terminal_path,
                           const std::string& tariffs_path, const std::string& master_dir,
                           i64 seed) {
  namespace fs = std::filesystem;
  EngineInputs in;
  in.terminal_text = read_text_file(terminal_path);
  in.tariffs_text = read_text_file(tariffs_path);
  in.scenario_text = read_text_file(scenario_path);
  in.scenario_base_dir = fs::path(scenario_path).parent_path().string();
  if (in.scenario_base_dir.empty()) in.scenario_base_dir = ".";
  in.seed = seed;

  static const char* kMasterFiles[] = {"partners.psv", "ports.psv",          "services.psv",
                                       "vessel_profiles.psv", "visits.psv", "iso_types.psv",
                                       "operators.psv",  "shifts.psv",      "equipment.psv",
                                       "staff.psv",      "users.psv",       "config.psv"};
  for (const char* name : kMasterFiles) {
    fs::path p = fs::path(master_dir) / name;
    if (fs::exists(p)) in.master_files[name] = read_text_file(p.string());
  }
  auto optional_file = [&](const char* name) -> std::string {
    fs::path p = fs::path(master_dir) / name;
    return fs::exists(p) ? read_text_file(p.string()) : std::string{};
  };
  in.filters_text = optional_file("filters.psv");
  in.assignments_text = optional_file("assignments.psv");
  in.imo_rules_text = optional_file("imo_rules.psv");
  in.mapping_text = optional_file("edi_mapping.psv");
  std::string stacking = optional_file("stacking.psv");
  in.stacking_keys = "HeavierOnTop";
  if (!stacking.empty()) {
    auto f = DelimitedFile::from_string(stacking, "stacking.psv");
    if (!f.rows().empty()) in.stacking_keys = f.rows()[0][f.col("keys")];
  }
  return in;
}

// ---- construction ---------------------------------------------------------------

Engine::Engine(EngineInputs inputs) : inputs_(std::move(inputs)) {
  parse_inputs();
  // seed the event stream: one callback per scenario event, chained
  if (!scenario_.events.empty()) {
    sim_.clock().restore_now(std::min<TimeMs>(scenario_.events.front().at, 0));
    sim_.push_callback(scenario_.events.front().at, "scen:0");
    run_begin_ = scenario_.events.front().at;
  }
}

void Engine::parse_inputs() {
  terminal_ = parse_terminal_file(inputs_.terminal_text, "terminal");
  tariffs_ = parse_tariffs(inputs_.tariffs_text, "tariffs");

  {  // master files, parsed straight from the embedded texts
    MasterStore m;
    auto have = [&](const char* n) { return inputs_.master_files.count(n) > 0; };
    auto text = [&](const char* n) { return inputs_.master_files.at(n); };
    if (have("ports.psv")) {
      auto f = DelimitedFile::from_string(text("ports.psv"), "ports.psv");
      auto c_code = f.col("code"), c_name = f.col("name");
      for (const auto& r : f.rows()) m.upsert_port({r[c_code], r[c_name]});
    }
    if (have("partners.psv")) {
      auto f = DelimitedFile::from_string(text("partners.psv"), "partners.psv");
      auto c_id = f.col("id"), c_kind = f.col("kind"), c_name = f.col("name");
      for (const auto& r : f.rows())
        m.upsert_partner({r[c_id], parse_partner_kind(r[c_kind]), r[c_name], false});
    }
    if (have("services.psv")) {
      auto f = DelimitedFile::from_string(text("services.psv"), "services.psv");
      auto c_id = f.col("id"), c_name = f.col("name"), c_rot = f.col("rotation");
      for (const auto& r : f.rows()) {
        MaritimeService s{r[c_id], r[c_name], {}};
        if (!r[c_rot].empty()) s.rotation = split(r[c_rot], ',');
        m.upsert_service(s);
      }
    }
    if (have("vessel_profiles.psv")) {
      auto f = DelimitedFile::from_string(text("vessel_profiles.psv"), "vessel_profiles.psv");
      auto c_name = f.col("name"), c_loa = f.col("loa_m"), c_draft = f.col("draft_m"),
           c_bays = f.col("bays"), c_rows = f.col("rows"), c_tiers = f.col("tiers"),
           c_msw = f.col("max_stack_weight_kg"), c_msh = f.col("max_stack_height");
      for (const auto& r : f.rows()) {
        VesselProfile p;
        p.name = r[c_name];
        p.loa_m = parse_double(r[c_loa], "loa_m");
        p.draft_m = parse_double(r[c_draft], "draft_m");
        p.bays = static_cast<int>(parse_int(r[c_bays], "bays"));
        p.rows = static_cast<int>(parse_int(r[c_rows], "rows"));
        p.tiers = static_cast<int>(parse_int(r[c_tiers], "tiers"));
        p.max_stack_weight_kg = parse_int(r[c_msw], "max_stack_weight_kg");
        p.max_stack_height = static_cast<int>(parse_int(r[c_msh], "max_stack_height"));
        m.upsert_profile(p);
      }
    }
    if (have("iso_types.psv"))
      m.set_size_types(SizeTypeTable::from_file(
          DelimitedFile::from_string(text("iso_types.psv"), "iso_types.psv")));
    if (have("equipment.psv")) {
      auto f = DelimitedFile::from_string(text("equipment.psv"), "equipment.psv");
      auto c_id = f.col("id"), c_kind = f.col("kind"), c_se = f.col("speed_empty_ms"),
           c_sl = f.col("speed_laden_ms"), c_ht = f.col("handling_time_s"),
           c_home = f.col("home_zone");
      for (const auto& r : f.rows()) {
        EquipmentSpec e;
        e.id = r[c_id];
        e.kind = parse_equipment_kind(r[c_kind]);
        e.speed_empty_ms = parse_double(r[c_se], "speed_empty_ms");
        e.speed_laden_ms = parse_double(r[c_sl], "speed_laden_ms");
        e.handling_time_ms = parse_int(r[c_ht], "handling_time_s") * kMsPerSecond;
        e.home_zone = r[c_home];
        m.upsert_equipment(e);
      }
    }
    if (have("users.psv")) {
      auto f = DelimitedFile::from_string(text("users.psv"), "users.psv");
      auto c_user = f.col("user"), c_role = f.col("role");
      for (const auto& r : f.rows()) m.upsert_user({r[c_user], parse_role(r[c_role])});
    }
    if (have("config.psv")) {
      auto f = DelimitedFile::from_string(text("config.psv"), "config.psv");
      auto c_key = f.col("key"), c_val = f.col("value");
      for (const auto& r : f.rows()) m.set_config(r[c_key], r[c_val]);
    }
    m.check_integrity();
    master_ = std::move(m);
  }

  if (!inputs_.filters_text.empty())
    filters_ = parse_filters(DelimitedFile::from_string(inputs_.filters_text, "filters.psv"));
  if (!inputs_.assignments_text.empty())
    assignments_ = parse_assignments(
        DelimitedFile::from_string(inputs_.assignments_text, "assignments.psv"), filters_,
        terminal_.layout);
  stacking_ = parse_stacking_policy(inputs_.stacking_keys.empty() ? "HeavierOnTop"
                                                                  : inputs_.stacking_keys);
  if (!inputs_.imo_rules_text.empty())
    imo_ = ImoRuleTable::from_file(
        DelimitedFile::from_string(inputs_.imo_rules_text, "imo_rules.psv"));
  mapping_ = inputs_.mapping_text.empty()
                 ? EdiMapping::builtin()
                 : EdiMapping::from_file(
                       DelimitedFile::from_string(inputs_.mapping_text, "edi_mapping.psv"));
  scenario_ = parse_scenario(inputs_.scenario_text, inputs_.scenario_base_dir, "scenario",
                             /*check_files=*/true);

  local_port_ = terminal_.config.get("local_port");
  for (const auto& z : split(terminal_.config.get_or("unavailable_zones", ""), ','))
    if (!z.empty()) {
      if (!terminal_.layout.has_node(z))
        fail(Err::DanglingReference, "unavailable zone " + z + " not in layout");
      unavailable_zones_.insert(z);
    }
  clearance_m_ = terminal_.config.get_double("clearance_m", 10.0);
  crane_rate_ = terminal_.config.get_double("crane_rate_moves_per_hour", 25.0);
  gate_step_ms_ = terminal_.config.get_int("gate_step_s", kDefaultGateStepMs / 1000) * 1000;
  gate_retry_ms_ = terminal_.config.get_int("gate_retry_s", kDefaultGateRetryMs / 1000) * 1000;
  gate_max_retries_ = static_cast<int>(terminal_.config.get_int("gate_max_retries", 16));
  reefer_tolerance_c_ = terminal_.config.get_double("reefer_tolerance_c", 2.0);

  berth_.quay = terminal_.quay;
  berth_.horizon_begin = 0;
  berth_.horizon_end = parse_iso8601(
      terminal_.config.get_or("horizon_end", "2100-01-01T00:00:00Z"));

  sim_.set_layout(&terminal_.layout);
  for (const auto& [id, spec] : master_.equipment()) {
    if (!terminal_.layout.has_node(spec.home_zone))
      fail(Err::DanglingReference, "equipment " + id + " home zone " + spec.home_zone);
    sim_.add_equipment(spec);
  }
  for (const auto& crane : terminal_.quay.crane_pool)
    if (!master_.find_equipment(crane))
      fail(Err::DanglingReference, "quay crane pool references unknown equipment " + crane);
}

// ---- small helpers ----------------------------------------------------------------

void Engine::log(TimeMs at, const std::string& what) {
  run_log_.push_back(format_iso8601(at) + " " + what);
}

void Engine::audit_cmd(TimeMs at, const std::string& user, const std::string& command) {
  if (!master_.find_user(user)) return;  // scenarios without a user table skip auditing
  if (authorize(user, command, master_, audit_, at) == AuthOutcome::Deny)
    log(at, "DENIED " + user + " " + command);
}

std::string Engine::next_edi_ref() { return std::to_string(edi_ref_++); }

void Engine::add_billing_event(const std::string& record_type, const std::string& service_code,
                               const std::string& client, const std::string& container, i64 qty,
                               TimeMs at, EventSource source) {
  BillingEvent e;
  e.event_id = next_billing_id_++;
  e.record_type = record_type;
  e.service_code = service_code;
  e.client = client;
  e.container = container;
  e.qty = qty;
  e.occurred_at = at;
  e.source = source;
  billing_events_.push_back(std::move(e));
}

void Engine::open_storage(const std::string& container, const std::string& client, TimeMs at) {
  storage_in_[container] = at;
  storage_client_[container] = client;
}

void Engine::close_storage(const std::string& container, TimeMs at) {
  auto it = storage_in_.find(container);
  if (it == storage_in_.end()) return;
  closed_storage_.push_back(
      {container, storage_client_.count(container) ? storage_client_[container] : "", it->second,
       at});
  storage_in_.erase(it);
  storage_client_.erase(container);
}

void Engine::trace_yard() {
  if (record_traces_) yard_trace_.push_back(physical_);
}

void Engine::trace_stow(const std::string& visit_id, const StowagePlan& plan) {
  if (record_traces_) stow_trace_.emplace_back(visit_id, plan);
}

Container Engine::container_from_entry(const StowEntry& e) const {
  Container c;
  c.id = e.container;
  c.size_type = e.size_type;
  c.gross_weight_kg = e.weight_kg;
  c.status = ContainerStatus::Full;
  c.imo_class = e.imo_class;
  c.pol = e.pol.empty() ? "XXUNK" : e.pol;
  c.pod = e.final_destination ? *e.final_destination : e.pod;
  c.transaction = e.final_destination && *e.final_destination != local_port_
                      ? Transaction::Transshipment
                      : Transaction::Import;
  const IsoSizeType& st = master_.size_types().decode(c.size_type);
  if (st.group == SizeGroup::Reefer) c.reefer = ReeferAttrs{-18.0};
  return c;
}

Container Engine::container_from_order(const ServiceOrder& o) const {
  auto it = known_boxes_.find(o.container->str());
  if (it == known_boxes_.end())
    fail(Err::MissingContainer, o.order_id + ": container " + o.container->str() +
                                    " has no registered attributes");
  return it->second;
}

YardPosition Engine::plan_into_yard(const Container& c, const std::string& service,
                                    const std::string& vessel_binding) {
  auto filter_id = classify_container(c, filters_, master_.size_types(), service);
  std::string collection = filter_id.value_or("");
  const AreaAssignment* assignment = nullptr;
  if (filter_id)
    for (const auto& a : assignments_)
      if (a.filter_id == *filter_id) {
        assignment = &a;
        break;
      }
  AreaAssignment fallback;
  if (!assignment) {
    // unmatched containers go to the manual-planning queue; the simulated
    // operator plans them over all zones in layout order
    fallback.filter_id = collection;
    fallback.zones = terminal_.layout.zones();
    fallback.strategy = default_strategy(c.transaction);
    assignment = &fallback;
    if (!filter_id) log(sim_.clock().now(), "manual planning for unmatched " + c.id.str());
  }
  // zones closed for maintenance are withheld from planning
  AreaAssignment open_zones = *assignment;
  if (!unavailable_zones_.empty()) {
    std::erase_if(open_zones.zones,
                  [&](const std::string& z) { return unavailable_zones_.count(z) > 0; });
    if (open_zones.zones.empty())
      fail(Err::NoFeasibleSlot, c.id.str() + ": every assigned zone is unavailable");
  }
  YardPosition pos = plan_slot(c, open_zones, planned_, terminal_.layout, imo_, stacking_,
                               master_.size_types(), vessel_binding);
  planned_.place(c, pos, terminal_.layout, collection, vessel_binding);
  return pos;
}

// ---- chain plumbing -----------------------------------------------------------------

i64 Engine::new_move(MoveMeta meta, const std::string& from, const std::string& to,
                     const std::string& required_quay_crane) {
  i64 id = next_move_id_++;
  JobChain chain = expand_move(id, meta.container, from, to, terminal_.layout);
  chain.rehandle = meta.kind == MoveKind::Rehandle || meta.restow;
  if (!required_quay_crane.empty())
    for (auto& leg : chain.legs)
      if (leg.kind == EquipmentKind::QuayCrane) leg.required_equipment = required_quay_crane;
  sim_.add_chain(std::move(chain));
  move_meta_[id] = std::move(meta);
  return id;
}

void Engine::gate_leg_on_stack(i64 move_id, std::size_t leg_index, const YardPosition& pos) {
  std::string key = "stack:" + pos.block + ":" + std::to_string(pos.bay) + ":" +
                    std::to_string(pos.row);
  auto it = last_touch_.find(key);
  auto& chain = sim_.chains_mut().at(move_id);
  if (it != last_touch_.end()) chain.legs.at(leg_index).prereqs.push_back(it->second);
  last_touch_[key] = {move_id, leg_index};
}

void Engine::gate_leg_on_prev(i64 move_id, std::size_t leg_index, i64 prev_move,
                              std::size_t prev_leg) {
  if (prev_move == 0) return;
  sim_.chains_mut().at(move_id).legs.at(leg_index).prereqs.push_back({prev_move, prev_leg});
}

// Relocates everything stacked above `container_id` (planned state) to spare
// slots in the same block, one rehandle chain per blocker. Returns the moves
// the target's lift must wait for.
std::vector<i64> Engine::dig_out(const std::string& container_id, const std::string& client) {
  std::vector<i64> gates;
  const StoredContainer* sc = planned_.find(container_id);
  if (!sc) fail(Err::UnknownContainer, container_id + " not in planned yard");
  YardPosition pos = sc->pos;
  auto stack = planned_.stack_ids(pos.block, pos.bay, pos.row);
  std::vector<std::string> blockers(stack.begin() + pos.tier, stack.end());
  std::reverse(blockers.begin(), blockers.end());  // top first

  const Block& block = terminal_.layout.block(pos.block);
  for (const auto& blocker : blockers) {
    const StoredContainer b = *planned_.find(blocker);
    // lowest free stack in the same block, skipping the stack being dug;
    // segregation still applies to relocations (stacking preferences do not)
    planned_.remove(b.box.id);
    std::optional<YardPosition> target;
    for (int bay = 1; bay <= block.bays && !target; ++bay)
      for (int row = 1; row <= block.rows && !target; ++row) {
        if (bay == pos.bay && row == pos.row) continue;
        int h = planned_.stack_height(pos.block, bay, row);
        if (h >= block.max_tier) continue;
        YardPosition candidate{pos.block, bay, row, h + 1};
        if (b.box.imo_class &&
            !check_imo_placement(planned_, terminal_.layout, candidate, *b.box.imo_class,
                                 imo_)
                 .ok)
          continue;
        target = candidate;
      }
    if (!target)
      fail(Err::NoFeasibleSlot, "no spare slot in block " + pos.block + " to dig out " +
                                    container_id);
    MoveMeta meta;
    meta.kind = MoveKind::Rehandle;
    meta.container = blocker;
    meta.client = client;
    meta.place_at = target;
    meta.size_type = b.box.size_type;
    meta.collection = b.collection;
    meta.vessel_binding = b.vessel;
    std::string zone = terminal_.layout.zone_of_block(pos.block);
    i64 mv = new_move(meta, zone, zone);
    // single-leg chain: ordered against both stacks
    gate_leg_on_stack(mv, 0, b.pos);
    gate_leg_on_stack(mv, 0, *target);
    planned_.place(b.box, *target, terminal_.layout, b.collection, b.vessel);
    gates.push_back(mv);
  }
  return gates;
}

// ---- run loop -----------------------------------------------------------------------

RunOutputs Engine::run() {
  while (sim_.has_pending_events()) {
    // mid-run snapshot request: taken just before the first scenario event
    // at or after the requested time, with the queue intact
    if (snapshot_at_ >= 0 && pending_snapshot_.empty()) {
      const auto& [key, ev] = *sim_.clock().pending().begin();
      if (ev.kind == SimEvent::Kind::Callback && starts_with(ev.tag, "scen:")) {
        std::size_t idx = static_cast<std::size_t>(parse_int(ev.tag.substr(5), "scen idx"));
        if (scenario_.events[idx].at >= snapshot_at_) pending_snapshot_ = snapshot();
      }
    }
    Completion c = sim_.advance_clock();
    if (!c.callback_tag.empty()) {
      const std::string& tag = c.callback_tag;
      if (starts_with(tag, "scen:")) {
        std::size_t idx = static_cast<std::size_t>(parse_int(tag.substr(5), "scen idx"));
        next_scenario_idx_ = idx + 1;
        if (next_scenario_idx_ < scenario_.events.size())
          sim_.push_callback(scenario_.events[next_scenario_idx_].at,
                             "scen:" + std::to_string(next_scenario_idx_));
        handle_scenario(scenario_.events[idx]);
      } else if (starts_with(tag, "berth:")) {
        begin_vessel_work(tag.substr(6));
      } else if (starts_with(tag, "gate:")) {
        gate_step(tag.substr(5));
      } else if (starts_with(tag, "svc:")) {
        run_service_order(tag.substr(4));
      }
    } else {
      on_leg_complete(c);
    }
    sim_.dispatch_next();
  }
  check_conservation();
  return collect_outputs();
}

void Engine::handle_scenario(const ScenarioEvent& e) {
  switch (e.kind) {
    case ScenarioKind::VesselArrival: on_vessel_arrival(e); break;
    case ScenarioKind::TruckArrival: on_truck_arrival(e); break;
    case ScenarioKind::OrderIntake: on_order_intake(e); break;
    case ScenarioKind::HoldCommand: on_hold(e); break;
    case ScenarioKind::LockCommand: on_lock(e); break;
    case ScenarioKind::ReeferReading: on_reefer(e); break;
    case ScenarioKind::Advance: {
      Advance a;
      a.client = e.get("client");
      a.amount = parse_int(e.get("amount_cents"), "amount_cents");
      if (a.amount <= 0) fail(Err::ValidationFailed, "advance must be positive");
      a.received_at = e.at;
      a.remaining = a.amount;
      advances_.push_back(a);
      audit_cmd(e.at, "billing", "billing.invoice");
      log(e.at, "advance " + std::to_string(a.amount) + " cents from " + a.client);
      break;
    }
    case ScenarioKind::Accident:
      work_accidents_ += parse_int(e.get_or("count", "1"), "count");
      break;
  }
}

// ---- vessel flow ---------------------------------------------------------------------

void Engine::on_vessel_arrival(const ScenarioEvent& e) {
  const std::string& visit_id = e.get("visit");
  if (!master_.find_visit(visit_id)) {
    VesselVisit v;
    v.visit_id = visit_id;
    v.profile = e.get("vessel");
    v.eta = e.has("eta") ? parse_iso8601(e.get("eta")) : e.at;
    v.etd = parse_iso8601(e.get("etd"));
    v.service = e.get_or("service", "");
    master_.upsert_visit(v);
  }
  const VesselVisit& visit = *master_.find_visit(visit_id);
  const VesselProfile& profile = *master_.find_profile(visit.profile);

  VisitOps ops;
  ops.visit_id = visit_id;
  ops.client = e.get_or("client", "");
  ops.arrival_plan = StowagePlan(visit_id);
  ops.load_plan = StowagePlan(visit_id);

  namespace fs = std::filesystem;
  if (e.has("baplie")) {
    std::string path = (fs::path(scenario_.base_dir) / e.get("baplie")).string();
    auto doc = tokenize(read_text_file(path));
    auto parsed = parse_baplie(doc, mapping_);
    for (const auto& w : parsed.warnings) log(e.at, "baplie " + visit_id + ": " + w);
    for (const auto& entry : parsed.entries) ops.arrival_plan.add(entry, profile);
    trace_stow(visit_id, ops.arrival_plan);
  }
  if (e.has("movins")) {
    std::string path = (fs::path(scenario_.base_dir) / e.get("movins")).string();
    auto doc = tokenize(read_text_file(path));
    auto parsed = parse_movins(doc, mapping_);
    for (const auto& w : parsed.warnings) log(e.at, "movins " + visit_id + ": " + w);
    ops.movins = parsed.instructions;
  }

  audit_cmd(e.at, e.get_or("user", "planner"), "berth.allocate");
  BerthWindow w = allocate_berth(berth_, visit, profile, clearance_m_);
  log(e.at, "visit " + visit_id + " berthed [" + std::to_string(w.start_m) + "m," +
                std::to_string(w.end_m) + "m) from " + format_iso8601(w.start));
  visits_[visit_id] = std::move(ops);
  sim_.push_callback(std::max(w.start, e.at), "berth:" + visit_id);
}

namespace {

std::set<std::string> restow_ids_of(const std::vector<MovinsInstruction>& movins) {
  std::set<std::string> out;
  for (const auto& ins : movins)
    if (ins.kind == MovinsKind::Restow && ins.container) out.insert(ins.container->str());
  return out;
}

}  // namespace

void Engine::begin_vessel_work(const std::string& visit_id) {
  TimeMs now = sim_.clock().now();
  VesselVisit& visit = master_.visit(visit_id);
  const VesselProfile& profile = *master_.find_profile(visit.profile);
  VisitOps& ops = visits_.at(visit_id);
  advance_visit(visit, VisitStatus::Berthed);
  advance_visit(visit, VisitStatus::Working);

  std::set<std::string> restows = restow_ids_of(ops.movins);
  auto discharge_list = build_discharge_list(ops.arrival_plan, local_port_, restows);
  list_exports_["discharge_list_" + visit_id + ".psv"] = stow_entries_to_psv(discharge_list);
  int load_estimate = static_cast<int>(restows.size());
  for (const auto& ins : ops.movins)
    if (ins.kind == MovinsKind::Load) ++load_estimate;
  int move_estimate = static_cast<int>(discharge_list.size()) + load_estimate;

  CraneAssignment ca = assign_cranes(visit, profile, move_estimate, crane_rate_, berth_.quay);
  if (ca.infeasible)
    log(now, "visit " + visit_id + " needs " + std::to_string(ca.required) +
                 " cranes, only " + std::to_string(ca.assigned) + " available");
  ops.cranes = ca.crane_ids;
  if (BerthWindow* w = berth_.find_mut(visit_id)) w->cranes = ca.crane_ids;

  if (move_estimate == 0) {
    ops.phase = VisitOps::Phase::Finished;
    finish_visit(ops);
    return;
  }

  const std::string quay_node = terminal_.config.get("quay_node");
  auto queues = sequence_moves(discharge_list, StowagePlan{}, physical_, ops.cranes);
  for (const auto& q : queues) {
    std::pair<i64, std::size_t> prev{0, 0};
    for (const auto& m : q.moves) {
      const StowEntry* entry = ops.arrival_plan.at(*m.cell);
      Container box = container_from_entry(*entry);
      validate_container(box, master_.size_types());
      YardPosition slot = plan_into_yard(box, visit.service, visit_id);
      known_boxes_[box.id.str()] = box;
      traffic_[box.id.str()] = {master_.size_types().decode(box.size_type).teu(),
                                box.imo_class ? std::optional(box.imo_class->code)
                                              : std::nullopt};
      MoveMeta meta;
      meta.kind = MoveKind::Discharge;
      meta.restow = restows.count(box.id.str()) > 0;
      meta.container = box.id.str();
      meta.visit = visit_id;
      meta.client = ops.client;
      meta.place_at = slot;
      meta.cell = m.cell;
      meta.size_type = box.size_type;
      meta.collection = planned_.find(box.id)->collection;
      meta.vessel_binding = visit_id;
      i64 mv = new_move(meta, quay_node, terminal_.layout.zone_of_block(slot.block),
                        q.crane_id);
      gate_leg_on_prev(mv, 0, prev.first, prev.second);  // crane works its queue in order
      gate_leg_on_stack(mv, 2, slot);
      prev = {mv, 0};
      ops.open_moves.insert(mv);
    }
  }
  ops.phase = VisitOps::Phase::Discharging;
  log(now, "visit " + visit_id + " discharging " + std::to_string(discharge_list.size()) +
               " containers with " + std::to_string(ops.cranes.size()) + " cranes");
  if (ops.open_moves.empty()) start_load_phase(ops);
}

void Engine::start_load_phase(VisitOps& ops) {
  TimeMs now = sim_.clock().now();
  const VesselVisit& visit = *master_.find_visit(ops.visit_id);
  const VesselProfile& profile = *master_.find_profile(visit.profile);
  ops.phase = VisitOps::Phase::Loading;

  LoadList list = build_load_list(ops.movins, physical_);
  list_exports_["load_list_" + ops.visit_id + ".psv"] = load_list_to_psv(list);
  for (const auto& ins : list.missing)
    ops.load_skips.push_back(ins.container->str() + ": not in yard");
  for (const auto& dup : list.duplicates)
    ops.load_skips.push_back(dup + ": duplicate instruction, first kept");

  std::vector<LoadItem> items;
  for (const auto& ins : list.loadable) {
    std::string id = ins.container->str();
    if (orders_.container_held(id)) {
      ops.load_skips.push_back(id + ": active hold, not loaded");
      continue;
    }
    const StoredContainer& sc = *physical_.find(id);
    LoadItem item;
    item.container = *ins.container;
    item.size_type = sc.box.size_type;
    item.weight_kg = sc.box.gross_weight_kg;
    item.pod = sc.box.pod;
    item.bay_preference = ins.bay_preference;
    items.push_back(std::move(item));
  }

  // restow pairs go back aboard: exact target cells when instructed,
  // otherwise with the regular loads
  StowagePlan work = ops.arrival_plan;
  StowagePlan restow_delta(ops.visit_id);
  std::set<std::string> restow_ids = restow_ids_of(ops.movins);
  for (const auto& ins : ops.movins) {
    if (ins.kind != MovinsKind::Restow || !ins.container) continue;
    std::string id = ins.container->str();
    const StoredContainer* sc = physical_.find(id);
    if (!sc) {
      ops.load_skips.push_back(id + ": restow box not ashore, skipped");
      continue;
    }
    StowEntry entry;
    entry.container = *ins.container;
    entry.size_type = sc->box.size_type;
    entry.weight_kg = sc->box.gross_weight_kg;
    entry.pod = sc->box.pod;
    entry.pol = sc->box.pol;
    if (ins.cell) {
      entry.position = *ins.cell;
      work.add(entry, profile);
      restow_delta.add_unchecked(entry);
    } else {
      LoadItem item;
      item.container = *ins.container;
      item.size_type = entry.size_type;
      item.weight_kg = entry.weight_kg;
      item.pod = entry.pod;
      items.push_back(std::move(item));
    }
  }

  if (items.empty() && restow_delta.size() == 0) {
    for (const auto& skip : ops.load_skips) log(now, "visit " + ops.visit_id + ": " + skip);
    finish_visit(ops);
    return;
  }

  StowResult stow = assign_stow_positions(items, profile, ops.visit_id, work);
  for (const auto& note : stow.notes) log(now, "stow " + ops.visit_id + ": " + note);
  ops.load_plan = stow.delta;
  for (const auto& [cell, entry] : restow_delta.entries()) ops.load_plan.add_unchecked(entry);
  for (const auto& [cell, entry] : stow.delta.entries()) work.add_unchecked(entry);
  work.check_invariants(profile);
  trace_stow(ops.visit_id, work);

  const std::string quay_node = terminal_.config.get("quay_node");
  auto queues = sequence_loading(ops.load_plan, planned_, ops.cranes);
  int restows = detect_restows(queues, planned_);
  if (restows > 0)
    log(now, "visit " + ops.visit_id + ": load order induces " + std::to_string(restows) +
                 " yard rehandles");

  for (const auto& q : queues) {
    std::pair<i64, std::size_t> prev{0, 0};
    for (const auto& m : q.moves) {
      std::string id = m.container.str();
      if (!planned_.find(id)) {
        // already committed to a gate delivery between list build and now
        ops.load_skips.push_back(id + ": claimed by another move, not loaded");
        continue;
      }
      const StoredContainer sc = *planned_.find(id);
      auto rehandle_moves = dig_out(id, ops.client);
      MoveMeta meta;
      meta.kind = MoveKind::Load;
      meta.restow = restow_ids.count(id) > 0;
      meta.container = id;
      meta.visit = ops.visit_id;
      meta.client = ops.client;
      meta.cell = m.cell;
      meta.size_type = sc.box.size_type;
      i64 mv = new_move(meta, terminal_.layout.zone_of_block(sc.pos.block), quay_node,
                        q.crane_id);
      gate_leg_on_stack(mv, 0, sc.pos);
      for (i64 r : rehandle_moves) gate_leg_on_prev(mv, 0, r, 0);
      gate_leg_on_prev(mv, 2, prev.first, prev.second);  // crane stows its bays in order
      prev = {mv, 2};
      planned_.remove(sc.box.id);
      ops.open_moves.insert(mv);
    }
  }
  for (const auto& skip : ops.load_skips) log(now, "visit " + ops.visit_id + ": " + skip);
  log(now, "visit " + ops.visit_id + " loading " + std::to_string(items.size()) + " containers");
  if (ops.open_moves.empty()) finish_visit(ops);
}

void Engine::finish_visit(VisitOps& ops) {
  TimeMs now = sim_.clock().now();
  VesselVisit& visit = master_.visit(ops.visit_id);
  if (visit.status == VisitStatus::Announced) {
    advance_visit(visit, VisitStatus::Berthed);
    advance_visit(visit, VisitStatus::Working);
  }
  if (!ops.confirmed.empty()) {
    EdifactDocument doc = emit_coarri(visit, ops.confirmed, terminal_.config.get_or("sender", "TERMINAL"),
                                      ops.client.empty() ? "PARTNER" : ops.client,
                                      next_edi_ref());
    edi_out_["coarri_" + ops.visit_id + ".edi"] = doc;
  }
  advance_visit(visit, VisitStatus::Closed);
  ops.phase = VisitOps::Phase::Finished;
  if (!ops.client.empty())
    add_billing_event("vessel", "VESSEL_SVC", ops.client, "", 1, now);
  log(now, "visit " + ops.visit_id + " closed (" + std::to_string(ops.confirmed.size()) +
               " confirmed moves)");
}

// ---- orders & gate -------------------------------------------------------------------

void Engine::on_order_intake(const ScenarioEvent& e) {
  // partners can also lodge orders as CODECO-style EDI: gate-in groups become
  // receipt requests, gate-out groups delivery requests
  if (e.has("edi")) {
    namespace fs = std::filesystem;
    std::string path = (fs::path(scenario_.base_dir) / e.get("edi")).string();
    auto events = parse_codeco(tokenize(read_text_file(path)));
    std::string prefix = e.get_or("id_prefix", "EDI");
    i64 weight = parse_int(e.get_or("weight", "20000"), "weight");
    int n = 0;
    for (const auto& ge : events) {
      OrderPayload p;
      p.order_id = prefix + std::to_string(++n);
      p.type = ge.gate_in ? OrderType::ReceiveFullByTruck : OrderType::DeliverFullToTruck;
      p.client = e.get_or("client", "");
      p.container = ge.container;
      p.customs_cleared = e.get_or("customs", "1") == "1";
      p.at = e.at;
      audit_cmd(e.at, e.get_or("user", "gate"), "order.create");
      ServiceOrder& order = manage_order(orders_, OrderAction::Create, p);
      if (ge.gate_in && !known_boxes_.count(ge.container.str())) {
        Container box;
        box.id = ge.container;
        box.size_type = ge.size_type;
        box.gross_weight_kg = weight;
        box.pol = local_port_;
        box.pod = e.get_or("pod", local_port_);
        box.transaction = box.pod == local_port_ ? Transaction::Import : Transaction::Export;
        validate_container(box, master_.size_types());
        known_boxes_[box.id.str()] = box;
        traffic_[box.id.str()] = {master_.size_types().decode(box.size_type).teu(),
                                  std::nullopt};
      }
      validate_order(orders_, order.order_id);
      log(e.at, "order " + order.order_id + " (" + order_type_name(order.type) +
                    ") taken from EDI");
    }
    return;
  }
  const std::string action = e.get_or("action", "create");
  if (action == "amend" || action == "cancel") {
    OrderPayload p;
    p.order_id = e.get("id");
    p.at = e.at;
    if (e.has("visit")) p.visit = e.get("visit");
    if (e.has("plate")) p.expected_plate = e.get("plate");
    if (e.has("seals")) p.expected_seals = split(e.get("seals"), ',');
    if (e.has("customs")) p.customs_cleared = e.get("customs") == "1";
    p.cancel_reason = e.get_or("reason", "");
    audit_cmd(e.at, e.get_or("user", "gate"),
              action == "amend" ? "order.amend" : "order.cancel");
    manage_order(orders_, action == "amend" ? OrderAction::Amend : OrderAction::Cancel, p);
    log(e.at, "order " + p.order_id + " " + action + "ed");
    return;
  }
  OrderPayload p;
  p.order_id = e.get("id");
  p.type = parse_order_type(static_cast<int>(parse_int(e.get("type"), "order type")));
  p.client = e.get_or("client", "");
  p.at = e.at;
  if (e.has("container")) p.container = validate_container_id(e.get("container"));
  if (e.has("visit")) p.visit = e.get("visit");
  if (e.has("plate")) p.expected_plate = e.get("plate");
  if (e.has("seals")) p.expected_seals = split(e.get("seals"), ',');
  p.customs_cleared = e.get_or("customs", "1") == "1";

  audit_cmd(e.at, e.get_or("user", "gate"), "order.create");
  ServiceOrder& order = manage_order(orders_, OrderAction::Create, p);

  // register container attributes for receipts and service orders
  if (e.has("container") && e.has("size")) {
    Container box;
    box.id = *p.container;
    box.size_type = e.get("size");
    box.gross_weight_kg = parse_int(e.get_or("weight", "20000"), "weight");
    box.status = e.get_or("status", "Full") == "Empty" ? ContainerStatus::Empty
                                                       : ContainerStatus::Full;
    box.pol = e.get_or("pol", local_port_);
    box.pod = e.get_or("pod", local_port_);
    if (e.has("imo")) box.imo_class = ImoClass{e.get("imo")};
    if (e.has("reefer_setpoint"))
      box.reefer = ReeferAttrs{parse_double(e.get("reefer_setpoint"), "setpoint")};
    box.transaction = box.pod == local_port_ ? Transaction::Import : Transaction::Export;
    if (e.has("seals")) box.seal_numbers = split(e.get("seals"), ',');
    validate_container(box, master_.size_types());
    known_boxes_[box.id.str()] = box;
    traffic_[box.id.str()] = {master_.size_types().decode(box.size_type).teu(),
                              box.imo_class ? std::optional(box.imo_class->code) : std::nullopt};
  }

  validate_order(orders_, order.order_id);
  log(e.at, "order " + order.order_id + " (" + order_type_name(order.type) + ") validated");

  // stand-alone billable services execute on their own schedule
  static const std::set<OrderType> kAutoServices = {
      OrderType::SealVerification, OrderType::SealWarehousing, OrderType::ContainerCondition,
      OrderType::ImoStickerControl, OrderType::CfsOperations, OrderType::FumigationCleaning,
      OrderType::CustomsInspection, OrderType::VesselServices, OrderType::ReeferPreTrip};
  if (kAutoServices.count(order.type))
    sim_.push_callback(e.at + kDefaultServiceMs, "svc:" + order.order_id);
}

void Engine::run_service_order(const std::string& order_id) {
  TimeMs now = sim_.clock().now();
  ServiceOrder& o = orders_.order(order_id);
  if (o.status != OrderStatus::Validated) return;  // cancelled or already running
  if (o.has_active_hold() || (o.container && orders_.container_held(o.container->str()))) {
    sim_.push_callback(now + gate_retry_ms_, "svc:" + order_id);
    return;
  }
  start_order(orders_, order_id);
  complete_order(orders_, order_id);
  static const std::map<OrderType, std::string> kServiceCodes = {
      {OrderType::SealVerification, "SEAL_VERIFY"},
      {OrderType::SealWarehousing, "SEAL_STORE"},
      {OrderType::ContainerCondition, "CONDITION_CHECK"},
      {OrderType::ImoStickerControl, "IMO_CHECK"},
      {OrderType::CfsOperations, "CFS"},
      {OrderType::FumigationCleaning, "FUMIGATION"},
      {OrderType::CustomsInspection, "INSPECTION"},
      {OrderType::VesselServices, "VESSEL_SVC"},
      {OrderType::ReeferPreTrip, "PRETRIP"},
  };
  auto it = kServiceCodes.find(o.type);
  if (it != kServiceCodes.end())
    add_billing_event("special", it->second, o.client,
                      o.container ? o.container->str() : "", 1, now);
  log(now, "service order " + order_id + " completed");
}

void Engine::on_truck_arrival(const ScenarioEvent& e) {
  GateOps g;
  g.txn.plate = e.get("plate");
  g.txn.order_ids = split(e.get("orders"), ',');
  for (const auto& oid : g.txn.order_ids) orders_.order(oid);  // must exist
  g.txn.timestamps.emplace_back(GateState::ArrivedPreGate, e.at);
  if (gates_.count(g.txn.plate))
    fail(Err::DuplicateId, "truck " + g.txn.plate + " already inside");
  gates_[g.txn.plate] = std::move(g);
  audit_cmd(e.at, e.get_or("user", "gate"), "gate.advance");
  log(e.at, "truck " + e.get("plate") + " at pre-gate");
  sim_.push_callback(e.at + gate_step_ms_, "gate:" + e.get("plate"));
}

void Engine::gate_step(const std::string& plate) {
  GateOps& g = gates_.at(plate);
  if (g.parked) return;
  TimeMs now = sim_.clock().now();
  try {
    switch (g.txn.state) {
      case GateState::ArrivedPreGate: {
        gate_advance(g.txn, orders_, now);  // -> AdminChecked
        std::string zone = terminal_.config.get("interchange_zone");
        instruction_docs_.push_back(plate + "|" + join(g.txn.order_ids, ',') + "|" + zone);
        sim_.push_callback(now + gate_step_ms_, "gate:" + plate);
        break;
      }
      case GateState::AdminChecked:
        gate_advance(g.txn, orders_, now);  // -> InstructionIssued
        sim_.push_callback(now + gate_step_ms_, "gate:" + plate);
        break;
      case GateState::InstructionIssued: {
        // the pointer checks what actually arrived against the order data
        for (const auto& oid : g.txn.order_ids) {
          const ServiceOrder& o = *orders_.find(oid);
          if (!o.container) continue;
          ObservedTruck obs;
          obs.container_id = o.container->str();
          obs.plate = plate;
          obs.seals = o.expected_seals;
          auto res = physical_check(g.txn, orders_, obs);
          if (!res.pass) {
            g.parked = true;
            for (const auto& mm : res.mismatches)
              log(now, "truck " + plate + " physical check failed: " + mm);
            return;
          }
        }
        gate_advance(g.txn, orders_, now);  // -> PhysicalChecked
        sim_.push_callback(now + gate_step_ms_, "gate:" + plate);
        break;
      }
      case GateState::PhysicalChecked:
        gate_advance(g.txn, orders_, now);  // -> AtInterchange
        start_interchange(g);
        break;
      case GateState::AtInterchange:
        // normally chain completions drive finish_gate; a retry callback
        // lands here when a hold blocked the Completed transition
        if (g.open_moves.empty()) finish_gate(g);
        break;
      case GateState::Completed:
        gate_advance(g.txn, orders_, now);  // -> Exited
        for (const auto& oid : g.txn.order_ids) {
          ServiceOrder& o = orders_.order(oid);
          if (o.status == OrderStatus::InProgress) complete_order(orders_, oid);
        }
        log(now, "truck " + plate + " exited");
        break;
      case GateState::Exited:
        break;
    }
  } catch (const TosError& err) {
    if (err.code() == Err::HoldActive || err.code() == Err::CustomsUnpaid ||
        err.code() == Err::OrderNotValidated || err.code() == Err::UnknownContainer ||
        err.code() == Err::NoFeasibleSlot) {
      if (++g.retries > gate_max_retries_) {
        g.parked = true;
        log(now, "truck " + plate + " parked after " + std::to_string(g.retries) +
                     " attempts: " + err.what());
      } else {
        log(now, "truck " + plate + " waiting: " + err.what());
        sim_.push_callback(now + gate_retry_ms_, "gate:" + plate);
      }
    } else {
      throw;
    }
  }
}

void Engine::start_interchange(GateOps& g) {
  const std::string interchange = terminal_.config.get("interchange_zone");
  for (const auto& oid : g.txn.order_ids) {
    ServiceOrder& o = orders_.order(oid);
    if (o.status == OrderStatus::Validated) start_order(orders_, oid);
    switch (o.type) {
      case OrderType::ReceiveFullByTruck:
      case OrderType::ReceiveEmpty: {
        Container box = container_from_order(o);
        if (orders_.container_held(box.id.str()))
          fail(Err::HoldActive, box.id.str() + " is held");
        YardPosition slot = plan_into_yard(box, "", "");
        MoveMeta meta;
        meta.kind = MoveKind::GateIn;
        meta.container = box.id.str();
        meta.gate_plate = g.txn.plate;
        meta.order_id = oid;
        meta.client = o.client;
        meta.place_at = slot;
        meta.size_type = box.size_type;
        meta.collection = planned_.find(box.id)->collection;
        i64 mv = new_move(meta, interchange, terminal_.layout.zone_of_block(slot.block));
        if (terminal_.layout.zone_of_block(slot.block) == interchange)
          gate_leg_on_stack(mv, 0, slot);
        else
          gate_leg_on_stack(mv, 2, slot);
        g.open_moves.insert(mv);
        break;
      }
      case OrderType::DeliverFullToTruck:
      case OrderType::DeliverEmptyToTruck: {
        std::string id = o.container->str();
        if (!planned_.find(id)) fail(Err::UnknownContainer, id + " not yet in yard");
        if (orders_.container_held(id)) fail(Err::HoldActive, id + " is held");
        const StoredContainer sc = *planned_.find(id);
        auto rehandles = dig_out(id, o.client);
        MoveMeta meta;
        meta.kind = MoveKind::GateOut;
        meta.container = id;
        meta.gate_plate = g.txn.plate;
        meta.order_id = oid;
        meta.client = o.client;
        meta.size_type = sc.box.size_type;
        i64 mv = new_move(meta, terminal_.layout.zone_of_block(sc.pos.block), interchange);
        gate_leg_on_stack(mv, 0, sc.pos);
        for (i64 r : rehandles) gate_leg_on_prev(mv, 0, r, 0);
        planned_.remove(sc.box.id);
        g.open_moves.insert(mv);
        break;
      }
      default:
        break;  // paperwork orders complete at exit
    }
  }
  if (g.open_moves.empty()) finish_gate(g);
}

void Engine::finish_gate(GateOps& g) {
  TimeMs now = sim_.clock().now();
  try {
    gate_advance(g.txn, orders_, now);  // -> Completed
    sim_.push_callback(now + gate_step_ms_, "gate:" + g.txn.plate);
  } catch (const TosError& err) {
    // a hold can land while the interchange chains run; wait it out
    if (err.code() != Err::HoldActive && err.code() != Err::CustomsUnpaid) throw;
    log(now, "truck " + g.txn.plate + " waiting at interchange: " + err.what());
    sim_.push_callback(now + gate_retry_ms_, "gate:" + g.txn.plate);
  }
}

// ---- completions ----------------------------------------------------------------------

void Engine::on_leg_complete(const Completion& c) {
  const JobChain& chain = sim_.chain(c.move_id);
  const MoveMeta& meta = move_meta_.at(c.move_id);
  bool is_first = c.leg_index == 0;
  bool is_last = c.leg_index + 1 == chain.legs.size();

  // physical pick-up: the container leaves its yard slot
  if (is_first && (meta.kind == MoveKind::Load || meta.kind == MoveKind::GateOut ||
                   meta.kind == MoveKind::Rehandle)) {
    physical_.remove(validate_container_id(meta.container));
    trace_yard();
  }
  // physical set-down in the yard
  if (is_last && meta.place_at &&
      (meta.kind == MoveKind::Discharge || meta.kind == MoveKind::GateIn ||
       meta.kind == MoveKind::Rehandle)) {
    const Container& box = known_boxes_.at(meta.container);
    physical_.place(box, *meta.place_at, terminal_.layout, meta.collection,
                    meta.vessel_binding);
    trace_yard();
    if (box.reefer) {
      auto& rl = orders_.reefer_logs[meta.container];
      rl.container = meta.container;
      rl.connected = true;
    }
  }
  if (c.chain_done) on_chain_done(c.move_id);
}

void Engine::on_chain_done(i64 move_id) {
  const MoveMeta& meta = move_meta_.at(move_id);
  TimeMs now = sim_.clock().now();
  switch (meta.kind) {
    case MoveKind::Discharge: {
      VisitOps& ops = visits_.at(meta.visit);
      ops.arrival_plan.remove(*meta.cell);
      trace_stow(meta.visit, ops.arrival_plan);
      ops.confirmed.push_back({MoveDirection::Discharge, validate_container_id(meta.container),
                               meta.size_type, *meta.cell, now});
      ++discharged_;
      if (!meta.restow) {
        add_billing_event("handling", "DISCHARGE", meta.client, meta.container, 1, now);
        open_storage(meta.container, meta.client, now);
      }
      ops.open_moves.erase(move_id);
      if (ops.open_moves.empty() && ops.phase == VisitOps::Phase::Discharging)
        start_load_phase(ops);
      break;
    }
    case MoveKind::Load: {
      VisitOps& ops = visits_.at(meta.visit);
      ops.confirmed.push_back({MoveDirection::Load, validate_container_id(meta.container),
                               meta.size_type, *meta.cell, now});
      ++loaded_;
      if (meta.restow) {
        add_billing_event("vessel", "RESTOW", meta.client, meta.container, 1, now);
      } else {
        add_billing_event("handling", "LOAD", meta.client, meta.container, 1, now);
        close_storage(meta.container, now);
      }
      orders_.reefer_logs.erase(meta.container);
      ops.open_moves.erase(move_id);
      if (ops.open_moves.empty() && ops.phase == VisitOps::Phase::Loading) finish_visit(ops);
      break;
    }
    case MoveKind::Rehandle:
      break;  // internal repositioning; shows up in history/KPIs only
    case MoveKind::GateIn: {
      GateOps& g = gates_.at(meta.gate_plate);
      gate_events_.push_back({true, validate_container_id(meta.container), meta.size_type, now});
      ++gate_in_;
      add_billing_event("handling", "GATE_IN", meta.client, meta.container, 1, now);
      open_storage(meta.container, meta.client, now);
      g.open_moves.erase(move_id);
      if (g.open_moves.empty()) finish_gate(g);
      break;
    }
    case MoveKind::GateOut: {
      GateOps& g = gates_.at(meta.gate_plate);
      gate_events_.push_back({false, validate_container_id(meta.container), meta.size_type, now});
      ++gate_out_;
      add_billing_event("handling", "GATE_OUT", meta.client, meta.container, 1, now);
      close_storage(meta.container, now);
      orders_.reefer_logs.erase(meta.container);
      g.open_moves.erase(move_id);
      if (g.open_moves.empty()) finish_gate(g);
      break;
    }
  }
}

// ---- remaining scenario handlers -------------------------------------------------------

void Engine::on_hold(const ScenarioEvent& e) {
  const std::string& action = e.get("action");
  HoldAuthority authority = parse_hold_authority(e.get("authority"));
  const std::string& target = e.get("target");  // order:<id> or container:<id>
  audit_cmd(e.at, e.get_or("user", "gate"), action == "apply" ? "hold.apply" : "hold.release");
  auto colon = target.find(':');
  if (colon == std::string::npos)
    fail(Err::ParseError, "hold target '" + target + "' (want order:<id> or container:<id>)");
  std::string kind = target.substr(0, colon);
  std::string id = target.substr(colon + 1);
  Hold hold{authority, e.get_or("reason", ""), true};
  if (action == "apply") {
    if (kind == "order")
      apply_hold_to_order(orders_, id, hold);
    else if (kind == "container")
      apply_hold_to_container(orders_, id, hold);
    else
      fail(Err::ParseError, "hold target kind '" + kind + "'");
    log(e.at, "hold applied on " + target + " by " + hold_authority_name(authority));
  } else if (action == "release") {
    if (kind == "order")
      release_hold_on_order(orders_, id, authority);
    else if (kind == "container")
      release_hold_on_container(orders_, id, authority);
    else
      fail(Err::ParseError, "hold target kind '" + kind + "'");
    log(e.at, "hold released on " + target + " by " + hold_authority_name(authority));
  } else {
    fail(Err::ParseError, "hold action '" + action + "'");
  }
}

void Engine::on_lock(const ScenarioEvent& e) {
  // same grammar as the external billing interface file
  std::string line = e.get("verb") + " " + e.get("kind") + " " + e.get("id");
  LockCommand cmd = parse_lock_command(line);
  audit_cmd(e.at, e.get_or("user", "billing"), "billing.lock");
  if (cmd.kind == LockTargetKind::Client) {
    Partner& p = master_.partner(cmd.id);
    p.billing_lock = cmd.lock;
    // bridge: a locked client's open orders carry a PortAuthority hold
    for (auto& [oid, o] : orders_.orders) {
      if (o.client != cmd.id || o.terminal()) continue;
      if (cmd.lock) {
        apply_hold_to_order(orders_, oid, {HoldAuthority::PortAuthority, "billing lock", true});
      } else {
        for (auto& h : o.holds)
          if (h.authority == HoldAuthority::PortAuthority && h.reason == "billing lock")
            h.active = false;
      }
    }
  } else {
    std::string id = validate_container_id(cmd.id).str();
    if (cmd.lock) {
      apply_hold_to_container(orders_, id, {HoldAuthority::PortAuthority, "billing lock", true});
    } else {
      auto it = orders_.container_holds.find(id);
      if (it != orders_.container_holds.end() &&
          it->second.authority == HoldAuthority::PortAuthority)
        it->second.active = false;
      // unlocking an unlocked container is an idempotent no-op
    }
  }
  log(e.at, (cmd.lock ? "LOCK " : "UNLOCK ") +
                std::string(cmd.kind == LockTargetKind::Client ? "CLIENT " : "CONTAINER ") +
                cmd.id);
}

void Engine::on_reefer(const ScenarioEvent& e) {
  std::string id = validate_container_id(e.get("container")).str();
  auto box_it = known_boxes_.find(id);
  if (box_it == known_boxes_.end() || !box_it->second.reefer)
    fail(Err::NotReefer, id + " is not a registered reefer");
  auto it = orders_.reefer_logs.find(id);
  if (it == orders_.reefer_logs.end() || !it->second.connected)
    fail(Err::NotConnected, id + " is not on power in the yard");
  audit_cmd(e.at, e.get_or("user", "gate"), "reefer.record");
  auto alarm = record_reefer(it->second, e.at, parse_double(e.get("temp"), "temp"),
                             box_it->second.reefer->setpoint_c, reefer_tolerance_c_);
  if (alarm) {
    reefer_alarms_.push_back(*alarm);
    log(e.at, "reefer alarm " + id + ": " + e.get("temp") + " C against setpoint " +
                  std::to_string(box_it->second.reefer->setpoint_c));
  }
}

void Engine::check_conservation() const {
  i64 delta = static_cast<i64>(physical_.size()) - conservation_base_;
  i64 expected = discharged_ + gate_in_ - loaded_ - gate_out_;
  if (delta != expected)
    fail(Err::ValidationFailed,
         "conservation broken: yard delta " + std::to_string(delta) + ", moves say " +
             std::to_string(expected));
}

// ---- outputs ---------------------------------------------------------------------------

RunOutputs Engine::collect_outputs() {
  TimeMs now = sim_.clock().now();
  TimeMs period_begin = run_begin_;
  TimeMs period_end = std::max(now + 1, period_begin + 1);

  // invoices: one per client with billable activity, advances oldest-first
  std::set<std::string> clients;
  for (const auto& e : billing_events_) clients.insert(e.client);
  std::map<std::string, std::vector<StorageInterval>> storage_by_client;
  for (const auto& si : closed_storage_) storage_by_client[si.client].push_back(si);
  for (const auto& [container, at] : storage_in_) {  // still in the yard: bill to run end
    StorageInterval si{container, storage_client_.at(container), at, now};
    storage_by_client[si.client].push_back(si);
    clients.insert(si.client);
  }
  clients.erase("");
  for (const auto& client : clients) {
    std::vector<BillingEvent> mine;
    for (const auto& e : billing_events_)
      if (e.client == client) mine.push_back(e);
    const Contract& contract =
        resolve_contract(client, now, tariffs_.contracts, tariffs_.default_contract);
    RatedLines rated = rate_events(mine, storage_by_client.count(client)
                                             ? storage_by_client[client]
                                             : std::vector<StorageInterval>{},
                                   contract);
    for (const auto& unknown : rated.unknown_codes) log(now, "billing " + client + ": " + unknown);
    if (rated.lines.empty()) continue;
    invoices_.push_back(create_invoice(client, rated.lines, advances_, invoice_seq_));
  }

  RunOutputs out;
  auto& files = out.files;

  {
    KpiReport kpi = compute_kpis(sim_.history(), physical_, terminal_.layout, period_begin,
                                 period_end);
    files["kpi.txt"] = kpi_to_kv(kpi);
    files["kpi_report.psv"] = kpi_to_psv(kpi);
  }
  files["authority_stats.psv"] = authority_stats_to_psv(
      authority_stats(sim_.history(), traffic_, period_begin, period_end, work_accidents_));
  files["history.psv"] = history_to_psv(sim_.history());
  files["billing_feed.psv"] = export_billing_feed(billing_events_, period_begin, period_end);

  {
    std::string text = "number|client|service_code|qty|unit_price|discount_pct|amount|"
                       "advances_applied|total\n";
    for (const auto& inv : invoices_) {
      for (const auto& line : inv.lines) {
        text += std::to_string(inv.number) + "|" + inv.client + "|" + line.service_code + "|" +
                std::to_string(line.qty) + "|" + std::to_string(line.unit_price) + "|" +
                std::to_string(line.discount_pct) + "|" + std::to_string(line.amount) + "||\n";
      }
      text += std::to_string(inv.number) + "|" + inv.client + "|TOTAL|||||" +
              std::to_string(inv.advances_applied) + "|" + std::to_string(inv.total) + "\n";
    }
    files["invoices.psv"] = text;
  }

  {
    std::string text = "container|block|bay|row|tier|size_type|weight_kg|pod|imo|collection|"
                       "vessel\n";
    for (const auto& [id, sc] : physical_.all()) {
      text += id + "|" + sc.pos.block + "|" + std::to_string(sc.pos.bay) + "|" +
              std::to_string(sc.pos.row) + "|" + std::to_string(sc.pos.tier) + "|" +
              sc.box.size_type + "|" + std::to_string(sc.box.gross_weight_kg) + "|" +
              sc.box.pod + "|" + (sc.box.imo_class ? sc.box.imo_class->code : "-") + "|" +
              sc.collection + "|" + sc.vessel + "\n";
    }
    files["yard_final.psv"] = text;
  }

  {
    std::string text = "order_id|type|client|container|visit|status|holds\n";
    for (const auto& [id, o] : orders_.orders) {
      int active_holds = 0;
      for (const auto& h : o.holds)
        if (h.active) ++active_holds;
      text += id + "|" + order_type_name(o.type) + "|" + o.client + "|" +
              (o.container ? o.container->str() : "-") + "|" + (o.visit ? *o.visit : "-") + "|" +
              order_status_name(o.status) + "|" + std::to_string(active_holds) + "\n";
    }
    files["orders.psv"] = text;
  }

  {
    std::string text = "plate|orders|state|parked|timeline\n";
    for (const auto& [plate, g] : gates_) {
      std::string timeline;
      for (const auto& [state, at] : g.txn.timestamps) {
        if (!timeline.empty()) timeline += ',';
        timeline += std::string(gate_state_name(state)) + "@" + format_iso8601(at);
      }
      text += plate + "|" + join(g.txn.order_ids, ',') + "|" + gate_state_name(g.txn.state) +
              "|" + (g.parked ? "1" : "0") + "|" + timeline + "\n";
    }
    files["gate_transactions.psv"] = text;
  }

  {
    std::string text = "visit|position_from_m|position_to_m|from|to|cranes\n";
    for (const auto& w : berth_.windows) {
      char pos[64];
      std::snprintf(pos, sizeof(pos), "%.1f|%.1f", w.start_m, w.end_m);
      text += w.visit_id + "|" + pos + "|" + format_iso8601(w.start) + "|" +
              format_iso8601(w.end) + "|" + join(w.cranes, ',') + "\n";
    }
    files["berth_plan.psv"] = text;
  }

  if (!gate_events_.empty()) {
    EdifactDocument codeco =
        emit_codeco(gate_events_, terminal_.config.get_or("sender", "TERMINAL"), "PARTNERS", now,
                    next_edi_ref());
    edi_out_["codeco.edi"] = codeco;
  }
  for (const auto& [name, doc] : edi_out_) files[name] = serialize(doc);
  for (const auto& [name, text] : list_exports_) files[name] = text;

  {
    std::string text = "plate|orders|interchange_zone\n";
    for (const auto& doc : instruction_docs_) text += doc + "\n";
    files["instruction_docs.psv"] = text;
  }
  {
    std::string text = "container|time|reading_c|setpoint_c\n";
    char buf[64];
    for (const auto& a : reefer_alarms_) {
      std::snprintf(buf, sizeof(buf), "%.1f|%.1f", a.reading_c, a.setpoint_c);
      text += a.container + "|" + format_iso8601(a.at) + "|" + buf + "\n";
    }
    files["reefer_alarms.psv"] = text;
  }

  files["audit.log"] = audit_.to_text();
  files["run.log"] = join(run_log_, '\n') + (run_log_.empty() ? "" : "\n");

  {
    std::string text;
    text += "seed=" + std::to_string(inputs_.seed) + "\n";
    text += "events=" + std::to_string(scenario_.events.size()) + "\n";
    text += "discharged=" + std::to_string(discharged_) + "\n";
    text += "loaded=" + std::to_string(loaded_) + "\n";
    text += "gate_in=" + std::to_string(gate_in_) + "\n";
    text += "gate_out=" + std::to_string(gate_out_) + "\n";
    text += "yard_population=" + std::to_string(physical_.size()) + "\n";
    text += "invoices=" + std::to_string(invoices_.size()) + "\n";
    text += "finished=" + format_iso8601(now) + "\n";
    text += "audit_chain_ok=" + std::string(audit_.verify() ? "1" : "0") + "\n";
    files["summary.txt"] = text;
  }
  return out;
}

// ---- snapshot / restore -----------------------------------------------------------------

namespace {

class BlockWriter {
 public:
  void add(const std::string& name, const std::string& content) {
    body_ += "@section " + name + " " + std::to_string(content.size()) + "\n";
    body_ += content;
    body_ += "\n";
  }
  std::string finish() const {
    std::string out = "QUAYSIDE-SNAPSHOT v1\n" + body_;
    out += "@checksum " + hex64(fnv1a64(out)) + "\n";
    return out;
  }

 private:
  std::string body_;
};

class BlockReader {
 public:
  explicit BlockReader(const std::string& text) {
    std::size_t nl = text.find('\n');
    if (nl == std::string::npos) fail(Err::CorruptSnapshot, "truncated header");
    std::string header = text.substr(0, nl);
    if (header != "QUAYSIDE-SNAPSHOT v1") {
      if (starts_with(header, "QUAYSIDE-SNAPSHOT"))
        fail(Err::VersionMismatch, "snapshot format '" + header + "'");
      fail(Err::CorruptSnapshot, "not a snapshot file");
    }
    std::size_t check = text.rfind("@checksum ");
    if (check == std::string::npos || check == 0) fail(Err::CorruptSnapshot, "missing checksum");
    std::string body = text.substr(0, check);
    std::string recorded = trim(text.substr(check + 10));
    if (hex64(fnv1a64(body)) != recorded) fail(Err::CorruptSnapshot, "checksum mismatch");

    std::size_t pos = nl + 1;
    while (pos < check) {
      if (!starts_with(std::string_view(text).substr(pos), "@section "))
        fail(Err::CorruptSnapshot, "expected @section");
      std::size_t line_end = text.find('\n', pos);
      auto parts = split(text.substr(pos, line_end - pos), ' ');
      if (parts.size() != 3) fail(Err::CorruptSnapshot, "bad section header");
      std::size_t len = static_cast<std::size_t>(parse_int(parts[2], "section length"));
      sections_[parts[1]] = text.substr(line_end + 1, len);
      pos = line_end + 1 + len + 1;  // content + trailing newline
    }
  }

  const std::string& get(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) fail(Err::CorruptSnapshot, "missing section " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return sections_.count(name) > 0; }

 private:
  std::map<std::string, std::string> sections_;
};

std::string serialize_yard(const YardState& y) {
  std::string out;
  for (const auto& [id, sc] : y.all()) {
    out += id + "|" + sc.pos.str() + "|" + sc.box.size_type + "|" +
           std::to_string(sc.box.gross_weight_kg) + "|" +
           (sc.box.status == ContainerStatus::Full ? "F" : "E") + "|" +
           (sc.box.imo_class ? sc.box.imo_class->code : "-") + "|" +
           (sc.box.reefer ? std::to_string(sc.box.reefer->setpoint_c) : "-") + "|" +
           join(sc.box.seal_numbers, ',') + "|" + sc.box.pol + "|" + sc.box.pod + "|" +
           std::to_string(static_cast<int>(sc.box.transaction)) + "|" + esc(sc.collection) +
           "|" + esc(sc.vessel) + "\n";
  }
  return out;
}

Container container_from_fields(const std::vector<std::string>& f, std::size_t base) {
  Container box;
  box.id = validate_container_id(f[base]);
  box.size_type = f[base + 2];
  box.gross_weight_kg = parse_int(f[base + 3], "weight");
  box.status = f[base + 4] == "F" ? ContainerStatus::Full : ContainerStatus::Empty;
  if (f[base + 5] != "-") box.imo_class = ImoClass{f[base + 5]};
  if (f[base + 6] != "-") box.reefer = ReeferAttrs{parse_double(f[base + 6], "setpoint")};
  if (!f[base + 7].empty()) box.seal_numbers = split(f[base + 7], ',');
  box.pol = f[base + 8];
  box.pod = f[base + 9];
  box.transaction = static_cast<Transaction>(parse_int(f[base + 10], "transaction"));
  return box;
}

void restore_yard(YardState& y, const std::string& text, const YardLayout& layout) {
  // Re-place ground tiers first so gravity checks hold during reload.
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    rows.push_back(split(line, '|'));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return parse_yard_position(a[1]).tier < parse_yard_position(b[1]).tier;
  });
  for (const auto& f : rows) {
    Container box = container_from_fields(f, 0);
    y.place(box, parse_yard_position(f[1]), layout, unesc(f[11]), unesc(f[12]));
  }
}

std::string serialize_stowage(const StowagePlan& plan) {
  std::string out;
  for (const auto& [cell, e] : plan.entries()) {
    out += cell.str() + "|" + e.container.str() + "|" + e.size_type + "|" +
           std::to_string(e.weight_kg) + "|" + e.pod + "|" + e.pol + "|" +
           opt_str(e.final_destination) + "|" + (e.imo_class ? e.imo_class->code : "-") + "\n";
  }
  return out;
}

}  // namespace

std::string Engine::snapshot() const {
  BlockWriter w;
  // inputs: a restored engine re-parses exactly what this one read
  w.add("in.terminal", inputs_.terminal_text);
  w.add("in.tariffs", inputs_.tariffs_text);
  w.add("in.filters", inputs_.filters_text);
  w.add("in.assignments", inputs_.assignments_text);
  w.add("in.stacking", inputs_.stacking_keys);
  w.add("in.imo", inputs_.imo_rules_text);
  w.add("in.mapping", inputs_.mapping_text);
  w.add("in.scenario", inputs_.scenario_text);
  w.add("in.base_dir", inputs_.scenario_base_dir);
  w.add("in.seed", std::to_string(inputs_.seed));
  for (const auto& [name, text] : inputs_.master_files) w.add("master." + name, text);
  {
    std::string names;
    for (const auto& [name, text] : inputs_.master_files) names += name + "\n";
    w.add("master._index", names);
  }

  {
    std::string s;
    s += std::to_string(sim_.clock().now()) + "\n";
    s += std::to_string(sim_.clock().next_seq()) + "\n";
    s += std::to_string(next_scenario_idx_) + "\n";
    s += std::to_string(next_move_id_) + "\n";
    s += std::to_string(next_billing_id_) + "\n";
    s += std::to_string(edi_ref_) + "\n";
    s += std::to_string(run_begin_) + "\n";
    s += std::to_string(work_accidents_) + "\n";
    s += std::to_string(discharged_) + "|" + std::to_string(loaded_) + "|" +
         std::to_string(gate_in_) + "|" + std::to_string(gate_out_) + "\n";
    s += std::to_string(invoice_seq_.last_issued()) + "\n";
    s += std::to_string(conservation_base_) + "\n";
    w.add("state.counters", s);
  }
  {
    std::string s;
    for (const auto& [key, e] : sim_.clock().pending())
      s += std::to_string(e.time) + "|" + std::to_string(e.seq) + "|" +
           (e.kind == SimEvent::Kind::Callback ? "C" : "L") + "|" + std::to_string(e.move_id) +
           "|" + std::to_string(e.leg_index) + "|" + esc(e.tag) + "\n";
    w.add("state.events", s);
  }
  {
    std::string s;
    for (const auto& [id, chain] : sim_.chains()) {
      s += "chain|" + std::to_string(id) + "|" + esc(chain.container) + "|" +
           (chain.rehandle ? "1" : "0") + "\n";
      for (const auto& leg : chain.legs) {
        std::string prereqs;
        for (const auto& [m, l] : leg.prereqs) {
          if (!prereqs.empty()) prereqs += ',';
          prereqs += std::to_string(m) + ":" + std::to_string(l);
        }
        char nums[96];
        std::snprintf(nums, sizeof(nums), "%lld|%lld|%.6f|%.6f",
                      static_cast<long long>(leg.start), static_cast<long long>(leg.end),
                      leg.empty_travel_m, leg.laden_travel_m);
        s += "leg|" + std::string(equipment_kind_name(leg.kind)) + "|" + leg.from + "|" +
             leg.to + "|" + leg_action_name(leg.action) + "|" + leg_status_name(leg.status) +
             "|" + leg.equipment + "|" + nums + "|" + prereqs + "|" + leg.required_equipment +
             "\n";
      }
    }
    w.add("state.chains", s);
  }
  {
    std::string s;
    for (const auto& [id, eq] : sim_.fleet())
      s += id + "|" + eq.position + "|" + std::to_string(eq.busy_until) + "|" +
           (eq.current ? std::to_string(eq.current->first) + ":" +
                             std::to_string(eq.current->second)
                       : "-") +
           "\n";
    w.add("state.fleet", s);
  }
  {
    std::string s;
    for (const auto& h : sim_.history()) {
      char nums[96];
      std::snprintf(nums, sizeof(nums), "%lld|%lld|%.6f|%.6f", static_cast<long long>(h.start),
                    static_cast<long long>(h.end), h.empty_travel_m, h.laden_travel_m);
      s += h.equipment + "|" + equipment_kind_name(h.kind) + "|" + std::to_string(h.move_id) +
           "|" + std::to_string(h.leg_index) + "|" + leg_action_name(h.action) + "|" +
           esc(h.container) + "|" + nums + "|" + (h.rehandle ? "1" : "0") + "\n";
    }
    w.add("state.history", s);
  }
  w.add("state.yard.physical", serialize_yard(physical_));
  w.add("state.yard.planned", serialize_yard(planned_));
  {
    std::string s;
    for (const auto& w2 : berth_.windows) {
      char nums[96];
      std::snprintf(nums, sizeof(nums), "%.3f|%.3f|%lld|%lld", w2.start_m, w2.end_m,
                    static_cast<long long>(w2.start), static_cast<long long>(w2.end));
      s += w2.visit_id + "|" + nums + "|" + join(w2.cranes, ',') + "\n";
    }
    w.add("state.berth", s);
  }
  {
    std::string s;
    for (const auto& [id, v] : master_.visits())
      s += id + "|" + v.profile + "|" + std::to_string(v.eta) + "|" + std::to_string(v.etd) +
           "|" + esc(v.service) + "|" + std::to_string(static_cast<int>(v.status)) + "\n";
    w.add("state.visits", s);
  }
  {
    std::string s;
    for (const auto& [id, p] : master_.partners())
      if (p.billing_lock) s += id + "\n";
    w.add("state.partner_locks", s);
  }
  {
    std::string s;
    for (const auto& [vid, ops] : visits_) {
      s += "visit|" + vid + "|" + esc(ops.client) + "|" +
           std::to_string(static_cast<int>(ops.phase)) + "|" + join(ops.cranes, ',') + "\n";
      for (const auto& ins : ops.movins)
        s += "movins|" + std::string(movins_kind_name(ins.kind)) + "|" +
             (ins.container ? ins.container->str() : "-") + "|" + esc(ins.size_type) + "|" +
             (ins.cell ? ins.cell->str() : "-") + "|" +
             (ins.bay_preference ? std::to_string(*ins.bay_preference) : "-") + "\n";
      for (const auto& cm : ops.confirmed)
        s += "confirmed|" + std::string(cm.direction == MoveDirection::Discharge ? "D" : "L") +
             "|" + cm.container.str() + "|" + cm.size_type + "|" + cm.cell.str() + "|" +
             std::to_string(cm.completed_at) + "\n";
      for (i64 m : ops.open_moves) s += "open|" + std::to_string(m) + "\n";
      for (const auto& skip : ops.load_skips) s += "skip|" + esc(skip) + "\n";
      s += "arrival_plan|" + std::to_string(ops.arrival_plan.size()) + "\n";
      s += serialize_stowage(ops.arrival_plan);
      s += "load_plan|" + std::to_string(ops.load_plan.size()) + "\n";
      s += serialize_stowage(ops.load_plan);
      s += "endvisit|\n";
    }
    w.add("state.visit_ops", s);
  }
  {
    std::string s;
    for (const auto& [plate, g] : gates_) {
      s += "gate|" + plate + "|" + join(g.txn.order_ids, ',') + "|" +
           std::to_string(static_cast<int>(g.txn.state)) + "|" + std::to_string(g.retries) +
           "|" + (g.parked ? "1" : "0") + "\n";
      for (const auto& [state, at] : g.txn.timestamps)
        s += "ts|" + std::to_string(static_cast<int>(state)) + "|" + std::to_string(at) + "\n";
      for (i64 m : g.open_moves) s += "open|" + std::to_string(m) + "\n";
    }
    w.add("state.gates", s);
  }
  {
    std::string s;
    for (const auto& [id, m] : move_meta_)
      s += std::to_string(id) + "|" + move_kind_name(m.kind) + (m.restow ? "|1|" : "|0|") +
           esc(m.container) + "|" +
           esc(m.visit) + "|" + esc(m.gate_plate) + "|" + esc(m.order_id) + "|" +
           esc(m.client) + "|" + (m.place_at ? m.place_at->str() : "-") + "|" +
           (m.cell ? m.cell->str() : "-") + "|" + esc(m.size_type) + "|" + esc(m.collection) +
           "|" + esc(m.vessel_binding) + "\n";
    w.add("state.move_meta", s);
  }
  {
    std::string s;
    for (const auto& [key, touch] : last_touch_)
      s += esc(key) + "|" + std::to_string(touch.first) + "|" + std::to_string(touch.second) +
           "\n";
    w.add("state.last_touch", s);
  }
  {
    std::string s;
    for (const auto& [id, o] : orders_.orders) {
      s += "order|" + id + "|" + std::to_string(static_cast<int>(o.type)) + "|" +
           esc(o.client) + "|" + (o.container ? o.container->str() : "-") + "|" +
           (o.visit ? esc(*o.visit) : "-") + "|" + std::to_string(static_cast<int>(o.status)) +
           "|" + std::to_string(o.created_at) + "|" + esc(o.cancel_reason) + "|" +
           esc(o.expected_plate) + "|" + join(o.expected_seals, ',') + "|" +
           (o.customs_cleared ? "1" : "0") + "\n";
      for (const auto& h : o.holds)
        s += "hold|" + std::string(hold_authority_name(h.authority)) + "|" + esc(h.reason) +
             "|" + (h.active ? "1" : "0") + "\n";
    }
    for (const auto& [cid, h] : orders_.container_holds)
      s += "chold|" + cid + "|" + hold_authority_name(h.authority) + "|" + esc(h.reason) + "|" +
           (h.active ? "1" : "0") + "\n";
    for (const auto& [cid, rl] : orders_.reefer_logs) {
      s += "reefer|" + cid + "|" + (rl.connected ? "1" : "0") + "\n";
      for (const auto& [at, temp] : rl.readings) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%lld|%.6f", static_cast<long long>(at), temp);
        s += "reading|" + std::string(buf) + "\n";
      }
    }
    w.add("state.orders", s);
  }
  {
    std::string s;
    for (const auto& [id, box] : known_boxes_) {
      s += id + "|-|" + box.size_type + "|" + std::to_string(box.gross_weight_kg) + "|" +
           (box.status == ContainerStatus::Full ? "F" : "E") + "|" +
           (box.imo_class ? box.imo_class->code : "-") + "|" +
           (box.reefer ? std::to_string(box.reefer->setpoint_c) : "-") + "|" +
           join(box.seal_numbers, ',') + "|" + box.pol + "|" + box.pod + "|" +
           std::to_string(static_cast<int>(box.transaction)) + "\n";
    }
    w.add("state.known_boxes", s);
  }
  {
    std::string s;
    for (const auto& e : billing_events_)
      s += std::to_string(e.event_id) + "|" + e.record_type + "|" + esc(e.service_code) + "|" +
           esc(e.client) + "|" + esc(e.container) + "|" + std::to_string(e.qty) + "|" +
           std::to_string(e.occurred_at) + "|" + (e.source == EventSource::Tos ? "T" : "M") +
           "\n";
    w.add("state.billing_events", s);
    s.clear();
    for (const auto& a : advances_)
      s += esc(a.client) + "|" + std::to_string(a.amount) + "|" + std::to_string(a.received_at) +
           "|" + std::to_string(a.remaining) + "\n";
    w.add("state.advances", s);
    s.clear();
    for (const auto& [c, at] : storage_in_)
      s += c + "|" + std::to_string(at) + "|" + esc(storage_client_.at(c)) + "\n";
    w.add("state.storage_open", s);
    s.clear();
    for (const auto& si : closed_storage_)
      s += si.container + "|" + esc(si.client) + "|" + std::to_string(si.in_at) + "|" +
           std::to_string(si.out_at) + "\n";
    w.add("state.storage_closed", s);
    s.clear();
    for (const auto& [c, info] : traffic_)
      s += c + "|" + std::to_string(info.teu) + "|" + (info.imo_class ? *info.imo_class : "-") +
           "\n";
    w.add("state.traffic", s);
  }
  {
    std::string s;
    for (const auto& e : gate_events_)
      s += std::string(e.gate_in ? "I" : "O") + "|" + e.container.str() + "|" + e.size_type +
           "|" + std::to_string(e.at) + "\n";
    w.add("state.gate_events", s);
  }
  {
    std::string s;
    for (const auto& [name, text] : list_exports_) s += name + "|" + esc(text) + "\n";
    w.add("state.list_exports", s);
    s.clear();
    for (const auto& d : instruction_docs_) s += esc(d) + "\n";
    w.add("state.instruction_docs", s);
    s.clear();
    for (const auto& l : run_log_) s += esc(l) + "\n";
    w.add("state.run_log", s);
    s.clear();
    for (const auto& a : reefer_alarms_) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s|%lld|%.6f|%.6f", a.container.c_str(),
                    static_cast<long long>(a.at), a.reading_c, a.setpoint_c);
      s += std::string(buf) + "\n";
    }
    w.add("state.reefer_alarms", s);
  }
  {
    std::string s;
    for (const auto& r : audit_.records())
      s += std::to_string(r.time) + "|" + esc(r.user) + "|" + esc(r.command) + "|" + r.outcome +
           "|" + hex64(r.prev_hash) + "|" + hex64(r.hash) + "\n";
    w.add("state.audit", s);
  }
  {
    std::string s;
    for (const auto& [name, doc] : edi_out_) s += "file|" + name + "\n" + serialize(doc) + "\n";
    w.add("state.edi_out", s);
  }
  return w.finish();
}

Engine Engine::restore(const std::string& snapshot_text) {
  BlockReader r(snapshot_text);
  EngineInputs in;
  in.terminal_text = r.get("in.terminal");
  in.tariffs_text = r.get("in.tariffs");
  in.filters_text = r.get("in.filters");
  in.assignments_text = r.get("in.assignments");
  in.stacking_keys = r.get("in.stacking");
  in.imo_rules_text = r.get("in.imo");
  in.mapping_text = r.get("in.mapping");
  in.scenario_text = r.get("in.scenario");
  in.scenario_base_dir = r.get("in.base_dir");
  in.seed = parse_int(trim(r.get("in.seed")), "seed");
  for (const auto& name : split(r.get("master._index"), '\n'))
    if (!trim(name).empty()) in.master_files[name] = r.get("master." + name);

  Engine e(std::move(in));
  // wipe the fresh-start queue; the snapshot's queue replaces it
  while (!e.sim_.clock().empty()) e.sim_.clock().pop();

  auto lines = [](const std::string& text) {
    std::vector<std::vector<std::string>> out;
    for (const auto& line : split(text, '\n'))
      if (!line.empty()) out.push_back(split(line, '|'));
    return out;
  };

  {
    auto raw = split(r.get("state.counters"), '\n');
    e.sim_.clock().restore_now(parse_int(raw[0], "now"));
    i64 next_seq = parse_int(raw[1], "seq");
    e.next_scenario_idx_ = static_cast<std::size_t>(parse_int(raw[2], "idx"));
    e.next_move_id_ = parse_int(raw[3], "move id");
    e.next_billing_id_ = parse_int(raw[4], "billing id");
    e.edi_ref_ = static_cast<int>(parse_int(raw[5], "edi ref"));
    e.run_begin_ = parse_int(raw[6], "run begin");
    e.work_accidents_ = parse_int(raw[7], "accidents");
    auto counters = split(raw[8], '|');
    e.discharged_ = parse_int(counters[0], "discharged");
    e.loaded_ = parse_int(counters[1], "loaded");
    e.gate_in_ = parse_int(counters[2], "gate in");
    e.gate_out_ = parse_int(counters[3], "gate out");
    e.invoice_seq_ = InvoiceSequence(parse_int(raw[9], "invoice seq"));
    e.conservation_base_ = parse_int(raw[10], "conservation base");
    // events re-inserted with their original sequence numbers
    for (const auto& f : lines(r.get("state.events"))) {
      SimEvent ev;
      ev.time = parse_int(f[0], "time");
      ev.seq = parse_int(f[1], "seq");
      ev.kind = f[2] == "C" ? SimEvent::Kind::Callback : SimEvent::Kind::LegComplete;
      ev.move_id = parse_int(f[3], "move");
      ev.leg_index = static_cast<std::size_t>(parse_int(f[4], "leg"));
      ev.tag = unesc(f[5]);
      e.sim_.clock().restore_seq(ev.seq);
      e.sim_.clock().push(ev);
    }
    e.sim_.clock().restore_seq(next_seq);
  }
  {
    JobChain* open = nullptr;
    for (const auto& f : lines(r.get("state.chains"))) {
      if (f[0] == "chain") {
        JobChain c;
        c.move_id = parse_int(f[1], "move id");
        c.container = unesc(f[2]);
        c.rehandle = f[3] == "1";
        open = &e.sim_.chains_mut().emplace(c.move_id, std::move(c)).first->second;
      } else {
        Leg leg;
        leg.kind = parse_equipment_kind(f[1]);
        leg.from = f[2];
        leg.to = f[3];
        leg.action = f[4] == "Lift" ? LegAction::Lift
                     : f[4] == "Set" ? LegAction::Set
                                     : LegAction::Haul;
        leg.status = f[5] == "Pending"    ? LegStatus::Pending
                     : f[5] == "Assigned" ? LegStatus::Assigned
                     : f[5] == "Running"  ? LegStatus::Running
                                          : LegStatus::Done;
        leg.equipment = f[6];
        leg.start = parse_int(f[7], "start");
        leg.end = parse_int(f[8], "end");
        leg.empty_travel_m = parse_double(f[9], "empty");
        leg.laden_travel_m = parse_double(f[10], "laden");
        if (!f[11].empty())
          for (const auto& p : split(f[11], ',')) {
            auto ml = split(p, ':');
            leg.prereqs.emplace_back(parse_int(ml[0], "prereq move"),
                                     static_cast<std::size_t>(parse_int(ml[1], "prereq leg")));
          }
        leg.required_equipment = f[12];
        open->legs.push_back(std::move(leg));
      }
    }
  }
  for (const auto& f : lines(r.get("state.fleet"))) {
    EquipmentState& eq = e.sim_.equipment(f[0]);
    eq.position = f[1];
    eq.busy_until = parse_int(f[2], "busy until");
    if (f[3] != "-") {
      auto ml = split(f[3], ':');
      eq.current = {parse_int(ml[0], "move"),
                    static_cast<std::size_t>(parse_int(ml[1], "leg"))};
    }
  }
  for (const auto& f : lines(r.get("state.history"))) {
    HistoryEntry h;
    h.equipment = f[0];
    h.kind = parse_equipment_kind(f[1]);
    h.move_id = parse_int(f[2], "move");
    h.leg_index = static_cast<std::size_t>(parse_int(f[3], "leg"));
    h.action = f[4] == "Lift" ? LegAction::Lift : f[4] == "Set" ? LegAction::Set : LegAction::Haul;
    h.container = unesc(f[5]);
    h.start = parse_int(f[6], "start");
    h.end = parse_int(f[7], "end");
    h.empty_travel_m = parse_double(f[8], "empty");
    h.laden_travel_m = parse_double(f[9], "laden");
    h.rehandle = f[10] == "1";
    e.sim_.history_mut().push_back(std::move(h));
  }
  restore_yard(e.physical_, r.get("state.yard.physical"), e.terminal_.layout);
  restore_yard(e.planned_, r.get("state.yard.planned"), e.terminal_.layout);
  for (const auto& f : lines(r.get("state.berth"))) {
    BerthWindow w;
    w.visit_id = f[0];
    w.start_m = parse_double(f[1], "start m");
    w.end_m = parse_double(f[2], "end m");
    w.start = parse_int(f[3], "start");
    w.end = parse_int(f[4], "end");
    if (!f[5].empty()) w.cranes = split(f[5], ',');
    e.berth_.windows.push_back(std::move(w));
  }
  for (const auto& f : lines(r.get("state.visits"))) {
    if (!e.master_.find_visit(f[0])) {
      VesselVisit v;
      v.visit_id = f[0];
      v.profile = f[1];
      v.eta = parse_int(f[2], "eta");
      v.etd = parse_int(f[3], "etd");
      v.service = unesc(f[4]);
      e.master_.upsert_visit(v);
    }
    e.master_.visit(f[0]).status = static_cast<VisitStatus>(parse_int(f[5], "status"));
  }
  for (const auto& f : lines(r.get("state.partner_locks")))
    e.master_.partner(f[0]).billing_lock = true;
  {
    VisitOps* open = nullptr;
    enum class StowTarget { None, Arrival, Load } target = StowTarget::None;
    for (const auto& f : lines(r.get("state.visit_ops"))) {
      if (f[0] == "visit") {
        VisitOps ops;
        ops.visit_id = f[1];
        ops.client = unesc(f[2]);
        ops.phase = static_cast<VisitOps::Phase>(parse_int(f[3], "phase"));
        if (!f[4].empty()) ops.cranes = split(f[4], ',');
        ops.arrival_plan = StowagePlan(f[1]);
        ops.load_plan = StowagePlan(f[1]);
        open = &e.visits_.emplace(f[1], std::move(ops)).first->second;
        target = StowTarget::None;
      } else if (f[0] == "movins") {
        MovinsInstruction ins;
        ins.kind = f[1] == "Load"        ? MovinsKind::Load
                   : f[1] == "Discharge" ? MovinsKind::Discharge
                                         : MovinsKind::Restow;
        if (f[2] != "-") ins.container = validate_container_id(f[2]);
        ins.size_type = unesc(f[3]);
        if (f[4] != "-") ins.cell = parse_cell(f[4]);
        if (f[5] != "-") ins.bay_preference = static_cast<int>(parse_int(f[5], "bay"));
        open->movins.push_back(std::move(ins));
      } else if (f[0] == "confirmed") {
        ConfirmedMove cm;
        cm.direction = f[1] == "D" ? MoveDirection::Discharge : MoveDirection::Load;
        cm.container = validate_container_id(f[2]);
        cm.size_type = f[3];
        cm.cell = parse_cell(f[4]);
        cm.completed_at = parse_int(f[5], "at");
        open->confirmed.push_back(std::move(cm));
      } else if (f[0] == "open") {
        open->open_moves.insert(parse_int(f[1], "move"));
      } else if (f[0] == "skip") {
        open->load_skips.push_back(unesc(f[1]));
      } else if (f[0] == "arrival_plan") {
        target = StowTarget::Arrival;
      } else if (f[0] == "load_plan") {
        target = StowTarget::Load;
      } else if (f[0] == "endvisit") {
        open = nullptr;
        target = StowTarget::None;
      } else if (open && target != StowTarget::None) {
        // stow entry row within the current plan block
        const VesselProfile& profile =
            *e.master_.find_profile(e.master_.find_visit(open->visit_id)->profile);
        StowEntry entry;
        entry.position = parse_cell(f[0]);
        entry.container = validate_container_id(f[1]);
        entry.size_type = f[2];
        entry.weight_kg = parse_int(f[3], "weight");
        entry.pod = f[4];
        entry.pol = f[5];
        if (f[6] != "-") entry.final_destination = f[6];
        if (f[7] != "-") entry.imo_class = ImoClass{f[7]};
        (target == StowTarget::Arrival ? open->arrival_plan : open->load_plan)
            .add(entry, profile);
      }
    }
  }
  {
    GateOps* open = nullptr;
    for (const auto& f : lines(r.get("state.gates"))) {
      if (f[0] == "gate") {
        GateOps g;
        g.txn.plate = f[1];
        g.txn.order_ids = split(f[2], ',');
        g.txn.state = static_cast<GateState>(parse_int(f[3], "state"));
        g.retries = static_cast<int>(parse_int(f[4], "retries"));
        g.parked = f[5] == "1";
        open = &e.gates_.emplace(f[1], std::move(g)).first->second;
      } else if (f[0] == "ts") {
        open->txn.timestamps.emplace_back(static_cast<GateState>(parse_int(f[1], "state")),
                                          parse_int(f[2], "at"));
      } else if (f[0] == "open") {
        open->open_moves.insert(parse_int(f[1], "move"));
      }
    }
  }
  for (const auto& f : lines(r.get("state.move_meta"))) {
    MoveMeta m;
    m.kind = f[1] == "Discharge" ? MoveKind::Discharge
             : f[1] == "Load"    ? MoveKind::Load
             : f[1] == "Rehandle" ? MoveKind::Rehandle
             : f[1] == "GateIn"  ? MoveKind::GateIn
                                 : MoveKind::GateOut;
    m.restow = f[2] == "1";
    m.container = unesc(f[3]);
    m.visit = unesc(f[4]);
    m.gate_plate = unesc(f[5]);
    m.order_id = unesc(f[6]);
    m.client = unesc(f[7]);
    if (f[8] != "-") m.place_at = parse_yard_position(f[8]);
    if (f[9] != "-") m.cell = parse_cell(f[9]);
    m.size_type = unesc(f[10]);
    m.collection = unesc(f[11]);
    m.vessel_binding = unesc(f[12]);
    e.move_meta_[parse_int(f[0], "move id")] = std::move(m);
  }
  for (const auto& f : lines(r.get("state.last_touch")))
    e.last_touch_[unesc(f[0])] = {parse_int(f[1], "move"),
                                  static_cast<std::size_t>(parse_int(f[2], "leg"))};
  {
    ServiceOrder* open = nullptr;
    ReeferLog* open_log = nullptr;
    for (const auto& f : lines(r.get("state.orders"))) {
      if (f[0] == "order") {
        ServiceOrder o;
        o.order_id = f[1];
        o.type = static_cast<OrderType>(parse_int(f[2], "type"));
        o.client = unesc(f[3]);
        if (f[4] != "-") o.container = validate_container_id(f[4]);
        if (f[5] != "-") o.visit = unesc(f[5]);
        o.status = static_cast<OrderStatus>(parse_int(f[6], "status"));
        o.created_at = parse_int(f[7], "created");
        o.cancel_reason = unesc(f[8]);
        o.expected_plate = unesc(f[9]);
        if (!f[10].empty()) o.expected_seals = split(f[10], ',');
        o.customs_cleared = f[11] == "1";
        open = &e.orders_.orders.emplace(o.order_id, std::move(o)).first->second;
      } else if (f[0] == "hold") {
        open->holds.push_back({parse_hold_authority(f[1]), unesc(f[2]), f[3] == "1"});
      } else if (f[0] == "chold") {
        e.orders_.container_holds[f[1]] = {parse_hold_authority(f[2]), unesc(f[3]),
                                           f[4] == "1"};
      } else if (f[0] == "reefer") {
        ReeferLog rl;
        rl.container = f[1];
        rl.connected = f[2] == "1";
        open_log = &e.orders_.reefer_logs.emplace(f[1], std::move(rl)).first->second;
      } else if (f[0] == "reading") {
        open_log->readings.emplace_back(parse_int(f[1], "at"), parse_double(f[2], "temp"));
      }
    }
  }
  for (const auto& f : lines(r.get("state.known_boxes"))) {
    Container box = container_from_fields(f, 0);
    e.known_boxes_[box.id.str()] = box;
  }
  for (const auto& f : lines(r.get("state.billing_events"))) {
    BillingEvent ev;
    ev.event_id = parse_int(f[0], "event id");
    ev.record_type = f[1];
    ev.service_code = unesc(f[2]);
    ev.client = unesc(f[3]);
    ev.container = unesc(f[4]);
    ev.qty = parse_int(f[5], "qty");
    ev.occurred_at = parse_int(f[6], "at");
    ev.source = f[7] == "T" ? EventSource::Tos : EventSource::Manual;
    e.billing_events_.push_back(std::move(ev));
  }
  for (const auto& f : lines(r.get("state.advances"))) {
    Advance a;
    a.client = unesc(f[0]);
    a.amount = parse_int(f[1], "amount");
    a.received_at = parse_int(f[2], "received");
    a.remaining = parse_int(f[3], "remaining");
    e.advances_.push_back(std::move(a));
  }
  for (const auto& f : lines(r.get("state.storage_open"))) {
    e.storage_in_[f[0]] = parse_int(f[1], "at");
    e.storage_client_[f[0]] = unesc(f[2]);
  }
  for (const auto& f : lines(r.get("state.storage_closed")))
    e.closed_storage_.push_back({f[0], unesc(f[1]), parse_int(f[2], "in"),
                                 parse_int(f[3], "out")});
  for (const auto& f : lines(r.get("state.traffic")))
    e.traffic_[f[0]] = {static_cast<int>(parse_int(f[1], "teu")),
                        f[2] == "-" ? std::nullopt : std::optional(f[2])};
  for (const auto& f : lines(r.get("state.gate_events")))
    e.gate_events_.push_back(
        {f[0] == "I", validate_container_id(f[1]), f[2], parse_int(f[3], "at")});
  for (const auto& f : lines(r.get("state.list_exports")))
    e.list_exports_[f[0]] = unesc(f[1]);
  for (const auto& f : lines(r.get("state.instruction_docs")))
    e.instruction_docs_.push_back(unesc(join(f, '|')));
  for (const auto& f : lines(r.get("state.run_log"))) e.run_log_.push_back(unesc(join(f, '|')));
  for (const auto& f : lines(r.get("state.reefer_alarms")))
    e.reefer_alarms_.push_back({f[0], parse_int(f[1], "at"), parse_double(f[2], "reading"),
                                parse_double(f[3], "setpoint")});
  {
    std::vector<AuditRecord> records;
    for (const auto& f : lines(r.get("state.audit"))) {
      AuditRecord a;
      a.time = parse_int(f[0], "time");
      a.user = unesc(f[1]);
      a.command = unesc(f[2]);
      a.outcome = f[3];
      a.prev_hash = std::stoull(f[4], nullptr, 16);
      a.hash = std::stoull(f[5], nullptr, 16);
      records.push_back(std::move(a));
    }
    e.audit_.restore(std::move(records));
    if (!e.audit_.verify()) fail(Err::CorruptSnapshot, "audit chain does not verify");
  }
  {
    const std::string& s = r.get("state.edi_out");
    auto rows = split(s, '\n');
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (!starts_with(rows[i], "file|")) continue;
      e.edi_out_[rows[i].substr(5)] = tokenize(rows[i + 1]);
    }
  }
  return e;
}

}  // namespace tos
