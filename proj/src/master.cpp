#include "tos/master.hpp"

#include <filesystem>

namespace tos {

const char* role_name(Role r) {
  switch (r) {
    case Role::Planner: return "Planner";
    case Role::GateClerk: return "GateClerk";
    case Role::BillingClerk: return "BillingClerk";
    case Role::Admin: return "Admin";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  if (s == "Planner") return Role::Planner;
  if (s == "GateClerk") return Role::GateClerk;
  if (s == "BillingClerk") return Role::BillingClerk;
  if (s == "Admin") return Role::Admin;
  fail(Err::ParseError, "unknown role '" + std::string(s) + "'");
}

namespace {

template <typename T>
void insert_unique(std::map<std::string, T>& m, const std::string& id, const T& value,
                   const char* what) {
  auto [it, inserted] = m.emplace(id, value);
  if (!inserted) fail(Err::DuplicateId, std::string(what) + " " + id + " already exists");
}

}  // namespace

void MasterStore::upsert_partner(const Partner& p) {
  if (p.id.empty()) fail(Err::ValidationFailed, "partner id empty");
  insert_unique(partners_, p.id, p, "partner");
}

const Partner* MasterStore::find_partner(const std::string& id) const {
  auto it = partners_.find(id);
  return it == partners_.end() ? nullptr : &it->second;
}

Partner& MasterStore::partner(const std::string& id) {
  auto it = partners_.find(id);
  if (it == partners_.end()) fail(Err::UnknownTarget, "partner " + id);
  return it->second;
}

void MasterStore::upsert_profile(const VesselProfile& p) {
  if (p.loa_m <= 0 || p.draft_m <= 0 || p.bays <= 0 || p.rows <= 0 || p.tiers <= 0 ||
      p.max_stack_weight_kg <= 0 || p.max_stack_height <= 0)
    fail(Err::ValidationFailed, "vessel profile " + p.name + ": all limits must be > 0");
  insert_unique(profiles_, p.name, p, "vessel profile");
}

const VesselProfile* MasterStore::find_profile(const std::string& name) const {
  auto it = profiles_.find(name);
  return it == profiles_.end() ? nullptr : &it->second;
}

void MasterStore::upsert_visit(const VesselVisit& v) {
  if (!profiles_.count(v.profile))
    fail(Err::DanglingReference, "visit " + v.visit_id + " references missing profile " + v.profile);
  if (v.eta >= v.etd)
    fail(Err::ValidationFailed, "visit " + v.visit_id + ": ETA must precede ETD");
  insert_unique(visits_, v.visit_id, v, "visit");
}

const VesselVisit* MasterStore::find_visit(const std::string& id) const {
  auto it = visits_.find(id);
  return it == visits_.end() ? nullptr : &it->second;
}

VesselVisit& MasterStore::visit(const std::string& id) {
  auto it = visits_.find(id);
  if (it == visits_.end()) fail(Err::UnknownVisit, id);
  return it->second;
}

void MasterStore::upsert_service(const MaritimeService& s) {
  for (const auto& port : s.rotation)
    if (!ports_.count(port))
      fail(Err::DanglingReference, "service " + s.id + " rotation references missing port " + port);
  insert_unique(services_, s.id, s, "service");
}

const MaritimeService* MasterStore::find_service(const std::string& id) const {
  auto it = services_.find(id);
  return it == services_.end() ? nullptr : &it->second;
}

void MasterStore::upsert_port(const Port& p) {
  validate_port_code(p.code);
  insert_unique(ports_, p.code, p, "port");
}

const Port* MasterStore::find_port(const std::string& code) const {
  auto it = ports_.find(code);
  return it == ports_.end() ? nullptr : &it->second;
}

void MasterStore::upsert_operator(const TerminalOperator& o) {
  insert_unique(operators_, o.id, o, "operator");
}

void MasterStore::upsert_shift(const WorkShift& s) {
  if (s.start_minute < 0 || s.start_minute >= 24 * 60 || s.end_minute < 0 ||
      s.end_minute > 24 * 60)
    fail(Err::ValidationFailed, "shift " + s.id + ": minutes out of range");
  insert_unique(shifts_, s.id, s, "shift");
}

void MasterStore::upsert_equipment(const EquipmentSpec& e) {
  if (e.speed_empty_ms <= 0 || e.speed_laden_ms <= 0)
    fail(Err::ValidationFailed, "equipment " + e.id + ": speeds must be > 0");
  if (!is_lifting_kind(e.kind) && e.handling_time_ms != 0)
    fail(Err::ValidationFailed,
         "equipment " + e.id + ": handling time only applies to lifting kinds");
  if (is_lifting_kind(e.kind) && e.handling_time_ms <= 0)
    fail(Err::ValidationFailed, "equipment " + e.id + ": lifting kind needs handling time");
  insert_unique(equipment_, e.id, e, "equipment");
}

const EquipmentSpec* MasterStore::find_equipment(const std::string& id) const {
  auto it = equipment_.find(id);
  return it == equipment_.end() ? nullptr : &it->second;
}

void MasterStore::upsert_staff(const StaffMember& s) { insert_unique(staff_, s.id, s, "staff"); }

void MasterStore::upsert_user(const UserAccount& u) { insert_unique(users_, u.user, u, "user"); }

const UserAccount* MasterStore::find_user(const std::string& name) const {
  auto it = users_.find(name);
  return it == users_.end() ? nullptr : &it->second;
}

std::string MasterStore::config_or(const std::string& key, const std::string& dflt) const {
  auto it = config_.find(key);
  return it == config_.end() ? dflt : it->second;
}

void MasterStore::remove_profile(const std::string& name) {
  for (const auto& [id, v] : visits_)
    if (v.profile == name)
      fail(Err::DanglingReference, "profile " + name + " still referenced by visit " + id);
  if (!profiles_.erase(name)) fail(Err::UnknownTarget, "profile " + name);
}

void MasterStore::remove_partner(const std::string& id) {
  if (!partners_.erase(id)) fail(Err::UnknownTarget, "partner " + id);
}

void MasterStore::check_integrity() const {
  for (const auto& [id, v] : visits_)
    if (!profiles_.count(v.profile))
      fail(Err::DanglingReference, "visit " + id + " -> profile " + v.profile);
  for (const auto& [id, s] : services_)
    for (const auto& port : s.rotation)
      if (!ports_.count(port)) fail(Err::DanglingReference, "service " + id + " -> port " + port);
}

MasterStore MasterStore::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  MasterStore m;
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  auto exists = [&](const char* name) { return fs::exists(path(name)); };

  if (exists("ports.psv")) {
    auto f = DelimitedFile::read_file(path("ports.psv"));
    auto c_code = f.col("code"), c_name = f.col("name");
    for (const auto& r : f.rows()) m.upsert_port({r[c_code], r[c_name]});
  }
  if (exists("partners.psv")) {
    auto f = DelimitedFile::read_file(path("partners.psv"));
    auto c_id = f.col("id"), c_kind = f.col("kind"), c_name = f.col("name");
    for (const auto& r : f.rows())
      m.upsert_partner({r[c_id], parse_partner_kind(r[c_kind]), r[c_name], false});
  }
  if (exists("services.psv")) {
    auto f = DelimitedFile::read_file(path("services.psv"));
    auto c_id = f.col("id"), c_name = f.col("name"), c_rot = f.col("rotation");
    for (const auto& r : f.rows()) {
      MaritimeService s{r[c_id], r[c_name], {}};
      if (!r[c_rot].empty()) s.rotation = split(r[c_rot], ',');
      m.upsert_service(s);
    }
  }
  if (exists("vessel_profiles.psv")) {
    auto f = DelimitedFile::read_file(path("vessel_profiles.psv"));
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
  if (exists("visits.psv")) {
    auto f = DelimitedFile::read_file(path("visits.psv"));
    auto c_id = f.col("visit_id"), c_prof = f.col("profile"), c_eta = f.col("eta"),
         c_etd = f.col("etd"), c_srv = f.col("service");
    for (const auto& r : f.rows()) {
      VesselVisit v;
      v.visit_id = r[c_id];
      v.profile = r[c_prof];
      v.eta = parse_iso8601(r[c_eta]);
      v.etd = parse_iso8601(r[c_etd]);
      v.service = r[c_srv];
      m.upsert_visit(v);
    }
  }
  if (exists("iso_types.psv")) m.set_size_types(SizeTypeTable::load(path("iso_types.psv")));
  if (exists("operators.psv")) {
    auto f = DelimitedFile::read_file(path("operators.psv"));
    auto c_id = f.col("id"), c_name = f.col("name");
    for (const auto& r : f.rows()) m.upsert_operator({r[c_id], r[c_name]});
  }
  if (exists("shifts.psv")) {
    auto f = DelimitedFile::read_file(path("shifts.psv"));
    auto c_id = f.col("id"), c_name = f.col("name"), c_start = f.col("start_minute"),
         c_end = f.col("end_minute"), c_ot = f.col("overtime");
    for (const auto& r : f.rows())
      m.upsert_shift({r[c_id], r[c_name], static_cast<int>(parse_int(r[c_start], "start")),
                      static_cast<int>(parse_int(r[c_end], "end")), r[c_ot] == "1"});
  }
  if (exists("equipment.psv")) {
    auto f = DelimitedFile::read_file(path("equipment.psv"));
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
  if (exists("staff.psv")) {
    auto f = DelimitedFile::read_file(path("staff.psv"));
    auto c_id = f.col("id"), c_name = f.col("name"), c_fn = f.col("function");
    for (const auto& r : f.rows()) m.upsert_staff({r[c_id], r[c_name], r[c_fn]});
  }
  if (exists("users.psv")) {
    auto f = DelimitedFile::read_file(path("users.psv"));
    auto c_user = f.col("user"), c_role = f.col("role");
    for (const auto& r : f.rows()) m.upsert_user({r[c_user], parse_role(r[c_role])});
  }
  if (exists("config.psv")) {
    auto f = DelimitedFile::read_file(path("config.psv"));
    auto c_key = f.col("key"), c_val = f.col("value");
    for (const auto& r : f.rows()) m.set_config(r[c_key], r[c_val]);
  }
  m.check_integrity();
  return m;
}

}  // namespace tos
