#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/layout.hpp"
#include "tos/types.hpp"

namespace tos {

struct Port {
  std::string code;  // LOCODE-shaped
  std::string name;
};

struct MaritimeService {
  std::string id;
  std::string name;
  std::vector<std::string> rotation;  // port codes, must exist in the directory
};

struct TerminalOperator {
  std::string id;
  std::string name;
};

struct WorkShift {
  std::string id;
  std::string name;
  int start_minute = 0;  // minutes from midnight
  int end_minute = 0;
  bool overtime = false;
};

struct StaffMember {
  std::string id;
  std::string name;
  std::string function;
};

enum class Role { Planner, GateClerk, BillingClerk, Admin };

const char* role_name(Role r);
Role parse_role(std::string_view s);

struct UserAccount {
  std::string user;
  Role role = Role::Planner;
};

// Central store for the kernel categories. Single writer; reads hand out
// immutable snapshots/references. Upserts enforce id uniqueness on insert
// and referential integrity; deletes refuse while referenced.
class MasterStore {
 public:
  // category 1
  void upsert_partner(const Partner& p);
  const Partner* find_partner(const std::string& id) const;
  Partner& partner(const std::string& id);
  // category 2 (transport: vessel profiles + visits)
  void upsert_profile(const VesselProfile& p);
  const VesselProfile* find_profile(const std::string& name) const;
  void upsert_visit(const VesselVisit& v);
  const VesselVisit* find_visit(const std::string& id) const;
  VesselVisit& visit(const std::string& id);
  // category 3
  void upsert_service(const MaritimeService& s);
  const MaritimeService* find_service(const std::string& id) const;
  // category 4
  void upsert_port(const Port& p);
  const Port* find_port(const std::string& code) const;
  // category 5
  void set_size_types(SizeTypeTable table) { size_types_ = std::move(table); }
  const SizeTypeTable& size_types() const { return size_types_; }
  // category 6
  void upsert_operator(const TerminalOperator& o);
  // category 7
  void upsert_shift(const WorkShift& s);
  // category 8
  void upsert_equipment(const EquipmentSpec& e);
  const EquipmentSpec* find_equipment(const std::string& id) const;
  // category 9
  void upsert_staff(const StaffMember& s);
  // category 10
  void upsert_user(const UserAccount& u);
  const UserAccount* find_user(const std::string& name) const;
  // category 11
  void set_config(const std::string& key, const std::string& value) { config_[key] = value; }
  std::string config_or(const std::string& key, const std::string& dflt) const;

  void remove_profile(const std::string& name);
  void remove_partner(const std::string& id);

  const std::map<std::string, Partner>& partners() const { return partners_; }
  const std::map<std::string, VesselProfile>& profiles() const { return profiles_; }
  const std::map<std::string, VesselVisit>& visits() const { return visits_; }
  const std::map<std::string, EquipmentSpec>& equipment() const { return equipment_; }
  const std::map<std::string, UserAccount>& users() const { return users_; }
  const std::map<std::string, Port>& ports() const { return ports_; }
  const std::map<std::string, MaritimeService>& services() const { return services_; }
  const std::map<std::string, TerminalOperator>& operators() const { return operators_; }
  const std::map<std::string, WorkShift>& shifts() const { return shifts_; }
  const std::map<std::string, StaffMember>& staff() const { return staff_; }
  const std::map<std::string, std::string>& config() const { return config_; }

  // Cross-category referential sweep; throws DanglingReference on the first
  // broken link. Tests call this after every mutation.
  void check_integrity() const;

  // Loads every category file present in `dir` (partners.psv, ports.psv,
  // services.psv, vessel_profiles.psv, visits.psv, iso_types.psv,
  // operators.psv, shifts.psv, equipment.psv, staff.psv, users.psv,
  // config.psv). Missing files are skipped.
  static MasterStore load_dir(const std::string& dir);

 private:
  std::map<std::string, Partner> partners_;
  std::map<std::string, VesselProfile> profiles_;
  std::map<std::string, VesselVisit> visits_;
  std::map<std::string, MaritimeService> services_;
  std::map<std::string, Port> ports_;
  SizeTypeTable size_types_;
  std::map<std::string, TerminalOperator> operators_;
  std::map<std::string, WorkShift> shifts_;
  std::map<std::string, EquipmentSpec> equipment_;
  std::map<std::string, StaffMember> staff_;
  std::map<std::string, UserAccount> users_;
  std::map<std::string, std::string> config_;
};

}  // namespace tos
