#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/common.hpp"
#include "tos/ids.hpp"

namespace tos {

enum class ContainerStatus { Full, Empty };
enum class Transaction { Import, Export, Transshipment };
enum class ContainerHeight { Standard, HighCube };
enum class SizeGroup { General, Reefer, OpenTop, Tank, Flat };

// IMO dangerous-goods class, "1".."9" with optional division like "1.4".
struct ImoClass {
  std::string code;
  friend bool operator==(const ImoClass&, const ImoClass&) = default;
  friend auto operator<=>(const ImoClass&, const ImoClass&) = default;
};

struct IsoSizeType {
  std::string code;  // 4 chars, e.g. "22G1"
  int length_ft = 0;  // 20, 40 or 45
  ContainerHeight height = ContainerHeight::Standard;
  SizeGroup group = SizeGroup::General;
  i64 tare_kg = 0;
  i64 max_payload_kg = 0;

  i64 max_gross_kg() const { return tare_kg + max_payload_kg; }
  int teu() const { return length_ft >= 40 ? 2 : 1; }
};

// The shipped, editable size/type code table. Decoding is total over the
// table; anything else is UnknownCode.
class SizeTypeTable {
 public:
  static SizeTypeTable load(const std::string& path);
  static SizeTypeTable from_file(const DelimitedFile& f);

  const IsoSizeType& decode(std::string_view code) const;
  bool contains(std::string_view code) const { return table_.count(std::string(code)) > 0; }
  const std::map<std::string, IsoSizeType>& all() const { return table_; }

 private:
  std::map<std::string, IsoSizeType> table_;
};

struct ReeferAttrs {
  double setpoint_c = 0.0;
  friend bool operator==(const ReeferAttrs&, const ReeferAttrs&) = default;
};

struct Container {
  ContainerId id;
  std::string size_type;  // key into SizeTypeTable
  i64 gross_weight_kg = 0;
  ContainerStatus status = ContainerStatus::Full;
  std::optional<ImoClass> imo_class;
  std::optional<ReeferAttrs> reefer;
  std::vector<std::string> seal_numbers;
  std::string pol;
  std::string pod;
  Transaction transaction = Transaction::Import;
};

// Validates the cross-field rules that need the size table (reefer code,
// weight ceiling). Throws ValidationFailed.
void validate_container(const Container& c, const SizeTypeTable& table);

struct VesselProfile {
  std::string name;
  double loa_m = 0;
  double draft_m = 0;
  int bays = 0;
  int rows = 0;
  int tiers = 0;
  i64 max_stack_weight_kg = 0;
  int max_stack_height = 0;
};

enum class VisitStatus { Announced, Berthed, Working, Closed };

const char* visit_status_name(VisitStatus s);

struct VesselVisit {
  std::string visit_id;
  std::string profile;  // VesselProfile name
  TimeMs eta = 0;
  TimeMs etd = 0;
  std::string service;
  VisitStatus status = VisitStatus::Announced;
};

// Status transitions only move forward along Announced -> Berthed -> Working
// -> Closed.
void advance_visit(VesselVisit& v, VisitStatus next);

enum class EquipmentKind { QuayCrane, Rtg, ReachStacker, Tractor, Chassis };

const char* equipment_kind_name(EquipmentKind k);
EquipmentKind parse_equipment_kind(std::string_view s);

inline bool is_lifting_kind(EquipmentKind k) {
  return k == EquipmentKind::QuayCrane || k == EquipmentKind::Rtg ||
         k == EquipmentKind::ReachStacker;
}

struct EquipmentSpec {
  std::string id;
  EquipmentKind kind = EquipmentKind::Tractor;
  double speed_empty_ms = 0;
  double speed_laden_ms = 0;
  i64 handling_time_ms = 0;  // per lift; zero for non-lifting kinds
  std::string home_zone;
};

enum class PartnerKind { ShippingLine, Agent, TruckingCompany, Nvocc, Authority };

const char* partner_kind_name(PartnerKind k);
PartnerKind parse_partner_kind(std::string_view s);

struct Partner {
  std::string id;
  PartnerKind kind = PartnerKind::ShippingLine;
  std::string name;
  bool billing_lock = false;
};

}  // namespace tos
