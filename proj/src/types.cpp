#include "tos/types.hpp"

namespace tos {

SizeTypeTable SizeTypeTable::load(const std::string& path) {
  return from_file(DelimitedFile::read_file(path));
}

SizeTypeTable SizeTypeTable::from_file(const DelimitedFile& f) {
  SizeTypeTable t;
  auto c_code = f.col("code"), c_len = f.col("length_ft"), c_height = f.col("height"),
       c_group = f.col("group"), c_tare = f.col("tare_kg"), c_payload = f.col("max_payload_kg");
  for (const auto& row : f.rows()) {
    IsoSizeType st;
    st.code = row[c_code];
    if (st.code.size() != 4)
      fail(Err::ParseError, f.origin() + ": size/type code '" + st.code + "' must be 4 chars");
    st.length_ft = static_cast<int>(parse_int(row[c_len], "length_ft"));
    if (st.length_ft != 20 && st.length_ft != 40 && st.length_ft != 45)
      fail(Err::ParseError, f.origin() + ": unsupported length " + row[c_len]);
    if (row[c_height] == "Standard")
      st.height = ContainerHeight::Standard;
    else if (row[c_height] == "HighCube")
      st.height = ContainerHeight::HighCube;
    else
      fail(Err::ParseError, f.origin() + ": bad height '" + row[c_height] + "'");
    if (row[c_group] == "General")
      st.group = SizeGroup::General;
    else if (row[c_group] == "Reefer")
      st.group = SizeGroup::Reefer;
    else if (row[c_group] == "OpenTop")
      st.group = SizeGroup::OpenTop;
    else if (row[c_group] == "Tank")
      st.group = SizeGroup::Tank;
    else if (row[c_group] == "Flat")
      st.group = SizeGroup::Flat;
    else
      fail(Err::ParseError, f.origin() + ": bad group '" + row[c_group] + "'");
    st.tare_kg = parse_int(row[c_tare], "tare_kg");
    st.max_payload_kg = parse_int(row[c_payload], "max_payload_kg");
    if (t.table_.count(st.code))
      fail(Err::DuplicateId, f.origin() + ": duplicate size/type code " + st.code);
    t.table_[st.code] = st;
  }
  return t;
}

const IsoSizeType& SizeTypeTable::decode(std::string_view code) const {
  auto it = table_.find(std::string(code));
  if (it == table_.end())
    fail(Err::UnknownCode, "size/type code '" + std::string(code) + "' not in table");
  return it->second;
}

void validate_container(const Container& c, const SizeTypeTable& table) {
  const IsoSizeType& st = table.decode(c.size_type);
  if (c.reefer && st.group != SizeGroup::Reefer)
    fail(Err::ValidationFailed,
         c.id.str() + ": reefer attributes on non-reefer size/type " + c.size_type);
  if (c.gross_weight_kg <= 0)
    fail(Err::ValidationFailed, c.id.str() + ": gross weight must be positive");
  if (c.gross_weight_kg > st.max_gross_kg())
    fail(Err::ValidationFailed, c.id.str() + ": gross weight " +
                                    std::to_string(c.gross_weight_kg) + " kg exceeds " +
                                    std::to_string(st.max_gross_kg()) + " kg for " + c.size_type);
  validate_port_code(c.pol);
  validate_port_code(c.pod);
}

const char* visit_status_name(VisitStatus s) {
  switch (s) {
    case VisitStatus::Announced: return "Announced";
    case VisitStatus::Berthed: return "Berthed";
    case VisitStatus::Working: return "Working";
    case VisitStatus::Closed: return "Closed";
  }
  return "?";
}

void advance_visit(VesselVisit& v, VisitStatus next) {
  if (static_cast<int>(next) <= static_cast<int>(v.status))
    fail(Err::ValidationFailed, "visit " + v.visit_id + ": cannot move from " +
                                    visit_status_name(v.status) + " back to " +
                                    visit_status_name(next));
  v.status = next;
}

const char* equipment_kind_name(EquipmentKind k) {
  switch (k) {
    case EquipmentKind::QuayCrane: return "QuayCrane";
    case EquipmentKind::Rtg: return "Rtg";
    case EquipmentKind::ReachStacker: return "ReachStacker";
    case EquipmentKind::Tractor: return "Tractor";
    case EquipmentKind::Chassis: return "Chassis";
  }
  return "?";
}

EquipmentKind parse_equipment_kind(std::string_view s) {
  if (s == "QuayCrane") return EquipmentKind::QuayCrane;
  if (s == "Rtg") return EquipmentKind::Rtg;
  if (s == "ReachStacker") return EquipmentKind::ReachStacker;
  if (s == "Tractor") return EquipmentKind::Tractor;
  if (s == "Chassis") return EquipmentKind::Chassis;
  fail(Err::ParseError, "unknown equipment kind '" + std::string(s) + "'");
}

const char* partner_kind_name(PartnerKind k) {
  switch (k) {
    case PartnerKind::ShippingLine: return "ShippingLine";
    case PartnerKind::Agent: return "Agent";
    case PartnerKind::TruckingCompany: return "TruckingCompany";
    case PartnerKind::Nvocc: return "Nvocc";
    case PartnerKind::Authority: return "Authority";
  }
  return "?";
}

PartnerKind parse_partner_kind(std::string_view s) {
  if (s == "ShippingLine") return PartnerKind::ShippingLine;
  if (s == "Agent") return PartnerKind::Agent;
  if (s == "TruckingCompany") return PartnerKind::TruckingCompany;
  if (s == "Nvocc") return PartnerKind::Nvocc;
  if (s == "Authority") return PartnerKind::Authority;
  fail(Err::ParseError, "unknown partner kind '" + std::string(s) + "'");
}

}  // namespace tos
