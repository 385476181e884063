#include "tos/report.hpp"

#include <algorithm>
#include <cstdio>

namespace tos {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

KpiReport compute_kpis(const std::vector<HistoryEntry>& history, const YardState& yard,
                       const YardLayout& layout, TimeMs period_begin, TimeMs period_end) {
  if (period_begin >= period_end) fail(Err::EmptyPeriod, "KPI period is empty");
  KpiReport r;
  r.period_begin = period_begin;
  r.period_end = period_end;
  double hours = static_cast<double>(period_end - period_begin) / kMsPerHour;

  std::map<std::string, i64> quay_lifts;
  std::map<std::string, i64> rtg_moves;
  i64 unproductive = 0;
  for (const auto& h : history) {
    if (h.end < period_begin || h.end >= period_end) continue;
    ++r.total_legs;
    if (h.kind == EquipmentKind::QuayCrane) {
      ++quay_lifts[h.equipment];
      ++r.quay_moves;
    }
    if (h.kind == EquipmentKind::Rtg) ++rtg_moves[h.equipment];
    if (h.rehandle || h.empty_travel_m > 0) ++unproductive;
  }
  for (const auto& [crane, lifts] : quay_lifts)
    r.crane_moves_per_hour[crane] = static_cast<double>(lifts) / hours;
  if (!rtg_moves.empty()) {
    i64 lo = rtg_moves.begin()->second, hi = lo;
    for (const auto& [id, n] : rtg_moves) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    r.rtg_balance = hi - lo;
  }
  r.unproductive_ratio =
      r.total_legs == 0 ? 0.0 : static_cast<double>(unproductive) / r.total_legs;

  for (const auto& [zone, cap] : capacity_report(yard, layout))
    r.yard_occupancy_pct[zone] = cap.pct;
  return r;
}

std::string kpi_to_kv(const KpiReport& r) {
  std::string out;
  out += "period_begin=" + format_iso8601(r.period_begin) + "\n";
  out += "period_end=" + format_iso8601(r.period_end) + "\n";
  out += "total_legs=" + std::to_string(r.total_legs) + "\n";
  out += "quay_moves=" + std::to_string(r.quay_moves) + "\n";
  out += "rtg_balance=" + std::to_string(r.rtg_balance) + "\n";
  out += "unproductive_ratio=" + fmt(r.unproductive_ratio) + "\n";
  for (const auto& [crane, rate] : r.crane_moves_per_hour)
    out += "crane_rate." + crane + "=" + fmt(rate) + "\n";
  for (const auto& [zone, pct] : r.yard_occupancy_pct)
    out += "yard_occupancy_pct." + zone + "=" + fmt(pct) + "\n";
  return out;
}

std::string kpi_to_psv(const KpiReport& r) {
  std::string out = "metric|key|value\n";
  out += "period|begin|" + format_iso8601(r.period_begin) + "\n";
  out += "period|end|" + format_iso8601(r.period_end) + "\n";
  out += "legs|total|" + std::to_string(r.total_legs) + "\n";
  out += "quay_moves|total|" + std::to_string(r.quay_moves) + "\n";
  out += "rtg_balance|max_minus_min|" + std::to_string(r.rtg_balance) + "\n";
  out += "unproductive_ratio||" + fmt(r.unproductive_ratio) + "\n";
  for (const auto& [crane, rate] : r.crane_moves_per_hour)
    out += "crane_rate|" + crane + "|" + fmt(rate) + "\n";
  for (const auto& [zone, pct] : r.yard_occupancy_pct)
    out += "yard_occupancy_pct|" + zone + "|" + fmt(pct) + "\n";
  return out;
}

AuthorityStats authority_stats(const std::vector<HistoryEntry>& history,
                               const std::map<std::string, ContainerTrafficInfo>& traffic,
                               TimeMs period_begin, TimeMs period_end, i64 work_accidents) {
  AuthorityStats s;
  s.work_accidents = work_accidents;
  double hours = static_cast<double>(period_end - period_begin) / kMsPerHour;
  i64 quay_moves = 0;
  for (const auto& h : history) {
    if (h.end < period_begin || h.end >= period_end) continue;
    if (h.kind != EquipmentKind::QuayCrane) continue;
    ++quay_moves;
    ++s.boxes;
    auto it = traffic.find(h.container);
    int teu = it == traffic.end() ? 1 : it->second.teu;
    s.teu += teu;
    if (it != traffic.end() && it->second.imo_class) ++s.dangerous_by_class[*it->second.imo_class];
  }
  s.productivity_moves_per_hour = hours <= 0 ? 0.0 : quay_moves / hours;
  return s;
}

std::string authority_stats_to_psv(const AuthorityStats& s) {
  std::string out = "statistic|key|value\n";
  out += "volumes|boxes|" + std::to_string(s.boxes) + "\n";
  out += "volumes|teu|" + std::to_string(s.teu) + "\n";
  for (const auto& [cls, n] : s.dangerous_by_class)
    out += "dangerous_materials|" + cls + "|" + std::to_string(n) + "\n";
  out += "work_accidents||" + std::to_string(s.work_accidents) + "\n";
  out += "productivity|moves_per_hour|" + fmt(s.productivity_moves_per_hour) + "\n";
  return out;
}

// ---- archiving ----------------------------------------------------------------

const char* archive_tier_name(ArchiveTier t) {
  switch (t) {
    case ArchiveTier::Operational: return "Operational";
    case ArchiveTier::MidTerm: return "MidTerm";
    case ArchiveTier::LongTerm: return "LongTerm";
  }
  return "?";
}

ArchiveTier tier_for_age(TimeMs age_ms, int operational_cutoff_years,
                         int longterm_cutoff_years) {
  if (age_ms < operational_cutoff_years * kMsPerYear) return ArchiveTier::Operational;
  if (age_ms < longterm_cutoff_years * kMsPerYear) return ArchiveTier::MidTerm;
  return ArchiveTier::LongTerm;
}

ArchivePartition partition_archive(const std::vector<ArchiveRecord>& records, TimeMs now,
                                   int operational_cutoff_years, int longterm_cutoff_years) {
  ArchivePartition p;
  for (const auto& r : records) {
    if (r.timestamp > now)
      fail(Err::FutureTimestamp, "record " + std::to_string(r.id) + " dated " +
                                     format_iso8601(r.timestamp) + " after " +
                                     format_iso8601(now));
    switch (tier_for_age(now - r.timestamp, operational_cutoff_years, longterm_cutoff_years)) {
      case ArchiveTier::Operational: p.operational.push_back(r); break;
      case ArchiveTier::MidTerm: p.midterm.push_back(r); break;
      case ArchiveTier::LongTerm: p.longterm.push_back(r); break;
    }
  }
  return p;
}

std::string export_longterm(const std::vector<ArchiveRecord>& records) {
  std::string out = "id:int|timestamp:time|category:str|payload:str\n";
  for (const auto& r : records) {
    out += std::to_string(r.id);
    out += '|';
    out += format_iso8601(r.timestamp);
    out += '|';
    out += r.category;
    out += '|';
    out += r.payload;
    out += '\n';
  }
  return out;
}

std::vector<ArchiveRecord> import_longterm(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != "id:int|timestamp:time|category:str|payload:str")
    fail(Err::ParseError, "long-term archive header missing or unexpected");
  std::vector<ArchiveRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto fields = split(lines[i], '|');
    if (fields.size() != 4)
      fail(Err::ParseError, "archive line " + std::to_string(i + 1) + ": want 4 fields");
    ArchiveRecord r;
    r.id = parse_int(fields[0], "archive id");
    r.timestamp = parse_iso8601(fields[1]);
    r.category = fields[2];
    r.payload = fields[3];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tos
