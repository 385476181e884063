#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/dispatch.hpp"
#include "tos/yard.hpp"

namespace tos {

struct KpiReport {
  TimeMs period_begin = 0;
  TimeMs period_end = 0;
  std::map<std::string, double> crane_moves_per_hour;  // per quay crane
  i64 rtg_balance = 0;            // max-min RTG legs over the period
  double unproductive_ratio = 0;  // (rehandle or empty-approach legs) / legs
  std::map<std::string, double> yard_occupancy_pct;  // per zone
  i64 total_legs = 0;
  i64 quay_moves = 0;
};

// Every figure is recomputed from the raw history each call; nothing is
// cached between reports.
KpiReport compute_kpis(const std::vector<HistoryEntry>& history, const YardState& yard,
                       const YardLayout& layout, TimeMs period_begin, TimeMs period_end);

std::string kpi_to_kv(const KpiReport& report);    // machine-readable key=value
std::string kpi_to_psv(const KpiReport& report);   // delimited report file

struct ContainerTrafficInfo {
  int teu = 1;
  std::optional<std::string> imo_class;
};

struct AuthorityStats {
  i64 boxes = 0;
  i64 teu = 0;
  std::map<std::string, i64> dangerous_by_class;
  double productivity_moves_per_hour = 0;
  i64 work_accidents = 0;  // scenario-supplied counter
};

// Volumes count quay moves: 20 ft boxes as 1 TEU, 40/45 ft as 2.
AuthorityStats authority_stats(const std::vector<HistoryEntry>& history,
                               const std::map<std::string, ContainerTrafficInfo>& traffic,
                               TimeMs period_begin, TimeMs period_end, i64 work_accidents = 0);

std::string authority_stats_to_psv(const AuthorityStats& stats);

// ---- archiving --------------------------------------------------------------

// Age boundaries are half-open: [0, operational) / [operational, longterm) /
// [longterm, inf), in years of 365.25 days.
constexpr i64 kMsPerYear = 31557600000LL;

enum class ArchiveTier { Operational, MidTerm, LongTerm };

const char* archive_tier_name(ArchiveTier t);

struct ArchiveRecord {
  i64 id = 0;
  TimeMs timestamp = 0;
  std::string category;
  std::string payload;

  friend bool operator==(const ArchiveRecord&, const ArchiveRecord&) = default;
};

struct ArchivePartition {
  std::vector<ArchiveRecord> operational;
  std::vector<ArchiveRecord> midterm;
  std::vector<ArchiveRecord> longterm;
};

ArchivePartition partition_archive(const std::vector<ArchiveRecord>& records, TimeMs now,
                                   int operational_cutoff_years = 3,
                                   int longterm_cutoff_years = 10);

ArchiveTier tier_for_age(TimeMs age_ms, int operational_cutoff_years = 3,
                         int longterm_cutoff_years = 10);

// Flat text dump with a typed header; import(export(r)) preserves every
// record and export is byte-stable across the round trip.
std::string export_longterm(const std::vector<ArchiveRecord>& records);
std::vector<ArchiveRecord> import_longterm(std::string_view text);

}  // namespace tos
