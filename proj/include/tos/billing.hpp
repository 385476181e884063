#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tos/common.hpp"

namespace tos {

// All money is integer cents in one currency per run.
using Cents = i64;

enum class RateUnit { PerMove, PerDay, Flat };

const char* rate_unit_name(RateUnit u);
RateUnit parse_rate_unit(std::string_view s);

struct Rate {
  RateUnit unit = RateUnit::PerMove;
  Cents price = 0;
  std::string currency = "EUR";
  int discount_pct = 0;  // 0..100
};

struct Contract {
  std::string client;  // "DEFAULT" for the standard contract
  TimeMs valid_from = 0;
  TimeMs valid_to = 0;
  std::map<std::string, Rate> rates;  // service code -> rate
  int free_storage_days = 0;

  void validate() const;
};

struct InvoiceLine {
  std::string service_code;
  i64 qty = 0;
  Cents unit_price = 0;
  int discount_pct = 0;
  Cents amount = 0;  // qty * price * (1 - discount/100), rounded half up
};

struct Invoice {
  i64 number = 0;  // strictly increasing, gap-free
  std::string client;
  std::vector<InvoiceLine> lines;
  Cents advances_applied = 0;
  Cents total = 0;  // sum(lines) - advances_applied, never negative
};

struct Advance {
  std::string client;
  Cents amount = 0;
  TimeMs received_at = 0;
  Cents remaining = 0;
};

enum class EventSource { Tos, Manual };

struct BillingEvent {
  i64 event_id = 0;
  std::string record_type;  // handling | storage | special | vessel
  std::string service_code;
  std::string client;
  std::string container;  // optional
  i64 qty = 0;
  TimeMs occurred_at = 0;
  EventSource source = EventSource::Tos;
};

struct StorageInterval {
  std::string container;
  std::string client;
  TimeMs in_at = 0;
  TimeMs out_at = 0;
};

// Client contract valid at `date`, else the default contract. Total.
const Contract& resolve_contract(const std::string& client, TimeMs date,
                                 const std::vector<Contract>& contracts,
                                 const Contract& default_contract);

struct RatedLines {
  std::vector<InvoiceLine> lines;
  std::vector<std::string> unknown_codes;  // per offending event, aggregated
};

Cents line_amount(i64 qty, Cents unit_price, int discount_pct);

// PerMove/Flat events rate directly; storage rates ceil(hours/24) minus the
// free days (floored at zero) per interval. Unknown service codes are
// collected, never silently dropped.
RatedLines rate_events(const std::vector<BillingEvent>& events,
                       const std::vector<StorageInterval>& storage, const Contract& contract,
                       const std::string& storage_service_code = "STORAGE");

i64 billable_storage_days(TimeMs in_at, TimeMs out_at, int free_days);

// Invoice numbering with a persisted-counter cross-check.
class InvoiceSequence {
 public:
  explicit InvoiceSequence(i64 last_issued = 0) : last_issued_(last_issued) {}
  i64 next();
  i64 last_issued() const { return last_issued_; }
  // Detects drift between this counter and the caller's persisted view.
  void verify(i64 persisted_last) const;

 private:
  i64 last_issued_;
};

Invoice create_invoice(const std::string& client, const std::vector<InvoiceLine>& lines,
                       std::vector<Advance>& advances, InvoiceSequence& sequence);

// Fixed export format for the external Billing Information System:
// record_type|event_id|client|service_code|container|qty|unit|timestamp
// ordered by (time, event id), header first.
std::string export_billing_feed(const std::vector<BillingEvent>& events, TimeMs period_begin,
                                TimeMs period_end);

// ---- lock/unlock command file ---------------------------------------------------

enum class LockTargetKind { Client, Container };

struct LockCommand {
  bool lock = true;
  LockTargetKind kind = LockTargetKind::Client;
  std::string id;
};

// Grammar: (LOCK|UNLOCK) (CLIENT|CONTAINER) <id>
LockCommand parse_lock_command(std::string_view line);

// The real-time file interface: one command per line, applied in order.
// Blank lines and '#' comments are skipped.
std::vector<LockCommand> parse_lock_file(std::string_view text);

// ---- tariff file -----------------------------------------------------------------

struct TariffBook {
  std::vector<Contract> contracts;
  Contract default_contract;
};

TariffBook load_tariffs(const std::string& path);
TariffBook parse_tariffs(std::string_view text, const std::string& origin);

}  // namespace tos
