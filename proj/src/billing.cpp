#include "tos/billing.hpp"

#include <algorithm>

namespace tos {

const char* rate_unit_name(RateUnit u) {
  switch (u) {
    case RateUnit::PerMove: return "PerMove";
    case RateUnit::PerDay: return "PerDay";
    case RateUnit::Flat: return "Flat";
  }
  return "?";
}

RateUnit parse_rate_unit(std::string_view s) {
  if (s == "PerMove") return RateUnit::PerMove;
  if (s == "PerDay") return RateUnit::PerDay;
  if (s == "Flat") return RateUnit::Flat;
  fail(Err::ParseError, "unknown rate unit '" + std::string(s) + "'");
}

void Contract::validate() const {
  if (valid_from > valid_to)
    fail(Err::ValidationFailed, "contract " + client + ": validity range inverted");
  for (const auto& [code, rate] : rates) {
    if (rate.price < 0) fail(Err::ValidationFailed, client + "/" + code + ": negative price");
    if (rate.discount_pct < 0 || rate.discount_pct > 100)
      fail(Err::ValidationFailed, client + "/" + code + ": discount outside 0..100");
  }
  if (free_storage_days < 0)
    fail(Err::ValidationFailed, client + ": negative free storage days");
}

const Contract& resolve_contract(const std::string& client, TimeMs date,
                                 const std::vector<Contract>& contracts,
                                 const Contract& default_contract) {
  for (const auto& c : contracts)
    if (c.client == client && c.valid_from <= date && date <= c.valid_to) return c;
  return default_contract;
}

Cents line_amount(i64 qty, Cents unit_price, int discount_pct) {
  // round half up on the exact rational qty*price*(100-d)/100
  i64 numerator = qty * unit_price * (100 - discount_pct);
  return (numerator + 50) / 100;
}

i64 billable_storage_days(TimeMs in_at, TimeMs out_at, int free_days) {
  if (out_at < in_at) fail(Err::ValidationFailed, "storage interval inverted");
  TimeMs dwell_ms = out_at - in_at;
  i64 days = (dwell_ms + kMsPerDay - 1) / kMsPerDay;  // calendar-hour ceiling
  return std::max<i64>(0, days - free_days);
}

RatedLines rate_events(const std::vector<BillingEvent>& events,
                       const std::vector<StorageInterval>& storage, const Contract& contract,
                       const std::string& storage_service_code) {
  RatedLines out;
  // aggregate per service code so one client gets one line per service
  std::map<std::string, i64> qty_by_code;
  for (const auto& e : events) {
    auto it = contract.rates.find(e.service_code);
    if (it == contract.rates.end()) {
      out.unknown_codes.push_back("event " + std::to_string(e.event_id) + ": service code '" +
                                  e.service_code + "' not in contract " + contract.client);
      continue;
    }
    if (e.qty <= 0) fail(Err::ValidationFailed, "billing event with non-positive qty");
    qty_by_code[e.service_code] += it->second.unit == RateUnit::Flat ? 1 : e.qty;
  }

  i64 storage_days = 0;
  for (const auto& si : storage)
    storage_days += billable_storage_days(si.in_at, si.out_at, contract.free_storage_days);
  if (storage_days > 0) {
    auto it = contract.rates.find(storage_service_code);
    if (it == contract.rates.end()) {
      out.unknown_codes.push_back("storage: service code '" + storage_service_code +
                                  "' not in contract " + contract.client);
    } else {
      qty_by_code[storage_service_code] += storage_days;
    }
  }

  for (const auto& [code, qty] : qty_by_code) {
    const Rate& rate = contract.rates.at(code);
    InvoiceLine line;
    line.service_code = code;
    line.qty = qty;
    line.unit_price = rate.price;
    line.discount_pct = rate.discount_pct;
    line.amount = line_amount(qty, rate.price, rate.discount_pct);
    out.lines.push_back(std::move(line));
  }
  return out;
}

i64 InvoiceSequence::next() { return ++last_issued_; }

void InvoiceSequence::verify(i64 persisted_last) const {
  if (persisted_last != last_issued_)
    fail(Err::SequenceCorruption, "invoice counter drift: persisted " +
                                      std::to_string(persisted_last) + ", live " +
                                      std::to_string(last_issued_));
}

Invoice create_invoice(const std::string& client, const std::vector<InvoiceLine>& lines,
                       std::vector<Advance>& advances, InvoiceSequence& sequence) {
  if (lines.empty()) fail(Err::EmptyLines, "invoice for " + client + " has no lines");
  Invoice inv;
  inv.client = client;
  inv.lines = lines;
  Cents due = 0;
  for (const auto& l : lines) due += l.amount;

  // consume this client's advances oldest first
  std::vector<Advance*> mine;
  for (auto& a : advances)
    if (a.client == client && a.remaining > 0) mine.push_back(&a);
  std::stable_sort(mine.begin(), mine.end(),
                   [](const Advance* a, const Advance* b) { return a->received_at < b->received_at; });
  for (Advance* a : mine) {
    if (due == inv.advances_applied) break;
    Cents take = std::min(a->remaining, due - inv.advances_applied);
    a->remaining -= take;
    inv.advances_applied += take;
  }
  inv.total = due - inv.advances_applied;
  inv.number = sequence.next();
  return inv;
}

std::string export_billing_feed(const std::vector<BillingEvent>& events, TimeMs period_begin,
                                TimeMs period_end) {
  std::vector<const BillingEvent*> selected;
  for (const auto& e : events)
    if (e.occurred_at >= period_begin && e.occurred_at < period_end) selected.push_back(&e);
  std::sort(selected.begin(), selected.end(), [](const BillingEvent* a, const BillingEvent* b) {
    if (a->occurred_at != b->occurred_at) return a->occurred_at < b->occurred_at;
    return a->event_id < b->event_id;
  });
  std::string out = "record_type|event_id|client|service_code|container|qty|unit|timestamp\n";
  for (const BillingEvent* e : selected) {
    out += e->record_type;
    out += '|';
    out += std::to_string(e->event_id);
    out += '|';
    out += e->client;
    out += '|';
    out += e->service_code;
    out += '|';
    out += e->container;
    out += '|';
    out += std::to_string(e->qty);
    out += '|';
    out += e->source == EventSource::Tos ? "TOS" : "MANUAL";
    out += '|';
    out += format_iso8601(e->occurred_at);
    out += '\n';
  }
  return out;
}

LockCommand parse_lock_command(std::string_view line) {
  auto tokens = split(trim(line), ' ');
  std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
  if (tokens.size() != 3)
    fail(Err::ParseError, "lock command '" + std::string(line) +
                              "' (want: LOCK|UNLOCK CLIENT|CONTAINER <id>)");
  LockCommand cmd;
  if (tokens[0] == "LOCK")
    cmd.lock = true;
  else if (tokens[0] == "UNLOCK")
    cmd.lock = false;
  else
    fail(Err::ParseError, "lock command verb '" + tokens[0] + "'");
  if (tokens[1] == "CLIENT")
    cmd.kind = LockTargetKind::Client;
  else if (tokens[1] == "CONTAINER")
    cmd.kind = LockTargetKind::Container;
  else
    fail(Err::ParseError, "lock command target kind '" + tokens[1] + "'");
  cmd.id = tokens[2];
  return cmd;
}

std::vector<LockCommand> parse_lock_file(std::string_view text) {
  std::vector<LockCommand> out;
  for (const auto& line : split(text, '\n')) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(parse_lock_command(t));
  }
  return out;
}

// ---- tariffs ----------------------------------------------------------------------

TariffBook load_tariffs(const std::string& path) {
  return parse_tariffs(read_text_file(path), path);
}

TariffBook parse_tariffs(std::string_view text, const std::string& origin) {
  TariffBook book;
  std::map<std::string, Contract> contracts;
  std::string section;
  std::vector<std::string> header;
  std::size_t line_no = 0;

  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      header.clear();
      continue;
    }
    auto fields = split(line, '|');
    if (header.empty()) {
      header = fields;
      continue;
    }
    auto field = [&](std::string_view name) -> const std::string& {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return fields[i];
      fail(Err::ParseError, origin + ":" + std::to_string(line_no) + ": missing column '" +
                                std::string(name) + "'");
    };
    if (section == "contracts") {
      Contract c;
      c.client = field("client");
      c.valid_from = parse_iso8601(field("valid_from"));
      c.valid_to = parse_iso8601(field("valid_to"));
      c.free_storage_days = static_cast<int>(parse_int(field("free_storage_days"), "free days"));
      if (contracts.count(c.client))
        fail(Err::DuplicateId, origin + ": contract for " + c.client + " declared twice");
      contracts[c.client] = std::move(c);
    } else if (section == "rates") {
      const std::string& client = field("client");
      auto it = contracts.find(client);
      if (it == contracts.end())
        fail(Err::DanglingReference, origin + ": rate for undeclared contract " + client);
      Rate r;
      r.unit = parse_rate_unit(field("unit"));
      r.price = parse_int(field("price_cents"), "price_cents");
      r.currency = field("currency");
      r.discount_pct = static_cast<int>(parse_int(field("discount_pct"), "discount_pct"));
      it->second.rates[field("service_code")] = r;
    } else {
      fail(Err::ParseError, origin + ": unknown section [" + section + "]");
    }
  }

  auto def = contracts.find("DEFAULT");
  if (def == contracts.end())
    fail(Err::ValidationFailed, origin + ": a DEFAULT contract is required");
  book.default_contract = def->second;
  contracts.erase(def);
  for (auto& [client, c] : contracts) {
    c.validate();
    book.contracts.push_back(std::move(c));
  }
  book.default_contract.validate();
  return book;
}

}  // namespace tos
