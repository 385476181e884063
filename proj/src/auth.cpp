#include "tos/auth.hpp"

namespace tos {

const std::map<std::string, Permission>& command_permissions() {
  static const std::map<std::string, Permission> table = {
      {"run", {PermDomain::Planning, PermAction::Create}},
      {"validate-edi", {PermDomain::Reporting, PermAction::Consult}},
      {"report", {PermDomain::Reporting, PermAction::Consult}},
      {"archive", {PermDomain::Admin, PermAction::Edit}},
      {"snapshot", {PermDomain::Planning, PermAction::Create}},
      {"order.create", {PermDomain::Gate, PermAction::Create}},
      {"order.amend", {PermDomain::Gate, PermAction::Edit}},
      {"order.cancel", {PermDomain::Gate, PermAction::Edit}},
      {"gate.advance", {PermDomain::Gate, PermAction::Edit}},
      {"gate.physical-check", {PermDomain::Gate, PermAction::Edit}},
      {"hold.apply", {PermDomain::Gate, PermAction::Edit}},
      {"hold.release", {PermDomain::Gate, PermAction::Edit}},
      {"yard.override", {PermDomain::Planning, PermAction::Edit}},
      {"berth.allocate", {PermDomain::Planning, PermAction::Edit}},
      {"billing.invoice", {PermDomain::Billing, PermAction::Create}},
      {"billing.export", {PermDomain::Billing, PermAction::Consult}},
      {"billing.lock", {PermDomain::Billing, PermAction::Edit}},
      {"reefer.record", {PermDomain::Gate, PermAction::Edit}},
  };
  return table;
}

bool role_grants(Role role, const Permission& p) {
  if (role == Role::Admin) return true;
  if (p.domain == PermDomain::Reporting && p.action == PermAction::Consult) return true;
  switch (role) {
    case Role::Planner: return p.domain == PermDomain::Planning;
    case Role::GateClerk: return p.domain == PermDomain::Gate;
    case Role::BillingClerk: return p.domain == PermDomain::Billing;
    case Role::Admin: return true;
  }
  return false;
}

u64 AuditLog::record_hash(const AuditRecord& r) {
  std::string blob = format_iso8601(r.time) + "|" + r.user + "|" + r.command + "|" + r.outcome +
                     "|" + hex64(r.prev_hash);
  return fnv1a64(blob);
}

void AuditLog::append(TimeMs time, const std::string& user, const std::string& command,
                      const std::string& outcome) {
  AuditRecord r;
  r.time = time;
  r.user = user;
  r.command = command;
  r.outcome = outcome;
  r.prev_hash = records_.empty() ? 0 : records_.back().hash;
  r.hash = record_hash(r);
  records_.push_back(std::move(r));
}

bool AuditLog::verify() const {
  u64 prev = 0;
  for (const auto& r : records_) {
    if (r.prev_hash != prev) return false;
    if (record_hash(r) != r.hash) return false;
    prev = r.hash;
  }
  return true;
}

std::string AuditLog::to_text() const {
  std::string out = "time|user|command|outcome|prev_hash|hash\n";
  for (const auto& r : records_) {
    out += format_iso8601(r.time) + "|" + r.user + "|" + r.command + "|" + r.outcome + "|" +
           hex64(r.prev_hash) + "|" + hex64(r.hash) + "\n";
  }
  return out;
}

AuthOutcome authorize(const std::string& user, const std::string& command,
                      const MasterStore& master, AuditLog& audit, TimeMs at) {
  const UserAccount* account = master.find_user(user);
  if (!account) fail(Err::UnknownUser, user);
  auto it = command_permissions().find(command);
  if (it == command_permissions().end())
    fail(Err::ValidationFailed, "command '" + command + "' has no permission mapping");
  bool ok = role_grants(account->role, it->second);
  audit.append(at, user, command, ok ? "Allow" : "Deny");
  return ok ? AuthOutcome::Allow : AuthOutcome::Deny;
}

}  // namespace tos
