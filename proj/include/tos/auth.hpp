#pragma once

#include <map>
#include <string>
#include <vector>

#include "tos/master.hpp"

namespace tos {

enum class PermDomain { Planning, Gate, Billing, Reporting, Admin };
enum class PermAction { Create, Edit, Consult };

struct Permission {
  PermDomain domain = PermDomain::Reporting;
  PermAction action = PermAction::Consult;
};

// Every CLI/engine command maps to exactly one permission; unknown commands
// are rejected outright.
const std::map<std::string, Permission>& command_permissions();

// Role capability matrix. Admin holds everything; the clerk roles hold their
// own domain plus read-only reporting.
bool role_grants(Role role, const Permission& p);

enum class AuthOutcome { Allow, Deny };

// Hash-chained, append-only command log. Each record carries the hash of its
// predecessor so tampering breaks verification from genesis.
struct AuditRecord {
  TimeMs time = 0;
  std::string user;
  std::string command;
  std::string outcome;
  u64 prev_hash = 0;
  u64 hash = 0;
};

class AuditLog {
 public:
  void append(TimeMs time, const std::string& user, const std::string& command,
              const std::string& outcome);
  bool verify() const;  // re-hash from genesis
  const std::vector<AuditRecord>& records() const { return records_; }
  std::string to_text() const;
  void restore(std::vector<AuditRecord> records) { records_ = std::move(records); }

  static u64 record_hash(const AuditRecord& r);

 private:
  std::vector<AuditRecord> records_;
};

// Deny decisions are always audited; Allow is audited too so the log shows
// the full command stream.
AuthOutcome authorize(const std::string& user, const std::string& command,
                      const MasterStore& master, AuditLog& audit, TimeMs at);

}  // namespace tos
