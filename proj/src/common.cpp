#include "tos/common.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tos {

const char* err_name(Err e) {
  switch (e) {
    case Err::BadLength: return "BadLength";
    case Err::BadCharacters: return "BadCharacters";
    case Err::CheckDigitMismatch: return "CheckDigitMismatch";
    case Err::UnknownCode: return "UnknownCode";
    case Err::DuplicateId: return "DuplicateId";
    case Err::DanglingReference: return "DanglingReference";
    case Err::ValidationFailed: return "ValidationFailed";
    case Err::UnknownNode: return "UnknownNode";
    case Err::EmptyInput: return "EmptyInput";
    case Err::UnterminatedSegment: return "UnterminatedSegment";
    case Err::DanglingRelease: return "DanglingRelease";
    case Err::EnvelopeMismatch: return "EnvelopeMismatch";
    case Err::NotBaplie: return "NotBaplie";
    case Err::NotMovins: return "NotMovins";
    case Err::MalformedCell: return "MalformedCell";
    case Err::MalformedInstruction: return "MalformedInstruction";
    case Err::InvalidContainerId: return "InvalidContainerId";
    case Err::EmptyMoveList: return "EmptyMoveList";
    case Err::NoFeasibleWindow: return "NoFeasibleWindow";
    case Err::DraftExceedsDepth: return "DraftExceedsDepth";
    case Err::VesselTooLong: return "VesselTooLong";
    case Err::UnknownVisit: return "UnknownVisit";
    case Err::NoFeasibleSlot: return "NoFeasibleSlot";
    case Err::ImoProhibited: return "ImoProhibited";
    case Err::NotAPermutation: return "NotAPermutation";
    case Err::SlotOccupied: return "SlotOccupied";
    case Err::WouldFloat: return "WouldFloat";
    case Err::UnknownContainer: return "UnknownContainer";
    case Err::NoFeasibleCell: return "NoFeasibleCell";
    case Err::StackWeightExceeded: return "StackWeightExceeded";
    case Err::EmptyQueue: return "EmptyQueue";
    case Err::NotRunning: return "NotRunning";
    case Err::UnknownOrder: return "UnknownOrder";
    case Err::TerminalStatus: return "TerminalStatus";
    case Err::MissingContainer: return "MissingContainer";
    case Err::HoldActive: return "HoldActive";
    case Err::OrderNotValidated: return "OrderNotValidated";
    case Err::CustomsUnpaid: return "CustomsUnpaid";
    case Err::OutOfOrderTransition: return "OutOfOrderTransition";
    case Err::WrongState: return "WrongState";
    case Err::AuthorityMismatch: return "AuthorityMismatch";
    case Err::NoSuchHold: return "NoSuchHold";
    case Err::NotConnected: return "NotConnected";
    case Err::NotReefer: return "NotReefer";
    case Err::NonMonotonicTime: return "NonMonotonicTime";
    case Err::UnknownServiceCode: return "UnknownServiceCode";
    case Err::EmptyLines: return "EmptyLines";
    case Err::SequenceCorruption: return "SequenceCorruption";
    case Err::UnknownTarget: return "UnknownTarget";
    case Err::EmptyPeriod: return "EmptyPeriod";
    case Err::FutureTimestamp: return "FutureTimestamp";
    case Err::ParseError: return "ParseError";
    case Err::UnsortedEvents: return "UnsortedEvents";
    case Err::MissingReferencedFile: return "MissingReferencedFile";
    case Err::VersionMismatch: return "VersionMismatch";
    case Err::CorruptSnapshot: return "CorruptSnapshot";
    case Err::UnknownUser: return "UnknownUser";
    case Err::PermissionDenied: return "PermissionDenied";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string pad_num(i64 value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*lld", width, static_cast<long long>(value));
  return buf;
}

i64 parse_int(std::string_view s, std::string_view what) {
  i64 value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(Err::ParseError, "bad integer '" + std::string(s) + "' for " + std::string(what));
  return value;
}

double parse_double(std::string_view s, std::string_view what) {
  // std::from_chars<double> is available on this toolchain but strtod keeps
  // the dependency surface minimal; inputs are already trimmed.
  std::string tmp(s);
  char* end = nullptr;
  double value = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    fail(Err::ParseError, "bad number '" + tmp + "' for " + std::string(what));
  return value;
}

// ---- time ------------------------------------------------------------------

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
i64 days_from_civil(i64 y, unsigned m, unsigned d) {
  y -= m <= 2;
  const i64 era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<i64>(doe) - 719468;
}

void civil_from_days(i64 z, i64& y, unsigned& m, unsigned& d) {
  z += 719468;
  const i64 era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<i64>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

}  // namespace

TimeMs parse_iso8601(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z')
    fail(Err::ParseError, "bad timestamp '" + std::string(s) + "' (want YYYY-MM-DDTHH:MM:SSZ)");
  auto num = [&](std::size_t pos, std::size_t len) {
    i64 v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9')
        fail(Err::ParseError, "bad timestamp '" + std::string(s) + "'");
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  i64 y = num(0, 4);
  unsigned mo = static_cast<unsigned>(num(5, 2)), dy = static_cast<unsigned>(num(8, 2));
  i64 h = num(11, 2), mi = num(14, 2), se = num(17, 2);
  if (mo < 1 || mo > 12 || dy < 1 || dy > 31 || h > 23 || mi > 59 || se > 60)
    fail(Err::ParseError, "timestamp out of range '" + std::string(s) + "'");
  i64 days = days_from_civil(y, mo, dy);
  return ((days * 86400) + h * 3600 + mi * 60 + se) * kMsPerSecond;
}

std::string format_iso8601(TimeMs t) {
  i64 secs = t / kMsPerSecond;
  i64 days = secs / 86400;
  i64 rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  i64 y;
  unsigned mo, dy;
  civil_from_days(days, y, mo, dy);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), mo, dy, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
  return buf;
}

u64 fnv1a64(std::string_view data, u64 seed) {
  u64 h = seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(u64 v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---- delimited files -------------------------------------------------------

DelimitedFile DelimitedFile::read_file(const std::string& path) {
  return from_string(read_text_file(path), path);
}

DelimitedFile DelimitedFile::from_string(std::string_view text, const std::string& origin) {
  DelimitedFile f;
  f.origin_ = origin;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '|');
    if (f.header_.empty()) {
      f.header_ = std::move(fields);
    } else {
      if (fields.size() != f.header_.size())
        fail(Err::ParseError, origin + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(f.header_.size()) + " fields, got " +
                                  std::to_string(fields.size()));
      f.rows_.push_back(std::move(fields));
    }
  }
  if (f.header_.empty()) fail(Err::ParseError, origin + ": missing header row");
  return f;
}

std::size_t DelimitedFile::col(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  fail(Err::ParseError, origin_ + ": missing column '" + std::string(name) + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Err::IoError, "short write to " + path);
}

}  // namespace tos
