#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tos {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// Milliseconds since the Unix epoch, UTC. All engine timestamps use this.
using TimeMs = i64;

constexpr TimeMs kMsPerSecond = 1000;
constexpr TimeMs kMsPerHour = 3600 * kMsPerSecond;
constexpr TimeMs kMsPerDay = 24 * kMsPerHour;

enum class Err {
  // container ids / size types
  BadLength,
  BadCharacters,
  CheckDigitMismatch,
  UnknownCode,
  // master data
  DuplicateId,
  DanglingReference,
  ValidationFailed,
  UnknownNode,
  // edifact
  EmptyInput,
  UnterminatedSegment,
  DanglingRelease,
  EnvelopeMismatch,
  NotBaplie,
  NotMovins,
  MalformedCell,
  MalformedInstruction,
  InvalidContainerId,
  EmptyMoveList,
  // berth
  NoFeasibleWindow,
  DraftExceedsDepth,
  VesselTooLong,
  UnknownVisit,
  // yard
  NoFeasibleSlot,
  ImoProhibited,
  NotAPermutation,
  SlotOccupied,
  WouldFloat,
  UnknownContainer,
  // vessel
  NoFeasibleCell,
  StackWeightExceeded,
  // dispatch
  EmptyQueue,
  NotRunning,
  // orders / gate
  UnknownOrder,
  TerminalStatus,
  MissingContainer,
  HoldActive,
  OrderNotValidated,
  CustomsUnpaid,
  OutOfOrderTransition,
  WrongState,
  AuthorityMismatch,
  NoSuchHold,
  NotConnected,
  NotReefer,
  NonMonotonicTime,
  // billing
  UnknownServiceCode,
  EmptyLines,
  SequenceCorruption,
  UnknownTarget,
  // reporting / archive
  EmptyPeriod,
  FutureTimestamp,
  // scenario / engine
  ParseError,
  UnsortedEvents,
  MissingReferencedFile,
  VersionMismatch,
  CorruptSnapshot,
  UnknownUser,
  PermissionDenied,
  IoError,
};

const char* err_name(Err e);

// Single exception type for all domain errors; the code distinguishes them.
class TosError : public std::runtime_error {
 public:
  TosError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw TosError(code, what); }

// ---- text helpers ----------------------------------------------------------

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, char sep);
std::string trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::string to_upper(std::string_view s);

// Fixed-width decimal rendering, e.g. pad_num(7, 3) == "007".
std::string pad_num(i64 value, int width);

// Locale-free integer/double parsing; throws ParseError with context on failure.
i64 parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

// ---- time ------------------------------------------------------------------

// Parses "YYYY-MM-DDTHH:MM:SSZ" (UTC, seconds resolution).
TimeMs parse_iso8601(std::string_view s);
std::string format_iso8601(TimeMs t);

// ---- hashing ---------------------------------------------------------------

// FNV-1a 64-bit; used for audit chaining and snapshot checksums.
u64 fnv1a64(std::string_view data, u64 seed = 1469598103934665603ULL);
std::string hex64(u64 v);

// ---- delimited text files --------------------------------------------------

// Reader for the `|`-separated config/master files: optional '#' comment
// lines, a header row naming the columns, one record per line.
class DelimitedFile {
 public:
  static DelimitedFile read_file(const std::string& path);
  static DelimitedFile from_string(std::string_view text, const std::string& origin);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  // Column index by header name; throws ParseError if absent.
  std::size_t col(std::string_view name) const;
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace tos
