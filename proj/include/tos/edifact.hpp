#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tos/common.hpp"

namespace tos {

// UNA service characters. The release character escapes the component,
// element, release and terminator characters inside data; the decimal mark
// is never escaped.
struct ServiceChars {
  char component_sep = ':';
  char element_sep = '+';
  char decimal_mark = '.';
  char release_char = '?';
  char segment_term = '\'';

  bool is_default() const;
  void validate() const;  // five pairwise distinct

  friend bool operator==(const ServiceChars&, const ServiceChars&) = default;
};

using Composite = std::vector<std::string>;  // component strings

struct Segment {
  std::string tag;                  // 3 uppercase letters/digits
  std::vector<Composite> elements;  // data elements after the tag

  // Convenience accessors; out-of-range reads return "".
  const std::string& comp(std::size_t element, std::size_t component = 0) const;
  std::string joined(std::size_t element) const;  // components joined with ':'

  friend bool operator==(const Segment&, const Segment&) = default;
};

Segment make_segment(std::string tag, std::vector<Composite> elements);

struct EdifactDocument {
  ServiceChars service_chars;
  std::vector<Segment> segments;

  // UNH message type of the first message ("BAPLIE", ...); "" if none.
  std::string message_type() const;

  friend bool operator==(const EdifactDocument&, const EdifactDocument&) = default;
};

// Parses level-A EDIFACT text. Honors an optional leading UNA string,
// decodes release-character escapes, tolerates whitespace after segment
// terminators, and validates the envelope (UNB first, UNZ last, balanced
// UNH/UNT with matching refs and counts, UNZ counters).
EdifactDocument tokenize(std::string_view text);

// Inverse of tokenize on well-formed documents: emits UNA when the service
// characters are non-default and inserts escapes as needed. No newlines.
std::string serialize(const EdifactDocument& doc);

// Envelope check used by both tokenize and the emitters.
void validate_envelope(const EdifactDocument& doc);

// Builds the UNB..UNZ envelope around message bodies. Each body must start
// with UNH and end with UNT; counters are filled in.
EdifactDocument wrap_interchange(const ServiceChars& sc, const std::string& sender,
                                 const std::string& recipient, TimeMs when,
                                 const std::string& control_ref,
                                 std::vector<std::vector<Segment>> message_bodies);

// UNH/UNT pair around body segments with correct segment count.
std::vector<Segment> wrap_message(const std::string& message_ref, const std::string& type,
                                  std::vector<Segment> body);

}  // namespace tos
