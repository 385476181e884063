#include "tos/edifact.hpp"

#include <array>
#include <cctype>

namespace tos {

namespace {

const std::string kEmpty;

bool is_tag_char(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

bool valid_tag(const std::string& tag) {
  if (tag.size() != 3) return false;
  for (char c : tag)
    if (!is_tag_char(c)) return false;
  return true;
}

}  // namespace

bool ServiceChars::is_default() const { return *this == ServiceChars{}; }

void ServiceChars::validate() const {
  std::array<char, 5> cs{component_sep, element_sep, decimal_mark, release_char, segment_term};
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j)
      if (cs[i] == cs[j])
        fail(Err::ValidationFailed, "service characters must be pairwise distinct");
}

const std::string& Segment::comp(std::size_t element, std::size_t component) const {
  if (element >= elements.size()) return kEmpty;
  const Composite& c = elements[element];
  if (component >= c.size()) return kEmpty;
  return c[component];
}

std::string Segment::joined(std::size_t element) const {
  if (element >= elements.size()) return "";
  std::string out;
  const Composite& c = elements[element];
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out.push_back(':');
    out += c[i];
  }
  return out;
}

Segment make_segment(std::string tag, std::vector<Composite> elements) {
  Segment s;
  s.tag = std::move(tag);
  s.elements = std::move(elements);
  return s;
}

std::string EdifactDocument::message_type() const {
  for (const auto& seg : segments)
    if (seg.tag == "UNH") return seg.comp(1, 0);
  return "";
}

// ---- tokenize ---------------------------------------------------------------

EdifactDocument tokenize(std::string_view text) {
  if (text.empty()) fail(Err::EmptyInput, "empty EDIFACT input");

  EdifactDocument doc;
  std::size_t pos = 0;

  if (text.size() >= 9 && text.substr(0, 3) == "UNA") {
    doc.service_chars.component_sep = text[3];
    doc.service_chars.element_sep = text[4];
    doc.service_chars.decimal_mark = text[5];
    doc.service_chars.release_char = text[6];
    // text[7] is the reserved character (conventionally a space)
    doc.service_chars.segment_term = text[8];
    doc.service_chars.validate();
    pos = 9;
  } else if (text.substr(0, 3) == "UNA") {
    fail(Err::ParseError, "truncated UNA header");
  }

  const ServiceChars& sc = doc.service_chars;

  Segment seg;
  Composite composite;
  std::string component;
  bool in_segment = false;
  bool first_element = true;

  auto end_component = [&] {
    composite.push_back(std::move(component));
    component.clear();
  };
  auto end_element = [&] {
    end_component();
    if (first_element) {
      // the first element is the segment tag; it must be simple
      if (composite.size() != 1 || !valid_tag(composite[0]))
        fail(Err::ParseError, "bad segment tag '" + (composite.empty() ? "" : composite[0]) + "'");
      seg.tag = composite[0];
      first_element = false;
    } else {
      seg.elements.push_back(std::move(composite));
    }
    composite.clear();
  };

  while (pos < text.size()) {
    char c = text[pos];
    if (!in_segment && std::isspace(static_cast<unsigned char>(c))) {
      ++pos;  // whitespace between segments (after a terminator) is tolerated
      continue;
    }
    in_segment = true;
    if (c == sc.release_char) {
      if (pos + 1 >= text.size())
        fail(Err::DanglingRelease, "release character at end of input");
      component.push_back(text[pos + 1]);
      pos += 2;
      continue;
    }
    if (c == sc.component_sep) {
      if (first_element) fail(Err::ParseError, "segment tag cannot be composite");
      end_component();
    } else if (c == sc.element_sep) {
      end_element();
    } else if (c == sc.segment_term) {
      end_element();
      doc.segments.push_back(std::move(seg));
      seg = Segment{};
      in_segment = false;
      first_element = true;
    } else {
      component.push_back(c);
    }
    ++pos;
  }
  if (in_segment)
    fail(Err::UnterminatedSegment, "input ends inside a segment (missing terminator)");
  if (doc.segments.empty()) fail(Err::EmptyInput, "no segments");

  validate_envelope(doc);
  return doc;
}

// ---- serialize ---------------------------------------------------------------

namespace {

void escape_into(std::string& out, const std::string& data, const ServiceChars& sc) {
  for (char c : data) {
    if (c == sc.component_sep || c == sc.element_sep || c == sc.release_char ||
        c == sc.segment_term)
      out.push_back(sc.release_char);
    out.push_back(c);
  }
}

}  // namespace

std::string serialize(const EdifactDocument& doc) {
  const ServiceChars& sc = doc.service_chars;
  sc.validate();
  std::string out;
  if (!sc.is_default()) {
    out += "UNA";
    out.push_back(sc.component_sep);
    out.push_back(sc.element_sep);
    out.push_back(sc.decimal_mark);
    out.push_back(sc.release_char);
    out.push_back(' ');
    out.push_back(sc.segment_term);
  }
  for (const auto& seg : doc.segments) {
    out += seg.tag;
    for (const auto& element : seg.elements) {
      out.push_back(sc.element_sep);
      for (std::size_t i = 0; i < element.size(); ++i) {
        if (i) out.push_back(sc.component_sep);
        escape_into(out, element[i], sc);
      }
    }
    out.push_back(sc.segment_term);
  }
  return out;
}

// ---- envelope ---------------------------------------------------------------

void validate_envelope(const EdifactDocument& doc) {
  const auto& segs = doc.segments;
  if (segs.empty()) fail(Err::EnvelopeMismatch, "no segments");
  if (segs.front().tag != "UNB") fail(Err::EnvelopeMismatch, "first segment must be UNB");
  if (segs.back().tag != "UNZ") fail(Err::EnvelopeMismatch, "last segment must be UNZ");

  int messages = 0;
  bool in_message = false;
  std::string ref;
  int count = 0;
  for (std::size_t i = 1; i + 1 < segs.size(); ++i) {
    const Segment& s = segs[i];
    if (s.tag == "UNB" || s.tag == "UNZ")
      fail(Err::EnvelopeMismatch, s.tag + " inside interchange body");
    if (s.tag == "UNH") {
      if (in_message) fail(Err::EnvelopeMismatch, "nested UNH");
      in_message = true;
      ref = s.comp(0, 0);
      count = 1;
      continue;
    }
    if (s.tag == "UNT") {
      if (!in_message) fail(Err::EnvelopeMismatch, "UNT without UNH");
      ++count;
      if (s.comp(0, 0) != std::to_string(count))
        fail(Err::EnvelopeMismatch, "UNT segment count " + s.comp(0, 0) + ", counted " +
                                        std::to_string(count));
      if (s.comp(1, 0) != ref)
        fail(Err::EnvelopeMismatch, "UNT ref " + s.comp(1, 0) + " != UNH ref " + ref);
      in_message = false;
      ++messages;
      continue;
    }
    if (in_message) ++count;
    // segments outside UNH/UNT (e.g. UNG groups) are out of the bounded
    // subset; reject them so counters stay meaningful
    if (!in_message)
      fail(Err::EnvelopeMismatch, "segment " + s.tag + " outside any message");
  }
  if (in_message) fail(Err::EnvelopeMismatch, "unterminated message (missing UNT)");

  const Segment& unb = segs.front();
  const Segment& unz = segs.back();
  if (unz.comp(0, 0) != std::to_string(messages))
    fail(Err::EnvelopeMismatch,
         "UNZ message count " + unz.comp(0, 0) + ", counted " + std::to_string(messages));
  if (unz.comp(1, 0) != unb.comp(4, 0))
    fail(Err::EnvelopeMismatch,
         "UNZ control ref " + unz.comp(1, 0) + " != UNB ref " + unb.comp(4, 0));
}

// ---- builders ---------------------------------------------------------------

std::vector<Segment> wrap_message(const std::string& message_ref, const std::string& type,
                                  std::vector<Segment> body) {
  std::vector<Segment> out;
  out.push_back(make_segment("UNH", {{message_ref}, {type, "D", "95B", "UN"}}));
  for (auto& s : body) out.push_back(std::move(s));
  out.push_back(make_segment("UNT", {{std::to_string(out.size() + 1)}, {message_ref}}));
  return out;
}

EdifactDocument wrap_interchange(const ServiceChars& sc, const std::string& sender,
                                 const std::string& recipient, TimeMs when,
                                 const std::string& control_ref,
                                 std::vector<std::vector<Segment>> message_bodies) {
  EdifactDocument doc;
  doc.service_chars = sc;
  // UNB+UNOA:2+sender+recipient+YYMMDD:HHMM+ref'
  std::string iso = format_iso8601(when);  // YYYY-MM-DDTHH:MM:SSZ
  std::string date = iso.substr(2, 2) + iso.substr(5, 2) + iso.substr(8, 2);
  std::string time = iso.substr(11, 2) + iso.substr(14, 2);
  doc.segments.push_back(
      make_segment("UNB", {{"UNOA", "2"}, {sender}, {recipient}, {date, time}, {control_ref}}));
  int messages = 0;
  for (auto& body : message_bodies) {
    for (auto& s : body) doc.segments.push_back(std::move(s));
    ++messages;
  }
  doc.segments.push_back(make_segment("UNZ", {{std::to_string(messages)}, {control_ref}}));
  validate_envelope(doc);
  return doc;
}

}  // namespace tos
