#include "tos/ids.hpp"

#include <cctype>

namespace tos {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

int char_value(char c) {
  if (is_digit(c)) return c - '0';
  // A=10, then +1 per letter skipping 11, 22 and 33.
  int v = 10 + (c - 'A');
  if (c >= 'B') ++v;  // skip 11
  if (c >= 'L') ++v;  // skip 22
  if (c >= 'V') ++v;  // skip 33
  return v;
}

}  // namespace

int iso6346_check_digit(std::string_view first10) {
  int sum = 0;
  int weight = 1;
  for (char c : first10) {
    sum += char_value(c) * weight;
    weight *= 2;
  }
  return (sum % 11) % 10;
}

ContainerId validate_container_id(std::string_view text) {
  if (text.size() != 11)
    fail(Err::BadLength, "container id '" + std::string(text) + "' has " +
                             std::to_string(text.size()) + " characters, want 11");
  for (int i = 0; i < 4; ++i)
    if (!is_upper(text[i]))
      fail(Err::BadCharacters, "container id '" + std::string(text) + "': position " +
                                   std::to_string(i + 1) + " must be an uppercase letter");
  char cat = text[3];
  if (cat != 'U' && cat != 'J' && cat != 'Z')
    fail(Err::BadCharacters,
         "container id '" + std::string(text) + "': category must be U, J or Z");
  for (int i = 4; i < 11; ++i)
    if (!is_digit(text[i]))
      fail(Err::BadCharacters, "container id '" + std::string(text) + "': position " +
                                   std::to_string(i + 1) + " must be a digit");
  int expected = iso6346_check_digit(text.substr(0, 10));
  int actual = text[10] - '0';
  if (expected != actual)
    fail(Err::CheckDigitMismatch, "container id '" + std::string(text) + "': check digit " +
                                      std::to_string(actual) + ", computed " +
                                      std::to_string(expected));
  ContainerId id;
  id.owner = std::string(text.substr(0, 3));
  id.category = cat;
  id.serial = std::string(text.substr(4, 6));
  id.check_digit = actual;
  return id;
}

std::string validate_port_code(std::string_view text) {
  if (text.size() != 5)
    fail(Err::ValidationFailed, "port code '" + std::string(text) + "' must be 5 characters");
  for (std::size_t i = 0; i < 5; ++i) {
    char c = text[i];
    bool ok = i < 2 ? is_upper(c) : (is_upper(c) || is_digit(c));
    if (!ok)
      fail(Err::ValidationFailed, "port code '" + std::string(text) + "' is not LOCODE-shaped");
  }
  return std::string(text);
}

}  // namespace tos
