#pragma once

#include <string>
#include <string_view>

#include "tos/common.hpp"

namespace tos {

// ISO 6346 container number: 3-letter owner code, category letter (U/J/Z),
// 6-digit serial, 1 check digit. Canonical rendering is the 11-character
// string, e.g. "CSQU3054383".
struct ContainerId {
  std::string owner;  // 3 uppercase letters
  char category = 'U';
  std::string serial;  // 6 digits
  int check_digit = 0;

  std::string str() const { return owner + category + serial + static_cast<char>('0' + check_digit); }

  friend bool operator==(const ContainerId&, const ContainerId&) = default;
  friend auto operator<=>(const ContainerId&, const ContainerId&) = default;
};

// Check-digit letter values skip multiples of 11 (A=10, B=12, ..., Z=38);
// digits map to themselves. Weight of position i is 2^i over the first 10
// characters, summed mod 11 mod 10.
int iso6346_check_digit(std::string_view first10);

// Parses and validates; the three failure modes are reported distinctly.
ContainerId validate_container_id(std::string_view text);

// UN/LOCODE-shaped port code: 5 chars, uppercase alphanumeric, first two
// alphabetic. Validated for shape only, otherwise opaque.
std::string validate_port_code(std::string_view text);

}  // namespace tos
