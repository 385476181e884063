#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "tos/ids.hpp"
#include "tos/layout.hpp"
#include "tos/types.hpp"

namespace tests {

// mt19937 is bit-exact across platforms; the distributions in <random> are
// not, so tests draw through these helpers only.
class Rng {
 public:
  explicit Rng(tos::u64 seed) : gen_(seed) {}
  int below(int n) { return static_cast<int>(gen_() % static_cast<tos::u64>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  bool chance(int pct) { return below(100) < pct; }
  char pick(const std::string& alphabet) { return alphabet[below(static_cast<int>(alphabet.size()))]; }

 private:
  std::mt19937_64 gen_;
};

inline std::string test_data_dir() {
  const char* env = std::getenv("QUAYSIDE_TEST_DATA");
  return env ? env : "tests/data";
}

// Valid container number with the proper check digit.
inline tos::ContainerId make_container_id(const std::string& owner, int serial) {
  std::string first10 = owner + "U" + tos::pad_num(serial, 6);
  int cd = tos::iso6346_check_digit(first10);
  return tos::validate_container_id(first10 + static_cast<char>('0' + cd));
}

inline tos::Container make_box(int serial, tos::i64 weight_kg = 20000,
                               const std::string& pod = "NLRTM",
                               const std::string& size_type = "22G1") {
  tos::Container c;
  c.id = make_container_id("TST", serial);
  c.size_type = size_type;
  c.gross_weight_kg = weight_kg;
  c.pol = "MAPTM";
  c.pod = pod;
  return c;
}

inline tos::SizeTypeTable test_size_table() {
  static const char* text =
      "code|length_ft|height|group|tare_kg|max_payload_kg\n"
      "22G1|20|Standard|General|2300|28180\n"
      "42G1|40|Standard|General|3750|26730\n"
      "45G1|40|HighCube|General|3940|28560\n"
      "L5G1|45|HighCube|General|4800|29200\n"
      "22R1|20|Standard|Reefer|3080|27400\n"
      "45R1|40|HighCube|Reefer|4110|29890\n"
      "22U1|20|Standard|OpenTop|2400|28080\n"
      "22T1|20|Standard|Tank|3640|26840\n"
      "22P1|20|Standard|Flat|2740|27740\n";
  return tos::SizeTypeTable::from_file(tos::DelimitedFile::from_string(text, "<test table>"));
}

// Two-zone yard plus quay and gate, everything reachable.
inline tos::YardLayout small_layout(int blocks_per_zone = 1, int bays = 4, int rows = 3,
                                    int tiers = 3) {
  tos::YardLayout l;
  l.add_node("z1", tos::NodeKind::Zone);
  l.add_node("z2", tos::NodeKind::Zone);
  l.add_node("q1", tos::NodeKind::Quay);
  l.add_node("gate", tos::NodeKind::Gate);
  l.add_edge("q1", "z1", 200);
  l.add_edge("z1", "z2", 150);
  l.add_edge("z2", "gate", 100);
  for (int z = 1; z <= 2; ++z)
    for (int b = 0; b < blocks_per_zone; ++b) {
      tos::Block blk;
      blk.id = std::string(1, static_cast<char>('A' + (z - 1) * blocks_per_zone + b));
      blk.bays = bays;
      blk.rows = rows;
      blk.max_tier = tiers;
      blk.zone = "z" + std::to_string(z);
      blk.kind = tos::BlockKind::Standard;
      l.add_block(blk);
    }
  l.validate();
  return l;
}

}  // namespace tests
