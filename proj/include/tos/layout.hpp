#pragma once

#include <map>
#include <string>
#include <vector>

#include "tos/common.hpp"

namespace tos {

// Slot address inside a block: 1-based bay/row/tier.
struct YardPosition {
  std::string block;
  int bay = 0;
  int row = 0;
  int tier = 0;

  std::string str() const;

  friend bool operator==(const YardPosition&, const YardPosition&) = default;
  friend auto operator<=>(const YardPosition&, const YardPosition&) = default;
};

YardPosition parse_yard_position(std::string_view s);  // "BLOCK.bay.row.tier"

enum class BlockKind { Standard, Reefer, Imo, Interchange };

const char* block_kind_name(BlockKind k);
BlockKind parse_block_kind(std::string_view s);

struct Block {
  std::string id;
  int bays = 0;
  int rows = 0;
  int max_tier = 0;
  std::string zone;
  BlockKind kind = BlockKind::Standard;

  int slot_count() const { return bays * rows * max_tier; }
};

enum class NodeKind { Zone, Quay, Gate };

// Terminal geometry: blocks grouped into zones, plus the travel graph over
// zones, quay nodes and the gate. Edge weights are meters.
class YardLayout {
 public:
  void add_block(const Block& b);
  void add_node(const std::string& id, NodeKind kind);
  void add_edge(const std::string& a, const std::string& b, double meters);

  // Validates: every block's zone is a declared node, graph connected,
  // weights positive. Call once after construction.
  void validate() const;

  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  NodeKind node_kind(const std::string& id) const;
  const Block& block(const std::string& id) const;
  bool has_block(const std::string& id) const { return blocks_.count(id) > 0; }
  const std::map<std::string, Block>& blocks() const { return blocks_; }
  const std::map<std::string, NodeKind>& nodes() const { return nodes_; }
  std::vector<std::string> blocks_in_zone(const std::string& zone) const;
  std::vector<std::string> zones() const;
  // Zone of a block; block positions inherit their block's zone node.
  const std::string& zone_of_block(const std::string& block_id) const;

  bool contains(const YardPosition& p) const;
  void require_position(const YardPosition& p) const;

  // Shortest-path distance over the travel graph, meters.
  double distance(const std::string& a, const std::string& b) const;

  int total_slots() const;

 private:
  std::map<std::string, Block> blocks_;
  std::map<std::string, NodeKind> nodes_;
  std::map<std::string, std::vector<std::pair<std::string, double>>> adj_;
};

// Quay geometry lives in the layout file next to the yard it serves.
struct DepthSegment {
  double from_m = 0;
  double to_m = 0;
  double depth_m = 0;
};

struct Quay {
  double length_m = 0;
  std::vector<DepthSegment> depth_profile;  // must tile [0, length)
  std::vector<std::string> crane_pool;      // QuayCrane equipment ids
  double crane_min_spacing_m = 0;

  void validate() const;
  // Max depth available over the position interval [from, to).
  double min_depth_over(double from_m, double to_m) const;
  double max_depth() const;
};

// Free-form terminal settings from the [terminal] section.
class TerminalConfig {
 public:
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  i64 get_int(const std::string& key, i64 dflt) const;
  double get_double(const std::string& key, double dflt) const;
  const std::map<std::string, std::string>& all() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct TerminalFile {
  YardLayout layout;
  Quay quay;
  TerminalConfig config;
};

// Parses the sectioned `|`-delimited terminal definition file
// ([terminal] [blocks] [nodes] [edges] [quay] [depth] [quay_cranes]).
TerminalFile load_terminal_file(const std::string& path);
TerminalFile parse_terminal_file(std::string_view text, const std::string& origin);

double yard_distance(const YardLayout& layout, const std::string& a, const std::string& b);

}  // namespace tos
