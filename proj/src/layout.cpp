#include "tos/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace tos {

std::string YardPosition::str() const {
  return block + "." + std::to_string(bay) + "." + std::to_string(row) + "." +
         std::to_string(tier);
}

YardPosition parse_yard_position(std::string_view s) {
  auto parts = split(s, '.');
  if (parts.size() != 4) fail(Err::ParseError, "bad yard position '" + std::string(s) + "'");
  YardPosition p;
  p.block = parts[0];
  p.bay = static_cast<int>(parse_int(parts[1], "bay"));
  p.row = static_cast<int>(parse_int(parts[2], "row"));
  p.tier = static_cast<int>(parse_int(parts[3], "tier"));
  return p;
}

const char* block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Standard: return "Standard";
    case BlockKind::Reefer: return "Reefer";
    case BlockKind::Imo: return "Imo";
    case BlockKind::Interchange: return "Interchange";
  }
  return "?";
}

BlockKind parse_block_kind(std::string_view s) {
  if (s == "Standard") return BlockKind::Standard;
  if (s == "Reefer") return BlockKind::Reefer;
  if (s == "Imo") return BlockKind::Imo;
  if (s == "Interchange") return BlockKind::Interchange;
  fail(Err::ParseError, "unknown block kind '" + std::string(s) + "'");
}

void YardLayout::add_block(const Block& b) {
  if (b.bays < 1 || b.rows < 1 || b.max_tier < 1)
    fail(Err::ValidationFailed, "block " + b.id + ": dimensions must be >= 1");
  if (blocks_.count(b.id)) fail(Err::DuplicateId, "block " + b.id + " already declared");
  blocks_[b.id] = b;
}

void YardLayout::add_node(const std::string& id, NodeKind kind) {
  if (nodes_.count(id)) fail(Err::DuplicateId, "node " + id + " already declared");
  nodes_[id] = kind;
  adj_[id];
}

void YardLayout::add_edge(const std::string& a, const std::string& b, double meters) {
  if (!nodes_.count(a)) fail(Err::UnknownNode, "edge endpoint " + a);
  if (!nodes_.count(b)) fail(Err::UnknownNode, "edge endpoint " + b);
  if (meters <= 0) fail(Err::ValidationFailed, "edge " + a + "-" + b + ": weight must be > 0");
  adj_[a].emplace_back(b, meters);
  adj_[b].emplace_back(a, meters);
}

void YardLayout::validate() const {
  for (const auto& [id, b] : blocks_) {
    auto it = nodes_.find(b.zone);
    if (it == nodes_.end())
      fail(Err::DanglingReference, "block " + id + " references undeclared zone " + b.zone);
    if (it->second != NodeKind::Zone)
      fail(Err::ValidationFailed, "block " + id + " zone " + b.zone + " is not a zone node");
  }
  if (nodes_.empty()) fail(Err::ValidationFailed, "layout has no nodes");
  // connectivity
  std::set<std::string> seen;
  std::vector<std::string> stack{nodes_.begin()->first};
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& [m, w] : adj_.at(n))
      if (!seen.count(m)) stack.push_back(m);
  }
  if (seen.size() != nodes_.size())
    fail(Err::ValidationFailed, "travel graph is not connected (" + std::to_string(seen.size()) +
                                    " of " + std::to_string(nodes_.size()) + " nodes reachable)");
}

NodeKind YardLayout::node_kind(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) fail(Err::UnknownNode, id);
  return it->second;
}

const Block& YardLayout::block(const std::string& id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) fail(Err::UnknownNode, "block " + id);
  return it->second;
}

std::vector<std::string> YardLayout::blocks_in_zone(const std::string& zone) const {
  std::vector<std::string> out;
  for (const auto& [id, b] : blocks_)
    if (b.zone == zone) out.push_back(id);
  return out;
}

std::vector<std::string> YardLayout::zones() const {
  std::vector<std::string> out;
  for (const auto& [id, kind] : nodes_)
    if (kind == NodeKind::Zone) out.push_back(id);
  return out;
}

const std::string& YardLayout::zone_of_block(const std::string& block_id) const {
  return block(block_id).zone;
}

bool YardLayout::contains(const YardPosition& p) const {
  auto it = blocks_.find(p.block);
  if (it == blocks_.end()) return false;
  const Block& b = it->second;
  return p.bay >= 1 && p.bay <= b.bays && p.row >= 1 && p.row <= b.rows && p.tier >= 1 &&
         p.tier <= b.max_tier;
}

void YardLayout::require_position(const YardPosition& p) const {
  if (!contains(p)) fail(Err::UnknownNode, "yard position " + p.str() + " outside layout");
}

double YardLayout::distance(const std::string& a, const std::string& b) const {
  if (!nodes_.count(a)) fail(Err::UnknownNode, a);
  if (!nodes_.count(b)) fail(Err::UnknownNode, b);
  if (a == b) return 0.0;
  // Dijkstra; graphs here are tiny (tens of nodes).
  std::map<std::string, double> dist;
  using Item = std::pair<double, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[a] = 0.0;
  pq.emplace(0.0, a);
  while (!pq.empty()) {
    auto [d, n] = pq.top();
    pq.pop();
    if (d > dist[n]) continue;
    if (n == b) return d;
    for (const auto& [m, w] : adj_.at(n)) {
      double nd = d + w;
      auto it = dist.find(m);
      if (it == dist.end() || nd < it->second) {
        dist[m] = nd;
        pq.emplace(nd, m);
      }
    }
  }
  fail(Err::UnknownNode, "no path between " + a + " and " + b);
}

int YardLayout::total_slots() const {
  int total = 0;
  for (const auto& [id, b] : blocks_) total += b.slot_count();
  return total;
}

double yard_distance(const YardLayout& layout, const std::string& a, const std::string& b) {
  return layout.distance(a, b);
}

// ---- quay ------------------------------------------------------------------

void Quay::validate() const {
  if (length_m <= 0) fail(Err::ValidationFailed, "quay length must be > 0");
  // depth segments must tile [0, length) without gaps or overlap
  double cursor = 0;
  for (const auto& seg : depth_profile) {
    if (std::abs(seg.from_m - cursor) > 1e-9)
      fail(Err::ValidationFailed, "depth profile gap/overlap at " + std::to_string(seg.from_m));
    if (seg.to_m <= seg.from_m || seg.depth_m <= 0)
      fail(Err::ValidationFailed, "bad depth segment");
    cursor = seg.to_m;
  }
  if (std::abs(cursor - length_m) > 1e-9)
    fail(Err::ValidationFailed, "depth profile does not cover the quay");
  if (!crane_pool.empty() && crane_min_spacing_m <= 0)
    fail(Err::ValidationFailed, "crane min spacing must be > 0");
}

double Quay::min_depth_over(double from_m, double to_m) const {
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& seg : depth_profile)
    if (seg.to_m > from_m && seg.from_m < to_m) depth = std::min(depth, seg.depth_m);
  return depth;
}

double Quay::max_depth() const {
  double depth = 0;
  for (const auto& seg : depth_profile) depth = std::max(depth, seg.depth_m);
  return depth;
}

// ---- terminal config -------------------------------------------------------

const std::string& TerminalConfig::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) fail(Err::ParseError, "missing terminal setting '" + key + "'");
  return it->second;
}

std::string TerminalConfig::get_or(const std::string& key, const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

i64 TerminalConfig::get_int(const std::string& key, i64 dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : parse_int(it->second, key);
}

double TerminalConfig::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : parse_double(it->second, key);
}

// ---- terminal file ---------------------------------------------------------

TerminalFile load_terminal_file(const std::string& path) {
  return parse_terminal_file(read_text_file(path), path);
}

TerminalFile parse_terminal_file(std::string_view text, const std::string& origin) {
  TerminalFile tf;
  std::string section;
  std::vector<std::string> header;
  std::size_t line_no = 0;

  auto ctx = [&] { return origin + ":" + std::to_string(line_no) + ": "; };

  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      header.clear();
      continue;
    }
    auto fields = split(line, '|');
    if (header.empty()) {
      header = fields;
      continue;
    }
    if (fields.size() != header.size())
      fail(Err::ParseError, ctx() + "expected " + std::to_string(header.size()) + " fields");
    auto field = [&](std::string_view name) -> const std::string& {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return fields[i];
      fail(Err::ParseError, ctx() + "missing column '" + std::string(name) + "'");
    };
    if (section == "terminal") {
      tf.config.set(field("key"), field("value"));
    } else if (section == "blocks") {
      Block b;
      b.id = field("id");
      b.bays = static_cast<int>(parse_int(field("bays"), "bays"));
      b.rows = static_cast<int>(parse_int(field("rows"), "rows"));
      b.max_tier = static_cast<int>(parse_int(field("max_tier"), "max_tier"));
      b.zone = field("zone");
      b.kind = parse_block_kind(field("kind"));
      tf.layout.add_block(b);
    } else if (section == "nodes") {
      const std::string& kind = field("kind");
      NodeKind nk = kind == "zone"   ? NodeKind::Zone
                    : kind == "quay" ? NodeKind::Quay
                    : kind == "gate" ? NodeKind::Gate
                                     : throw TosError(Err::ParseError, ctx() + "bad node kind");
      tf.layout.add_node(field("id"), nk);
    } else if (section == "edges") {
      tf.layout.add_edge(field("a"), field("b"), parse_double(field("meters"), "meters"));
    } else if (section == "quay") {
      tf.quay.length_m = parse_double(field("length_m"), "length_m");
      tf.quay.crane_min_spacing_m = parse_double(field("min_spacing_m"), "min_spacing_m");
    } else if (section == "depth") {
      DepthSegment seg;
      seg.from_m = parse_double(field("from_m"), "from_m");
      seg.to_m = parse_double(field("to_m"), "to_m");
      seg.depth_m = parse_double(field("depth_m"), "depth_m");
      tf.quay.depth_profile.push_back(seg);
    } else if (section == "quay_cranes") {
      tf.quay.crane_pool.push_back(field("id"));
    } else {
      fail(Err::ParseError, ctx() + "unknown section [" + section + "]");
    }
  }
  tf.layout.validate();
  tf.quay.validate();
  return tf;
}

}  // namespace tos
