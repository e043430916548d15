#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phev {

using NodeId = int;

// Congestion level of a link. Each level is driven with one standard cycle:
// Low -> HWFET, Medium -> UDDS, High -> NYC.
enum class TrafficMode { Low = 0, Medium = 1, High = 2 };

inline constexpr std::size_t kNumTrafficModes = 3;

std::string_view to_string(TrafficMode mode);
std::string_view drive_cycle_name(TrafficMode mode);
// Accepts "low", "medium", "high" (case-insensitive).
std::optional<TrafficMode> parse_traffic_mode(std::string_view text);

struct Link {
  NodeId from = 0;
  NodeId to = 0;
  double length_mi = 0.0;
  double avg_speed_mph = 0.0;
  TrafficMode mode = TrafficMode::Medium;

  bool operator==(const Link&) const = default;
};

// Hours needed to traverse the link at its average speed.
double travel_time(const Link& link);

struct Path {
  std::vector<NodeId> nodes;

  bool operator==(const Path&) const = default;
  auto operator<=>(const Path&) const = default;

  bool empty() const { return nodes.empty(); }
  std::size_t num_links() const { return nodes.size() < 2 ? 0 : nodes.size() - 1; }
  bool is_simple() const;
  std::string to_string() const;  // "1->2->3"
};

// Immutable directed graph without parallel links or self-loops.
class NetworkGraph {
 public:
  NetworkGraph() = default;

  // Node set is the union of `nodes` and all link endpoints. Throws
  // InvalidInput on a self-loop, a parallel link, a non-positive node id,
  // or a non-positive length or speed.
  explicit NetworkGraph(std::vector<Link> links, std::vector<NodeId> nodes = {});

  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_links() const { return links_.size(); }

  bool has_node(NodeId id) const { return index_.contains(id); }
  // Dense position of `id` in nodes(); throws InvalidInput for unknown ids.
  std::size_t node_index(NodeId id) const;
  NodeId max_node_id() const { return nodes_.empty() ? 0 : nodes_.back(); }

  // Link indices leaving / entering a node, ordered by the opposite endpoint.
  std::span<const std::size_t> out_links(NodeId id) const;
  std::span<const std::size_t> in_links(NodeId id) const;

  // O(i) and I(i), ascending.
  std::vector<NodeId> out_neighbors(NodeId id) const;
  std::vector<NodeId> in_neighbors(NodeId id) const;

  std::optional<std::size_t> find_link(NodeId from, NodeId to) const;
  // Throws InvalidInput when the link does not exist.
  const Link& link(NodeId from, NodeId to) const;

  // Link indices along a path. Throws InvalidInput when the path is not
  // simple or uses a missing link.
  std::vector<std::size_t> path_links(const Path& path) const;

 private:
  std::vector<NodeId> nodes_;  // ascending
  std::vector<Link> links_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

inline constexpr std::size_t kDefaultMaxPaths = 1'000'000;

// All simple origin -> dest paths in lexicographic node order. Throws
// EnumerationOverflow as soon as more than `max_paths` exist.
std::vector<Path> enumerate_simple_paths(const NetworkGraph& g, NodeId origin, NodeId dest,
                                         std::size_t max_paths = kDefaultMaxPaths);

double path_travel_time(const NetworkGraph& g, const Path& path);
double path_length(const NetworkGraph& g, const Path& path);

}  // namespace phev
