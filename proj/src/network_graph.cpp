#include "phev/network_graph.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "phev/errors.hpp"

namespace phev {

std::string_view to_string(TrafficMode mode) {
  switch (mode) {
    case TrafficMode::Low:
      return "low";
    case TrafficMode::Medium:
      return "medium";
    case TrafficMode::High:
      return "high";
  }
  return "?";
}

std::string_view drive_cycle_name(TrafficMode mode) {
  switch (mode) {
    case TrafficMode::Low:
      return "HWFET";
    case TrafficMode::Medium:
      return "UDDS";
    case TrafficMode::High:
      return "NYC";
  }
  return "?";
}

std::optional<TrafficMode> parse_traffic_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "low") return TrafficMode::Low;
  if (lower == "medium") return TrafficMode::Medium;
  if (lower == "high") return TrafficMode::High;
  return std::nullopt;
}

double travel_time(const Link& link) { return link.length_mi / link.avg_speed_mph; }

bool Path::is_simple() const {
  std::unordered_set<NodeId> seen(nodes.begin(), nodes.end());
  return seen.size() == nodes.size();
}

std::string Path::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) os << "->";
    os << nodes[i];
  }
  return os.str();
}

NetworkGraph::NetworkGraph(std::vector<Link> links, std::vector<NodeId> nodes)
    : links_(std::move(links)) {
  for (const Link& l : links_) {
    if (l.from <= 0 || l.to <= 0) {
      throw InvalidInput("node ids must be positive integers");
    }
    if (l.from == l.to) {
      throw InvalidInput("self-loop on node " + std::to_string(l.from));
    }
    if (!(l.length_mi > 0.0) || !(l.avg_speed_mph > 0.0)) {
      throw InvalidInput("link " + std::to_string(l.from) + "->" + std::to_string(l.to) +
                         " needs positive length and speed");
    }
    nodes.push_back(l.from);
    nodes.push_back(l.to);
  }
  for (NodeId id : nodes) {
    if (id <= 0) throw InvalidInput("node ids must be positive integers");
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  nodes_ = std::move(nodes);
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);

  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  for (std::size_t k = 0; k < links_.size(); ++k) {
    out_[index_.at(links_[k].from)].push_back(k);
    in_[index_.at(links_[k].to)].push_back(k);
  }
  for (auto& adj : out_) {
    std::sort(adj.begin(), adj.end(),
              [this](std::size_t a, std::size_t b) { return links_[a].to < links_[b].to; });
    for (std::size_t k = 1; k < adj.size(); ++k) {
      if (links_[adj[k]].to == links_[adj[k - 1]].to) {
        throw InvalidInput("parallel link " + std::to_string(links_[adj[k]].from) + "->" +
                           std::to_string(links_[adj[k]].to));
      }
    }
  }
  for (auto& adj : in_) {
    std::sort(adj.begin(), adj.end(),
              [this](std::size_t a, std::size_t b) { return links_[a].from < links_[b].from; });
  }
}

std::size_t NetworkGraph::node_index(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InvalidInput("unknown node id " + std::to_string(id));
  return it->second;
}

std::span<const std::size_t> NetworkGraph::out_links(NodeId id) const {
  return out_[node_index(id)];
}

std::span<const std::size_t> NetworkGraph::in_links(NodeId id) const {
  return in_[node_index(id)];
}

std::vector<NodeId> NetworkGraph::out_neighbors(NodeId id) const {
  std::vector<NodeId> result;
  for (std::size_t k : out_links(id)) result.push_back(links_[k].to);
  return result;
}

std::vector<NodeId> NetworkGraph::in_neighbors(NodeId id) const {
  std::vector<NodeId> result;
  for (std::size_t k : in_links(id)) result.push_back(links_[k].from);
  return result;
}

std::optional<std::size_t> NetworkGraph::find_link(NodeId from, NodeId to) const {
  auto it = index_.find(from);
  if (it == index_.end()) return std::nullopt;
  const auto& adj = out_[it->second];
  auto pos = std::lower_bound(adj.begin(), adj.end(), to,
                              [this](std::size_t k, NodeId v) { return links_[k].to < v; });
  if (pos == adj.end() || links_[*pos].to != to) return std::nullopt;
  return *pos;
}

const Link& NetworkGraph::link(NodeId from, NodeId to) const {
  auto k = find_link(from, to);
  if (!k) {
    throw InvalidInput("no link " + std::to_string(from) + "->" + std::to_string(to));
  }
  return links_[*k];
}

std::vector<std::size_t> NetworkGraph::path_links(const Path& path) const {
  if (!path.is_simple()) throw InvalidInput("path " + path.to_string() + " is not simple");
  std::vector<std::size_t> result;
  result.reserve(path.num_links());
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    auto k = find_link(path.nodes[i], path.nodes[i + 1]);
    if (!k) {
      throw InvalidInput("path " + path.to_string() + " uses missing link " +
                         std::to_string(path.nodes[i]) + "->" + std::to_string(path.nodes[i + 1]));
    }
    result.push_back(*k);
  }
  return result;
}

namespace {

class PathEnumerator {
 public:
  PathEnumerator(const NetworkGraph& g, NodeId dest, std::size_t max_paths)
      : g_(g), dest_(dest), max_paths_(max_paths), on_path_(g.num_nodes(), false) {}

  std::vector<Path> run(NodeId origin) {
    visit(origin);
    return std::move(paths_);
  }

 private:
  void visit(NodeId u) {
    stack_.push_back(u);
    if (u == dest_) {
      if (paths_.size() == max_paths_) {
        throw EnumerationOverflow("instance too large for enumeration: more than " +
                                  std::to_string(max_paths_) + " simple paths");
      }
      paths_.push_back(Path{stack_});
      stack_.pop_back();
      return;
    }
    on_path_[g_.node_index(u)] = true;
    for (std::size_t k : g_.out_links(u)) {
      NodeId v = g_.links()[k].to;
      if (!on_path_[g_.node_index(v)]) visit(v);
    }
    on_path_[g_.node_index(u)] = false;
    stack_.pop_back();
  }

  const NetworkGraph& g_;
  NodeId dest_;
  std::size_t max_paths_;
  std::vector<bool> on_path_;
  std::vector<NodeId> stack_;
  std::vector<Path> paths_;
};

}  // namespace

std::vector<Path> enumerate_simple_paths(const NetworkGraph& g, NodeId origin, NodeId dest,
                                         std::size_t max_paths) {
  g.node_index(origin);
  g.node_index(dest);
  if (origin == dest) throw InvalidInput("origin and destination must differ");
  if (max_paths == 0) throw InvalidInput("max_paths must be at least 1");
  return PathEnumerator(g, dest, max_paths).run(origin);
}

double path_travel_time(const NetworkGraph& g, const Path& path) {
  double total = 0.0;
  for (std::size_t k : g.path_links(path)) total += travel_time(g.links()[k]);
  return total;
}

double path_length(const NetworkGraph& g, const Path& path) {
  double total = 0.0;
  for (std::size_t k : g.path_links(path)) total += g.links()[k].length_mi;
  return total;
}

}  // namespace phev
