#pragma once

#include <span>
#include <utility>
#include <vector>

#include "phev/network_graph.hpp"

namespace phev {

// One measured road segment of a link.
struct SegmentRecord {
  NodeId link_from = 0;
  NodeId link_to = 0;
  int seq = 0;
  double length_mi = 0.0;
  double avg_speed_mph = 0.0;
};

// Speed class of a segment: 1 below 20 mph, 2 for 20..40 mph inclusive,
// 3 above 40 mph. Throws InvalidInput on non-positive speed.
int classify_segment_mode(double avg_speed_mph);

// Mode index 1 (slowest) is High congestion, 3 is Low.
TrafficMode mode_from_index(int mode_index);

// Part of an original link after splitting at fictitious nodes.
struct SegmentedLink {
  NodeId from = 0;
  NodeId to = 0;
  NodeId original_from = 0;
  NodeId original_to = 0;
  std::vector<SegmentRecord> segments;  // in travel order
};

// Splits each link wherever two consecutive segments differ by two modes.
// New node ids count up from the largest original id, visiting links in
// (from, to) order. Throws InvalidInput on duplicate or non-contiguous seq.
std::vector<SegmentedLink> insert_fictitious_nodes(std::span<const SegmentRecord> segments);

// Length-weighted mean mode index rounded half-up, mapped to a TrafficMode.
TrafficMode aggregate_link_mode(std::span<const SegmentRecord> segments);

struct LinkModeAssignment {
  NodeId from = 0;
  NodeId to = 0;
  TrafficMode mode = TrafficMode::Medium;
  double mean_mode_index = 0.0;
};

struct PreprocessReport {
  std::size_t fictitious_nodes_added = 0;
  std::size_t links_out = 0;
  std::vector<LinkModeAssignment> assignments;
};

// Segments -> routable graph. Link length is the segment-length sum; link
// speed is the length-weighted harmonic mean so travel time is preserved.
std::pair<NetworkGraph, PreprocessReport> build_graph(std::span<const SegmentRecord> segments);

}  // namespace phev
