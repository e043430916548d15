#include "phev/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "phev/errors.hpp"

namespace phev {

int classify_segment_mode(double avg_speed_mph) {
  if (!(avg_speed_mph > 0.0)) throw InvalidInput("segment speed must be positive");
  if (avg_speed_mph < 20.0) return 1;
  if (avg_speed_mph <= 40.0) return 2;
  return 3;
}

TrafficMode mode_from_index(int mode_index) {
  switch (mode_index) {
    case 1:
      return TrafficMode::High;
    case 2:
      return TrafficMode::Medium;
    case 3:
      return TrafficMode::Low;
    default:
      throw InvalidInput("mode index must be 1, 2 or 3");
  }
}

namespace {

using LinkKey = std::pair<NodeId, NodeId>;

std::string key_name(const LinkKey& key) {
  return std::to_string(key.first) + "->" + std::to_string(key.second);
}

// Groups segments per link and checks seq is 0..k-1 without repeats.
std::map<LinkKey, std::vector<SegmentRecord>> group_segments(
    std::span<const SegmentRecord> segments) {
  std::map<LinkKey, std::vector<SegmentRecord>> grouped;
  for (const SegmentRecord& s : segments) {
    if (!(s.length_mi > 0.0)) {
      throw InvalidInput("segment " + std::to_string(s.seq) + " of link " +
                         key_name({s.link_from, s.link_to}) + " needs positive length");
    }
    classify_segment_mode(s.avg_speed_mph);
    grouped[{s.link_from, s.link_to}].push_back(s);
  }
  for (auto& [key, segs] : grouped) {
    std::sort(segs.begin(), segs.end(),
              [](const SegmentRecord& a, const SegmentRecord& b) { return a.seq < b.seq; });
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (i > 0 && segs[i].seq == segs[i - 1].seq) {
        throw InvalidInput("duplicate segment " + std::to_string(segs[i].seq) + " on link " +
                           key_name(key));
      }
      if (segs[i].seq != static_cast<int>(i)) {
        throw InvalidInput("segments of link " + key_name(key) +
                           " are not numbered contiguously from 0");
      }
    }
  }
  return grouped;
}

}  // namespace

std::vector<SegmentedLink> insert_fictitious_nodes(std::span<const SegmentRecord> segments) {
  const auto grouped = group_segments(segments);
  NodeId next_id = 0;
  for (const auto& [key, segs] : grouped) next_id = std::max({next_id, key.first, key.second});

  std::vector<SegmentedLink> result;
  for (const auto& [key, segs] : grouped) {
    SegmentedLink current{key.first, key.second, key.first, key.second, {}};
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (i > 0) {
        const int jump = std::abs(classify_segment_mode(segs[i].avg_speed_mph) -
                                  classify_segment_mode(segs[i - 1].avg_speed_mph));
        if (jump == 2) {
          current.to = ++next_id;
          result.push_back(std::move(current));
          current = SegmentedLink{next_id, key.second, key.first, key.second, {}};
        }
      }
      current.segments.push_back(segs[i]);
    }
    result.push_back(std::move(current));
  }
  return result;
}

namespace {

double mean_mode_index(std::span<const SegmentRecord> segments) {
  double weighted = 0.0;
  double total = 0.0;
  for (const SegmentRecord& s : segments) {
    weighted += s.length_mi * classify_segment_mode(s.avg_speed_mph);
    total += s.length_mi;
  }
  return weighted / total;
}

}  // namespace

TrafficMode aggregate_link_mode(std::span<const SegmentRecord> segments) {
  if (segments.empty()) throw InvalidInput("cannot aggregate the mode of an empty link");
  return mode_from_index(static_cast<int>(std::floor(mean_mode_index(segments) + 0.5)));
}

std::pair<NetworkGraph, PreprocessReport> build_graph(std::span<const SegmentRecord> segments) {
  const auto split = insert_fictitious_nodes(segments);
  PreprocessReport report;
  std::vector<Link> links;
  std::size_t original_links = 0;
  for (const SegmentedLink& part : split) {
    if (part.from == part.original_from) ++original_links;
    double length = 0.0;
    double hours = 0.0;
    for (const SegmentRecord& s : part.segments) {
      length += s.length_mi;
      hours += s.length_mi / s.avg_speed_mph;
    }
    const TrafficMode mode = aggregate_link_mode(part.segments);
    links.push_back(Link{part.from, part.to, length, length / hours, mode});
    report.assignments.push_back({part.from, part.to, mode, mean_mode_index(part.segments)});
  }
  report.links_out = links.size();
  report.fictitious_nodes_added = links.size() - original_links;
  return {NetworkGraph(std::move(links)), std::move(report)};
}

}  // namespace phev
