#pragma once

// Cluster mechanics: head election, strength-weighted localization, linear
// next-position prediction, and wake-set selection for the successor cluster.

#include <algorithm>
#include <utility>
#include <vector>

#include "sensing.hpp"
#include "world.hpp"

namespace edass {

struct Cluster {
  int id = 0;
  int head = 0;
  std::vector<int> members;  // sorted, includes the head
  SimTime formed_at = 0;
};

struct Fix {
  SimTime t = 0;
  Position pos;
  bool fused = false;  // false when a single radar report located the target
};

struct TargetTrack {
  int id = 0;
  std::vector<Fix> fixes;  // strictly increasing times
  std::optional<std::pair<SimTime, Position>> predicted;
};

struct EmptyReportsError : Error {
  explicit EmptyReportsError(const std::string& w) : Error(w) {}
};
struct ZeroWeightSumError : Error {
  explicit ZeroWeightSumError(const std::string& w) : Error(w) {}
};
struct NonIncreasingTimesError : Error {
  explicit NonIncreasingTimesError(const std::string& w) : Error(w) {}
};

// Strongest reading wins; equal strengths go to the smallest node id so the
// outcome never depends on report order.
inline int elect_cluster_head(const std::vector<SensorReading>& reports) {
  if (reports.empty()) throw EmptyReportsError("cannot elect a head from zero reports");
  const SensorReading* best = &reports.front();
  for (const SensorReading& r : reports) {
    if (r.strength > best->strength ||
        (r.strength == best->strength && r.node_id < best->node_id))
      best = &r;
  }
  return best->node_id;
}

// Strength-weighted centroid of the reporting positions.
inline Position fuse_location(const std::vector<std::pair<Position, double>>& reports) {
  if (reports.empty()) throw EmptyReportsError("cannot fuse zero reports");
  double sw = 0, sx = 0, sy = 0;
  for (const auto& [p, w] : reports) {
    sw += w;
    sx += w * p.x;
    sy += w * p.y;
  }
  if (sw == 0) throw ZeroWeightSumError("report weights sum to zero");
  return {sx / sw, sy / sw};
}

// Constant-velocity extrapolation mirrored over the observed interval:
// the predicted instant lies as far after `cur` as `prev` lies before it.
inline std::pair<SimTime, Position> predict_next(
    const std::pair<SimTime, Position>& prev,
    const std::pair<SimTime, Position>& cur) {
  if (cur.first <= prev.first)
    throw NonIncreasingTimesError("fix times must increase: " +
                                  fmt_fixed(prev.first, 6) + " then " +
                                  fmt_fixed(cur.first, 6));
  SimTime t = cur.first + (cur.first - prev.first);
  Position p{cur.second.x + (cur.second.x - prev.second.x),
             cur.second.y + (cur.second.y - prev.second.y)};
  return {t, p};
}

struct WakeSelection {
  std::vector<int> nodes;  // ascending id
  bool track_loss = false; // set when nothing covers the predicted point
};

// Every node within wake_radius of the predicted position, boundary
// inclusive. An empty result is flagged, not an error: losing the track is a
// legitimate outcome the caller has to surface.
inline WakeSelection select_wake_set(const Position& predicted,
                                     const DeploymentField& field,
                                     double wake_radius) {
  WakeSelection out;
  for (const NodePlacement& n : field.nodes)
    if (distance(n.pos, predicted) <= wake_radius) out.nodes.push_back(n.id);
  std::sort(out.nodes.begin(), out.nodes.end());
  out.track_loss = out.nodes.empty();
  return out;
}

}  // namespace edass
