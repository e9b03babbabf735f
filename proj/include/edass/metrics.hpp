#pragma once

// Run summary computed purely from a trace file and the scenario that
// produced it: detection and confirmation latencies, tracking error against
// ground truth, track losses, the energy bill, and the alert sequence.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "command_center.hpp"
#include "scenario.hpp"
#include "trace.hpp"
#include "world.hpp"

namespace edass {

struct MetricsSummary {
  // latencies are measured from simulation start
  std::optional<double> first_detection_latency;
  std::optional<double> confirmation_latency;
  std::optional<double> tracking_rmse;  // over fused fixes vs ground truth
  int track_loss_count = 0;
  double energy_total = 0;
  std::vector<std::pair<int, double>> energy_per_node;  // ascending node id
  std::vector<AlertKind> alert_sequence;
};

inline AlertKind alert_kind_from_name(const std::string& name) {
  for (AlertKind k :
       {AlertKind::TrafficSignalOverride, AlertKind::VoiceBroadcast,
        AlertKind::RedZoneDeclared, AlertKind::BaseStationReport,
        AlertKind::PoliceNotify})
    if (name == alert_kind_name(k)) return k;
  throw MismatchedTraceError("unknown alert kind '" + name + "'");
}

inline MetricsSummary compute_metrics(const std::string& trace_text,
                                      const Scenario& scenario) {
  ParsedTrace trace = parse_trace(trace_text);

  std::set<int> known_nodes;
  for (const NodePlacement& n : scenario.nodes) known_nodes.insert(n.id);

  MetricsSummary out;
  double sq_err_sum = 0;
  int fix_count = 0;
  std::map<int, double> energy;

  for (const ParsedTraceLine& l : trace.lines) {
    std::optional<int> node = actor_node_id(l.actor);
    if (node && !known_nodes.count(*node))
      throw MismatchedTraceError("trace mentions node " +
                                 std::to_string(*node) +
                                 " which the scenario does not place");

    if (!out.first_detection_latency && l.kind == "sensor-tick" &&
        (l.has("mag") || l.has("chem") || l.has("gas") || l.has("radar")))
      out.first_detection_latency = l.time;

    if (!out.confirmation_latency && l.has("match"))
      out.confirmation_latency = l.time;

    // fused fixes appear on the head's fusion-round timer lines
    if (node && l.kind == "timer" && l.has("fix_t")) {
      double ft = *l.num("fix_t");
      double fx = *l.num("fix_x");
      double fy = *l.num("fix_y");
      // compare against the nearest target that already exists at that time
      std::optional<double> best;
      for (const Target& t : scenario.targets) {
        if (t.waypoints.empty() || ft < t.waypoints.front().t) continue;
        Position truth = position_at(t, ft);
        double dx = truth.x - fx, dy = truth.y - fy;
        double e2 = dx * dx + dy * dy;
        if (!best || e2 < *best) best = e2;
      }
      if (best) {
        sq_err_sum += *best;
        ++fix_count;
      }
    }

    if (l.has("track_loss")) ++out.track_loss_count;

    if (const std::string* what = l.get("what"); what && *what == "energy-final") {
      if (!node)
        throw MismatchedTraceError("energy-final line without a node actor");
      energy[*node] = *l.num("consumed");
    }

    if (const std::string* what = l.get("what"); what && *what == "alert")
      out.alert_sequence.push_back(alert_kind_from_name(*l.get("kind")));
  }

  if (fix_count > 0)
    out.tracking_rmse = std::sqrt(sq_err_sum / static_cast<double>(fix_count));
  for (const auto& [id, j] : energy) {
    out.energy_per_node.emplace_back(id, j);
    out.energy_total += j;
  }
  return out;
}

inline std::string format_metrics(const MetricsSummary& m) {
  std::string out;
  auto opt = [&out](const std::string& k, const std::optional<double>& v,
                    int decimals) {
    out += k + ": " + (v ? fmt_fixed(*v, decimals) : std::string("none")) + "\n";
  };
  opt("first-detection-latency", m.first_detection_latency, 6);
  opt("confirmation-latency", m.confirmation_latency, 6);
  opt("tracking-rmse", m.tracking_rmse, 12);
  out += "track-loss-count: " + std::to_string(m.track_loss_count) + "\n";
  out += "energy-total: " + fmt_fixed(m.energy_total, 9) + "\n";
  for (const auto& [id, j] : m.energy_per_node)
    out += "energy-node-" + std::to_string(id) + ": " + fmt_fixed(j, 9) + "\n";
  out += "alert-sequence:";
  if (m.alert_sequence.empty()) {
    out += " none";
  } else {
    for (std::size_t i = 0; i < m.alert_sequence.size(); ++i)
      out += (i ? "," : " ") + std::string(alert_kind_name(m.alert_sequence[i]));
  }
  out += '\n';
  return out;
}

}  // namespace edass
