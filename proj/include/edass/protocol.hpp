#pragma once

// Per-node duty-cycling protocol: mode transitions, sensor-triggered
// escalation toward the command center, message framing with link delays,
// and the energy ledger.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fusion.hpp"
#include "sensing.hpp"
#include "sim.hpp"
#include "world.hpp"

namespace edass {

enum class NodeMode { Sleep, Active, ClusterMember, ClusterHead };

inline const char* node_mode_name(NodeMode m) {
  switch (m) {
    case NodeMode::Sleep: return "sleep";
    case NodeMode::Active: return "active";
    case NodeMode::ClusterMember: return "member";
    case NodeMode::ClusterHead: return "head";
  }
  return "unknown";
}

enum class MessageKind {
  DetectionReport,  // member -> head, raw reading
  WakeCommand,      // command center -> node, predicted position
  TrackUpdate,      // head -> command center, fused fix
  HeadClaim,        // command center -> node, cluster assignment or release
  CuNotify          // node -> command center, positive reading
};

inline const char* message_kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::DetectionReport: return "detection-report";
    case MessageKind::WakeCommand: return "wake-command";
    case MessageKind::TrackUpdate: return "track-update";
    case MessageKind::HeadClaim: return "head-claim";
    case MessageKind::CuNotify: return "cu-notify";
  }
  return "unknown";
}

struct Message {
  MessageKind kind = MessageKind::CuNotify;
  int from_node = -1;  // -1 is the command center
  int to_node = -1;    // -1 is the command center
  SimTime sent_at = 0;
  std::optional<SensorReading> reading;  // DetectionReport, CuNotify
  std::optional<Position> predicted;     // WakeCommand
  std::optional<Fix> fix;                // TrackUpdate
  int cluster_id = -1;                   // HeadClaim fields
  int head = -1;
  std::vector<int> members;
  bool release = false;

  // Sizes are multiples of 25 bytes so every link delay lands on the
  // microsecond grid and the 6-decimal trace time column stays exact.
  std::size_t size_bytes() const {
    switch (kind) {
      case MessageKind::WakeCommand: return 25;
      case MessageKind::HeadClaim: return 25 + 25 * members.size();
      default: return 50;
    }
  }
};

enum class LinkDirection { Up, Down };  // up toward the command center

struct LinkParams {
  double up_bps = 50e6;
  double down_bps = 100e6;
  double propagation = 1e-3;  // seconds, added to every delivery
  double drop_prob = 0;
};

inline double link_delay(std::size_t bytes, LinkDirection dir,
                         const LinkParams& link) {
  double bps = dir == LinkDirection::Up ? link.up_bps : link.down_bps;
  return static_cast<double>(bytes) * 8.0 / bps + link.propagation;
}

struct EnergyRates {
  double sleep_w = 3e-5;
  double active_w = 24e-3;
  double head_w = 36e-3;   // aggregation premium over plain active
  double tx_j = 50e-6;     // per message
  double sample_j = 10e-6; // per sensor activation
};

struct EnergyLedger {
  double consumed = 0;  // joules, non-decreasing
};

inline double mode_power(const EnergyRates& rates, NodeMode mode) {
  switch (mode) {
    case NodeMode::Sleep: return rates.sleep_w;
    case NodeMode::ClusterHead: return rates.head_w;
    default: return rates.active_w;  // members sense at the active rate
  }
}

inline void accrue_energy(EnergyLedger& ledger, const EnergyRates& rates,
                          NodeMode mode, double duration, int messages_sent,
                          int samples) {
  if (duration < 0)
    throw Error("energy accrual over a negative duration");
  ledger.consumed += mode_power(rates, mode) * duration +
                     rates.tx_j * messages_sent + rates.sample_j * samples;
}

struct ProtocolParams {
  double guard_period = 5;     // sleep-mode magnetic/chemical sampling period
  double idle_timeout = 30;    // no detections for this long -> back to sleep
  double gas_period = 10;      // gas sampling cadence after a chemical hit
  double gas_duration = 300;   // give up after the plume persistence window
  double fusion_interval = 2;  // head fusion rounds and report windows
  double wake_radius = 9.144;  // successor cluster radius around a prediction
};

struct NodeState {
  int id = 0;
  Position pos;
  NodeMode mode = NodeMode::Sleep;
  SimTime last_detection = -1e300;
  SimTime gas_until = -1;  // gas series deadline, negative when idle
  int cluster_id = -1;
  int head = -1;  // head node id while clustered
  // Bumped on every sleep/wake flip; periodic events stamped with an older
  // epoch are stale and must not act.
  std::uint64_t epoch = 0;
  EnergyLedger ledger;
  SimTime accrued_to = 0;
};

enum class NodeEventKind { Readings, Delivery, IdleCheck };

struct NodeInput {
  NodeEventKind kind = NodeEventKind::Readings;
  SimTime time = 0;
  std::vector<SensorReading> readings;  // positives gathered this tick
  std::optional<Message> message;       // Delivery only
  int samples_taken = 0;                // sensor activations to bill
};

struct NodeActions {
  std::vector<Message> outgoing;
  bool start_gas_series = false;
  bool woke = false;
  bool slept = false;
  double energy_delta = 0;
};

struct UnknownEventKindError : Error {
  explicit UnknownEventKindError(const std::string& w) : Error(w) {}
};

// The node state machine. Readings escalate to the command center (and to
// the cluster head when clustered), a chemical positive arms the gas series,
// wake commands and cluster claims adjust the mode, and the idle check puts
// a quiet node back to sleep. Energy accrues here so that every event a node
// sees advances its ledger exactly once.
inline NodeActions handle_node_event(NodeState& node, const NodeInput& in,
                                     const ProtocolParams& params,
                                     const EnergyRates& rates) {
  NodeActions out;
  double before = node.ledger.consumed;
  // elapsed time is billed at the rate of the mode held since the last event
  accrue_energy(node.ledger, rates, node.mode, in.time - node.accrued_to, 0,
                in.samples_taken);
  node.accrued_to = in.time;

  switch (in.kind) {
    case NodeEventKind::Readings: {
      if (!in.readings.empty()) {
        node.last_detection = in.time;
        if (node.mode == NodeMode::Sleep) {
          // a guard-tick detection wakes the node before anything is sent,
          // so a sleeping node never appears as a sender
          node.mode = NodeMode::Active;
          node.epoch++;
          out.woke = true;
        }
      }
      for (const SensorReading& r : in.readings) {
        Message notify;
        notify.kind = MessageKind::CuNotify;
        notify.from_node = node.id;
        notify.sent_at = in.time;
        notify.reading = r;
        out.outgoing.push_back(std::move(notify));
        if (node.cluster_id >= 0 && node.head != node.id) {
          Message report;
          report.kind = MessageKind::DetectionReport;
          report.from_node = node.id;
          report.to_node = node.head;
          report.sent_at = in.time;
          report.reading = r;
          out.outgoing.push_back(std::move(report));
        }
        if (r.modality == Modality::Chemical && node.gas_until < in.time) {
          node.gas_until = in.time + params.gas_duration;
          out.start_gas_series = true;
        }
      }
      break;
    }
    case NodeEventKind::Delivery: {
      if (!in.message)
        throw UnknownEventKindError("delivery without a message");
      const Message& m = *in.message;
      switch (m.kind) {
        case MessageKind::WakeCommand:
          node.last_detection = in.time;  // stays up for a full idle window
          if (node.mode == NodeMode::Sleep) {
            node.mode = NodeMode::Active;
            node.epoch++;
            out.woke = true;
          }
          break;
        case MessageKind::HeadClaim:
          if (m.release) {
            if (node.cluster_id == m.cluster_id) {
              node.cluster_id = -1;
              node.head = -1;
              if (node.mode == NodeMode::ClusterHead ||
                  node.mode == NodeMode::ClusterMember)
                node.mode = NodeMode::Active;  // a sleeping node stays asleep
            }
          } else {
            node.cluster_id = m.cluster_id;
            node.head = m.head;
            node.last_detection = in.time;
            if (node.mode == NodeMode::Sleep) {
              node.epoch++;
              out.woke = true;
            }
            node.mode = m.head == node.id ? NodeMode::ClusterHead
                                          : NodeMode::ClusterMember;
          }
          break;
        default:
          throw UnknownEventKindError("node " + std::to_string(node.id) +
                                      " cannot handle " +
                                      message_kind_name(m.kind));
      }
      break;
    }
    case NodeEventKind::IdleCheck: {
      if (node.mode != NodeMode::Sleep &&
          in.time - node.last_detection >= params.idle_timeout) {
        node.mode = NodeMode::Sleep;
        node.epoch++;
        node.gas_until = -1;
        node.cluster_id = -1;
        node.head = -1;
        out.slept = true;
      }
      break;
    }
  }

  if (!out.outgoing.empty())
    accrue_energy(node.ledger, rates, node.mode, 0,
                  static_cast<int>(out.outgoing.size()), 0);
  out.energy_delta = node.ledger.consumed - before;
  return out;
}

}  // namespace edass
