#pragma once

// Wires a scenario into a live simulation: duty-cycled nodes with guard
// sampling, cluster formation and handoff around a moving target, head-side
// fusion, command-center confirmation and alerting, and per-node energy
// accounting. The output is the event trace; everything else (metrics,
// invariant checks) is computed from that text.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "command_center.hpp"
#include "fusion.hpp"
#include "metrics.hpp"
#include "protocol.hpp"
#include "scenario.hpp"
#include "sensing.hpp"
#include "sim.hpp"
#include "trace.hpp"
#include "world.hpp"

namespace edass {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  std::optional<double> t_end;        // overrides the scenario horizon
  // Pins every node in Active mode from t=0 and disables sleeping; used as
  // the energy baseline the duty-cycled run is compared against.
  bool force_active = false;
};

struct RunResult {
  std::vector<TraceLine> lines;
  std::uint64_t seed = 0;
  double t_end = 0;

  std::string text() const { return trace_to_text(lines, seed); }
};

namespace detail {

inline std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

class Runner {
 public:
  Runner(const Scenario& scn, const RunOptions& opts)
      : scn_(scn),
        opts_(opts),
        seed_(opts.seed.value_or(scn.run.seed)),
        t_end_(opts.t_end.value_or(scn.run.t_end)),
        sim_(seed_),
        plume_(scn.width, scn.height, scn.plume.cell_size,
               scn.plume.persistence),
        field_(scn.field()),
        db_(scn.signatures),
        wl_(scn.watchlist),
        tolerance_(scn.tolerance_value()) {}

  RunResult run() {
    setup();
    sim_.run_until(t_end_);
    // close out every ledger at the horizon, after all same-time events
    for (const auto& [id, n] : nodes_) {
      int node_id = id;
      sim_.schedule(t_end_, actor(node_id), EventKind::Timer,
                    [this, node_id](EventContext& ctx) {
                      NodeState& node = nodes_.at(node_id);
                      accrue_node(node, ctx.now());
                      ctx.detail("what", "energy-final");
                      ctx.detail("mode", node_mode_name(node.mode));
                      ctx.detail("consumed", node.ledger.consumed, 9);
                    });
    }
    sim_.run_until(t_end_);

    RunResult res;
    res.lines = sim_.trace();
    res.seed = seed_;
    res.t_end = t_end_;
    return res;
  }

 private:
  static std::string actor(int node_id) {
    return "node/" + std::to_string(node_id);
  }

  void setup() {
    for (const NodePlacement& p : scn_.nodes)
      nodes_.emplace(p.id, NodeState{p.id, p.pos});

    if (opts_.force_active) {
      for (auto& [id, n] : nodes_) {
        n.mode = NodeMode::Active;
        n.epoch = 1;
        n.last_detection = 0;
      }
      for (auto& [id, n] : nodes_) schedule_active_tick(0, id, n.epoch);
    } else {
      for (auto& [id, n] : nodes_)
        schedule_guard_tick(scn_.protocol.guard_period, id);
    }

    for (const Target& t : scn_.targets)
      if (t.cargo.gas_emission_rate > 0)
        schedule_plume_feed(scn_.plume.feed_period, t.id);
  }

  // --- energy ---------------------------------------------------------

  void accrue_node(NodeState& n, SimTime t) {
    accrue_energy(n.ledger, scn_.energy, n.mode, t - n.accrued_to, 0, 0);
    n.accrued_to = t;
  }

  // --- sampling helpers -------------------------------------------------

  std::optional<SensorReading> best_magnetic(const NodeState& n, SimTime t) {
    std::optional<SensorReading> best;
    for (const Target& tg : scn_.targets) {
      if (t < tg.waypoints.front().t) continue;
      auto r = sample_magnetic(n.id, n.pos, tg, t, scn_.sensors.magnetic);
      if (r && (!best || r->strength > best->strength)) best = r;
    }
    return best;
  }

  std::optional<SensorReading> best_chemical(const NodeState& n, SimTime t,
                                             RandomSource& rng) {
    std::optional<SensorReading> best;
    for (const Target& tg : scn_.targets) {
      if (t < tg.waypoints.front().t) continue;
      auto r = sample_chemical(n.id, n.pos, tg, t, scn_.sensors.chemical, rng);
      if (r && (!best || r->strength > best->strength)) best = r;
    }
    return best;
  }

  std::optional<SensorReading> best_radar(const NodeState& n, SimTime t,
                                          RandomSource& rng) {
    std::optional<SensorReading> best;
    for (const Target& tg : scn_.targets) {
      if (t < tg.waypoints.front().t) continue;
      auto r = sample_radar(n.id, n.pos, tg, t, scn_.sensors.radar, rng);
      if (r && (!best || r->strength > best->strength)) best = r;
    }
    return best;
  }

  // --- node action plumbing ---------------------------------------------

  NodeActions apply_node(EventContext& ctx, NodeState& n, const NodeInput& in) {
    NodeActions acts = handle_node_event(n, in, scn_.protocol, scn_.energy);
    if (acts.woke) {
      ctx.detail("woke", "1");
      on_wake(ctx, n);
    }
    if (acts.slept) ctx.detail("slept", "1");
    if (acts.start_gas_series) {
      ctx.detail("gas-series", "1");
      schedule_gas_tick(ctx.now() + scn_.protocol.gas_period, n.id, n.epoch);
    }
    for (Message& m : acts.outgoing) send_message(ctx, std::move(m));
    return acts;
  }

  void on_wake(EventContext& ctx, NodeState& n) {
    // radar sweeps run on the shared integer-second grid so member fixes of
    // the same sweep carry identical timestamps and fuse cleanly
    schedule_active_tick(std::ceil(ctx.now()), n.id, n.epoch);
    if (!opts_.force_active)
      schedule_idle_check(ctx.now() + scn_.protocol.idle_timeout, n.id, n.epoch);
  }

  // --- messages -----------------------------------------------------------

  void send_message(EventContext& ctx, Message m) {
    m.sent_at = ctx.now();
    LinkDirection dir =
        m.from_node < 0 ? LinkDirection::Down : LinkDirection::Up;
    if (scn_.link.drop_prob > 0 && ctx.rng().uniform() < scn_.link.drop_prob) {
      ctx.detail("dropped", message_kind_name(m.kind));
      return;
    }
    double delay = link_delay(m.size_bytes(), dir, scn_.link);
    std::string to = m.to_node < 0 ? "cu" : actor(m.to_node);
    sim_.schedule(ctx.now() + delay, std::move(to), EventKind::MessageDelivery,
                  [this, m](EventContext& c) { deliver(c, m); });
  }

  void deliver(EventContext& ctx, const Message& m) {
    ctx.detail("kind", message_kind_name(m.kind));
    ctx.detail("from", m.from_node < 0 ? std::string("cu") : actor(m.from_node));
    if (m.to_node < 0) {
      cu_deliver(ctx, m);
      return;
    }

    NodeState& n = nodes_.at(m.to_node);
    switch (m.kind) {
      case MessageKind::DetectionReport: {
        accrue_node(n, ctx.now());
        if (n.mode == NodeMode::ClusterHead && live_ && live_->head == n.id) {
          // aggregation is activity: a head fed by members must not idle out
          n.last_detection = ctx.now();
          if (m.reading && m.reading->modality == Modality::Radar &&
              m.reading->fix) {
            head_pool_[n.id].push_back(*m.reading);
            ctx.detail("pooled", "1");
          } else {
            ctx.detail("noted", "1");
          }
        } else {
          ctx.detail("stale", "1");
        }
        break;
      }
      case MessageKind::WakeCommand:
      case MessageKind::HeadClaim: {
        NodeInput in{NodeEventKind::Delivery, ctx.now(), {}, m, 0};
        apply_node(ctx, n, in);
        if (m.kind == MessageKind::HeadClaim) {
          if (m.release) {
            ctx.detail("released", static_cast<long long>(m.cluster_id));
            head_pool_.erase(n.id);
          } else {
            ctx.detail("cluster", static_cast<long long>(m.cluster_id));
            if (m.head == n.id) {
              ctx.detail("role", "head");
              head_pool_[n.id].clear();
              schedule_fusion_round(ctx.now() + scn_.protocol.fusion_interval,
                                    n.id, m.cluster_id);
            } else {
              ctx.detail("role", "member");
            }
          }
        }
        break;
      }
      default: {
        // TrackUpdate or CuNotify addressed to a node is a routing bug;
        // the node handler rejects it and halts the run
        NodeInput in{NodeEventKind::Delivery, ctx.now(), {}, m, 0};
        apply_node(ctx, n, in);
        break;
      }
    }
  }

  // --- node events ----------------------------------------------------

  void schedule_guard_tick(SimTime t, int id) {
    sim_.schedule(t, actor(id), EventKind::SensorTick,
                  [this, id](EventContext& ctx) { guard_tick(ctx, id); });
  }

  void guard_tick(EventContext& ctx, int id) {
    NodeState& n = nodes_.at(id);
    ctx.detail("what", "guard");
    if (n.mode == NodeMode::Sleep) {
      std::vector<SensorReading> rs;
      if (auto m = best_magnetic(n, ctx.now())) {
        ctx.detail("mag", m->strength, 9);
        rs.push_back(std::move(*m));
      }
      if (auto c = best_chemical(n, ctx.now(), ctx.rng())) {
        ctx.detail("chem", c->strength, 9);
        rs.push_back(std::move(*c));
      }
      NodeInput in{NodeEventKind::Readings, ctx.now(), std::move(rs),
                   std::nullopt, 2};
      apply_node(ctx, n, in);
    } else {
      accrue_node(n, ctx.now());
      ctx.detail("skip", "awake");
    }
    schedule_guard_tick(ctx.now() + scn_.protocol.guard_period, id);
  }

  void schedule_active_tick(SimTime t, int id, std::uint64_t epoch) {
    sim_.schedule(t, actor(id), EventKind::SensorTick,
                  [this, id, epoch](EventContext& ctx) {
                    active_tick(ctx, id, epoch);
                  });
  }

  void active_tick(EventContext& ctx, int id, std::uint64_t epoch) {
    NodeState& n = nodes_.at(id);
    ctx.detail("what", "active");
    if (n.epoch != epoch || n.mode == NodeMode::Sleep) {
      accrue_node(n, ctx.now());
      ctx.detail("stale", "1");
      return;
    }
    std::vector<SensorReading> rs;
    if (auto m = best_magnetic(n, ctx.now())) {
      ctx.detail("mag", m->strength, 9);
      rs.push_back(std::move(*m));
    }
    if (auto c = best_chemical(n, ctx.now(), ctx.rng())) {
      ctx.detail("chem", c->strength, 9);
      rs.push_back(std::move(*c));
    }
    std::optional<SensorReading> radar = best_radar(n, ctx.now(), ctx.rng());
    if (radar) {
      ctx.detail("radar", radar->strength, 9);
      rs.push_back(*radar);
    }
    NodeInput in{NodeEventKind::Readings, ctx.now(), std::move(rs),
                 std::nullopt, 3};
    apply_node(ctx, n, in);
    // the head pools its own sweep directly; members reported theirs above
    if (radar && n.mode == NodeMode::ClusterHead && live_ &&
        live_->head == n.id)
      head_pool_[n.id].push_back(*radar);
    schedule_active_tick(ctx.now() + scn_.sensors.radar.period, id, epoch);
  }

  void schedule_gas_tick(SimTime t, int id, std::uint64_t epoch) {
    sim_.schedule(t, actor(id), EventKind::SensorTick,
                  [this, id, epoch](EventContext& ctx) {
                    gas_tick(ctx, id, epoch);
                  });
  }

  void gas_tick(EventContext& ctx, int id, std::uint64_t epoch) {
    NodeState& n = nodes_.at(id);
    ctx.detail("what", "gas");
    if (n.epoch != epoch || n.mode == NodeMode::Sleep ||
        n.gas_until < ctx.now()) {
      accrue_node(n, ctx.now());
      ctx.detail("stale", "1");
      return;
    }
    auto r = sample_gas(n.id, n.pos, plume_, ctx.now(), scn_.sensors.gas,
                        ctx.rng());
    if (r) {
      ctx.detail("gas", r->strength, 9);
      NodeInput in{NodeEventKind::Readings, ctx.now(), {*r}, std::nullopt, 1};
      apply_node(ctx, n, in);
      n.gas_until = -1;  // the confirmatory positive ends the series
    } else {
      NodeInput in{NodeEventKind::Readings, ctx.now(), {}, std::nullopt, 1};
      apply_node(ctx, n, in);
      if (ctx.now() + scn_.protocol.gas_period <= n.gas_until) {
        schedule_gas_tick(ctx.now() + scn_.protocol.gas_period, id, epoch);
      } else {
        ctx.detail("done", "1");
        n.gas_until = -1;
      }
    }
  }

  void schedule_idle_check(SimTime t, int id, std::uint64_t epoch) {
    sim_.schedule(t, actor(id), EventKind::Timer,
                  [this, id, epoch](EventContext& ctx) {
                    idle_check(ctx, id, epoch);
                  });
  }

  void idle_check(EventContext& ctx, int id, std::uint64_t epoch) {
    NodeState& n = nodes_.at(id);
    ctx.detail("what", "idle-check");
    if (n.epoch != epoch || n.mode == NodeMode::Sleep) {
      accrue_node(n, ctx.now());
      ctx.detail("stale", "1");
      return;
    }
    NodeInput in{NodeEventKind::IdleCheck, ctx.now(), {}, std::nullopt, 0};
    NodeActions acts = apply_node(ctx, n, in);
    if (!acts.slept)
      schedule_idle_check(n.last_detection + scn_.protocol.idle_timeout, id,
                          epoch);
  }

  // --- target / plume ---------------------------------------------------

  void schedule_plume_feed(SimTime t, int target_id) {
    sim_.schedule(t, "target/" + std::to_string(target_id),
                  EventKind::TargetMotion,
                  [this, target_id](EventContext& ctx) {
                    plume_feed(ctx, target_id);
                  });
  }

  void plume_feed(EventContext& ctx, int target_id) {
    const Target* tg = nullptr;
    for (const Target& t : scn_.targets)
      if (t.id == target_id) tg = &t;
    ctx.detail("what", "plume-feed");
    if (ctx.now() >= tg->waypoints.front().t) {
      feed_plume(plume_, *tg, ctx.now(), scn_.plume.feed_period);
      Position p = position_at(*tg, ctx.now());
      ctx.detail("x", p.x, 6);
      ctx.detail("y", p.y, 6);
    } else {
      ctx.detail("pending", "1");
    }
    schedule_plume_feed(ctx.now() + scn_.plume.feed_period, target_id);
  }

  // --- head fusion ------------------------------------------------------

  void schedule_fusion_round(SimTime t, int head_id, int cluster_id) {
    sim_.schedule(t, actor(head_id), EventKind::Timer,
                  [this, head_id, cluster_id](EventContext& ctx) {
                    fusion_round(ctx, head_id, cluster_id);
                  });
  }

  void fusion_round(EventContext& ctx, int head_id, int cluster_id) {
    NodeState& n = nodes_.at(head_id);
    ctx.detail("what", "fusion-round");
    accrue_node(n, ctx.now());
    if (!live_ || live_->id != cluster_id || live_->head != head_id ||
        n.mode != NodeMode::ClusterHead) {
      ctx.detail("stale", "1");
      return;
    }
    std::vector<SensorReading>& pool = head_pool_[head_id];
    if (pool.empty()) {
      ctx.detail("idle", "1");
    } else {
      // fuse only the freshest complete sweep so one fix has one timestamp
      SimTime latest = pool.front().time;
      for (const SensorReading& r : pool) latest = std::max(latest, r.time);
      std::vector<std::pair<Position, double>> pts;
      for (const SensorReading& r : pool)
        if (r.time == latest && r.strength > 0 && r.fix)
          pts.emplace_back(*r.fix, r.strength);
      if (pts.empty()) {
        ctx.detail("empty", "1");
      } else {
        Position fused = fuse_location(pts);
        Fix fix{latest, fused, pts.size() > 1};
        ctx.detail("fix_t", fix.t, 6);
        ctx.detail("fix_x", fix.pos.x, 12);
        ctx.detail("fix_y", fix.pos.y, 12);
        ctx.detail("n", static_cast<long long>(pts.size()));
        ctx.detail("src", fix.fused ? "fused" : "radar");
        Message up;
        up.kind = MessageKind::TrackUpdate;
        up.from_node = head_id;
        up.fix = fix;
        accrue_energy(n.ledger, scn_.energy, n.mode, 0, 1, 0);
        send_message(ctx, std::move(up));
      }
      pool.clear();
    }
    schedule_fusion_round(ctx.now() + scn_.protocol.fusion_interval, head_id,
                          cluster_id);
  }

  // --- command center ---------------------------------------------------

  void cu_deliver(EventContext& ctx, const Message& m) {
    switch (m.kind) {
      case MessageKind::CuNotify:
        cu_notify(ctx, m);
        break;
      case MessageKind::TrackUpdate:
        cu_track_update(ctx, m);
        break;
      default:
        throw UnknownEventKindError(
            std::string("command center cannot handle ") +
            message_kind_name(m.kind));
    }
  }

  bool is_live_member(int node_id) const {
    return live_ && std::binary_search(live_->members.begin(),
                                       live_->members.end(), node_id);
  }

  void cu_notify(EventContext& ctx, const Message& m) {
    const SensorReading& r = *m.reading;
    ctx.detail("modality", modality_name(r.modality));
    ctx.detail("strength", r.strength, 9);

    if (is_live_member(m.from_node)) live_last_activity_ = ctx.now();

    if (forming_) {
      form_reports_.push_back(r);
    } else if (!live_) {
      forming_ = true;
      form_reports_ = {r};
      ctx.detail("forming", "1");
      sim_.schedule(ctx.now() + scn_.protocol.fusion_interval, "cu",
                    EventKind::Timer,
                    [this](EventContext& c) { formation_close(c); });
    }

    if (handoff_ && std::binary_search(handoff_wake_.begin(),
                                       handoff_wake_.end(), m.from_node))
      handoff_reports_.push_back(r);

    if (r.modality == Modality::Chemical && !confirmed_) confirm(ctx, m);
  }

  void confirm(EventContext& ctx, const Message& m) {
    auto hit = match_signature(m.reading->chem_payload, db_, tolerance_);
    int rec_id;
    std::string how;
    if (hit) {
      rec_id = *hit;
      how = "known";
    } else {
      rec_id = register_unknown(m.reading->chem_payload, db_, tolerance_);
      how = "registered";
    }
    std::string rec_name;
    for (const SignatureRecord& rec : db_)
      if (rec.id == rec_id) rec_name = rec.name;

    // the carrier nearest the reporting node stands in for the out-of-scope
    // camera identification
    std::optional<std::string> key =
        nearest_identity(m.from_node, m.reading->time);
    IdentityResult ident = lookup_identity(key, wl_);
    if (key) mark_brown(*key, rec_name, wl_);

    confirmed_ = Confirmed{rec_id, rec_name, ident};
    ctx.detail("match", how);
    ctx.detail("record", static_cast<long long>(rec_id));
    ctx.detail("name", rec_name);
    ctx.detail("identity", identity_result_name(ident));
    try_escalate(ctx);
  }

  std::optional<std::string> nearest_identity(int node_id, SimTime t) const {
    const NodeState& n = nodes_.at(node_id);
    std::optional<std::string> key;
    double best = std::numeric_limits<double>::infinity();
    for (const Target& tg : scn_.targets) {
      if (t < tg.waypoints.front().t) continue;
      double d = distance(n.pos, position_at(tg, t));
      if (d < best) {
        best = d;
        key = tg.cargo.identity_key;
      }
    }
    return key;
  }

  void try_escalate(EventContext& ctx) {
    if (!confirmed_ || !live_ || !track_) return;
    if (escalated_.count(track_->id)) return;
    escalated_.insert(track_->id);
    Confirmation c{track_->id, confirmed_->record_id, confirmed_->name,
                   confirmed_->identity};
    int track_id = track_->id;
    for (const Alert& a : escalate(c, ctx.now(), live_->id)) {
      Alert alert = a;
      sim_.schedule(ctx.now(), "cu", EventKind::Timer,
                    [alert, track_id](EventContext& c2) {
                      c2.detail("what", "alert");
                      c2.detail("kind", alert_kind_name(alert.kind));
                      c2.detail("zone", static_cast<long long>(alert.zone));
                      c2.detail("track", static_cast<long long>(track_id));
                      c2.detail("details", alert.details);
                    });
    }
  }

  void formation_close(EventContext& ctx) {
    forming_ = false;
    if (live_) {
      ctx.detail("what", "formation-window");
      ctx.detail("skip", "already-live");
      form_reports_.clear();
      return;
    }
    int head = elect_cluster_head(form_reports_);
    std::vector<int> members;
    for (const SensorReading& r : form_reports_) members.push_back(r.node_id);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    form_reports_.clear();

    int cid = next_cluster_id_++;
    live_ = Cluster{cid, head, members, ctx.now()};
    live_last_activity_ = ctx.now();
    track_ = TargetTrack{next_track_id_++, {}, std::nullopt};

    ctx.detail("what", "cluster-formed");
    ctx.detail("cluster", static_cast<long long>(cid));
    ctx.detail("head", static_cast<long long>(head));
    ctx.detail("members", join_ids(members));
    ctx.detail("track", static_cast<long long>(track_->id));

    for (int id : members) send_head_claim(ctx, cid, head, members, id, false);
    schedule_liveness(ctx.now() + scn_.protocol.idle_timeout, cid);
    try_escalate(ctx);
  }

  void send_head_claim(EventContext& ctx, int cluster_id, int head,
                       const std::vector<int>& members, int to, bool release) {
    Message claim;
    claim.kind = MessageKind::HeadClaim;
    claim.to_node = to;
    claim.cluster_id = cluster_id;
    claim.head = head;
    claim.members = members;
    claim.release = release;
    send_message(ctx, std::move(claim));
  }

  void schedule_liveness(SimTime t, int cluster_id) {
    sim_.schedule(t, "cu", EventKind::Timer,
                  [this, cluster_id](EventContext& ctx) {
                    liveness_check(ctx, cluster_id);
                  });
  }

  void liveness_check(EventContext& ctx, int cluster_id) {
    ctx.detail("what", "liveness-check");
    if (!live_ || live_->id != cluster_id) {
      ctx.detail("stale", "1");
      return;
    }
    if (ctx.now() - live_last_activity_ >= scn_.protocol.idle_timeout) {
      dissolve(ctx, "idle");
    } else {
      schedule_liveness(live_last_activity_ + scn_.protocol.idle_timeout,
                        cluster_id);
    }
  }

  void dissolve(EventContext& ctx, const std::string& reason) {
    int cid = live_->id;
    ctx.detail("dissolving", static_cast<long long>(cid));
    sim_.schedule(ctx.now(), "cu", EventKind::Timer,
                  [cid, reason](EventContext& c) {
                    c.detail("what", "cluster-dissolved");
                    c.detail("cluster", static_cast<long long>(cid));
                    c.detail("reason", reason);
                  });
    for (int id : live_->members)
      send_head_claim(ctx, cid, live_->head, live_->members, id, true);
    live_.reset();
    track_.reset();
    handoff_ = false;
    handoff_reports_.clear();
  }

  void cu_track_update(EventContext& ctx, const Message& m) {
    if (!live_ || !track_ || m.from_node != live_->head) {
      ctx.detail("stale", "1");
      return;
    }
    live_last_activity_ = ctx.now();
    const Fix& f = *m.fix;
    ctx.detail("fix_t", f.t, 6);
    ctx.detail("fix_x", f.pos.x, 12);
    ctx.detail("fix_y", f.pos.y, 12);
    if (!track_->fixes.empty() && f.t <= track_->fixes.back().t) {
      ctx.detail("dup", "1");
      return;
    }
    track_->fixes.push_back(f);
    if (track_->fixes.size() < 2) return;

    const Fix& prev = track_->fixes[track_->fixes.size() - 2];
    auto pred = predict_next({prev.t, prev.pos}, {f.t, f.pos});
    track_->predicted = pred;
    ctx.detail("pred_t", pred.first, 6);
    ctx.detail("pred_x", pred.second.x, 12);
    ctx.detail("pred_y", pred.second.y, 12);

    WakeSelection wake =
        select_wake_set(pred.second, field_, scn_.protocol.wake_radius);
    if (wake.track_loss) {
      ctx.detail("track_loss", "1");
      return;
    }
    ctx.detail("wake", join_ids(wake.nodes));

    // successor cluster only when coverage moves past the current membership
    bool covered = std::includes(live_->members.begin(), live_->members.end(),
                                 wake.nodes.begin(), wake.nodes.end());
    if (!handoff_ && !covered) {
      handoff_ = true;
      handoff_wake_ = wake.nodes;
      handoff_reports_.clear();
      ctx.detail("handoff", "1");
      for (int id : wake.nodes) {
        Message wake_cmd;
        wake_cmd.kind = MessageKind::WakeCommand;
        wake_cmd.to_node = id;
        wake_cmd.predicted = pred.second;
        send_message(ctx, std::move(wake_cmd));
      }
      sim_.schedule(ctx.now() + scn_.protocol.fusion_interval, "cu",
                    EventKind::Timer,
                    [this](EventContext& c) { handoff_close(c); });
    }
  }

  void handoff_close(EventContext& ctx) {
    ctx.detail("what", "handoff-window");
    handoff_ = false;
    if (!live_ || !track_) {
      ctx.detail("stale", "1");
      handoff_reports_.clear();
      return;
    }
    if (handoff_reports_.empty()) {
      ctx.detail("kept", "1");
      return;
    }
    int head = elect_cluster_head(handoff_reports_);
    std::vector<int> members;
    for (const SensorReading& r : handoff_reports_) members.push_back(r.node_id);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    handoff_reports_.clear();

    if (head == live_->head && members == live_->members) {
      ctx.detail("kept", "1");
      return;
    }

    int old_id = live_->id;
    std::vector<int> old_members = live_->members;
    int cid = next_cluster_id_++;
    int track_id = track_->id;

    // markers keep the dissolve/re-form pair scannable as separate events
    sim_.schedule(ctx.now(), "cu", EventKind::Timer,
                  [old_id](EventContext& c) {
                    c.detail("what", "cluster-dissolved");
                    c.detail("cluster", static_cast<long long>(old_id));
                    c.detail("reason", "handoff");
                  });
    std::string members_s = join_ids(members);
    sim_.schedule(ctx.now(), "cu", EventKind::Timer,
                  [cid, head, members_s, track_id](EventContext& c) {
                    c.detail("what", "cluster-formed");
                    c.detail("cluster", static_cast<long long>(cid));
                    c.detail("head", static_cast<long long>(head));
                    c.detail("members", members_s);
                    c.detail("track", static_cast<long long>(track_id));
                  });

    for (int id : old_members)
      if (!std::binary_search(members.begin(), members.end(), id))
        send_head_claim(ctx, old_id, live_->head, old_members, id, true);
    for (int id : members) send_head_claim(ctx, cid, head, members, id, false);

    live_ = Cluster{cid, head, members, ctx.now()};
    live_last_activity_ = ctx.now();
    ctx.detail("cluster", static_cast<long long>(cid));
    schedule_liveness(ctx.now() + scn_.protocol.idle_timeout, cid);
  }

  // --- state ------------------------------------------------------------

  struct Confirmed {
    int record_id = 0;
    std::string name;
    IdentityResult identity = IdentityResult::NotListed;
  };

  Scenario scn_;
  RunOptions opts_;
  std::uint64_t seed_;
  double t_end_;
  Simulator sim_;
  PlumeField plume_;
  DeploymentField field_;

  std::map<int, NodeState> nodes_;
  std::map<int, std::vector<SensorReading>> head_pool_;

  SignatureDb db_;
  Watchlist wl_;
  double tolerance_;
  std::optional<Cluster> live_;
  SimTime live_last_activity_ = 0;
  std::optional<TargetTrack> track_;
  std::optional<Confirmed> confirmed_;
  std::set<int> escalated_;
  bool forming_ = false;
  std::vector<SensorReading> form_reports_;
  bool handoff_ = false;
  std::vector<int> handoff_wake_;
  std::vector<SensorReading> handoff_reports_;
  int next_cluster_id_ = 1;
  int next_track_id_ = 1;
};

}  // namespace detail

inline RunResult run_scenario(const Scenario& scn, const RunOptions& opts = {}) {
  detail::Runner runner(scn, opts);
  return runner.run();
}

}  // namespace edass
