#pragma once

// Scenario files: a line-oriented, versioned text format that fully
// determines a run. Parsing is strict (every problem is reported with a line
// number or a field path) and parse -> serialize -> parse round-trips to an
// equivalent scenario.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "command_center.hpp"
#include "protocol.hpp"
#include "sensing.hpp"
#include "world.hpp"

namespace edass {

struct SyntaxError : Error {
  int line;
  SyntaxError(int line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

struct InvariantViolationError : Error {
  std::string field;
  std::string reason;
  InvariantViolationError(const std::string& f, const std::string& r)
      : Error(f + ": " + r), field(f), reason(r) {}
};

struct PlumeParams {
  double cell_size = 2;
  double persistence = 300;
  double feed_period = 1;  // emitter deposit cadence
};

struct RunParams {
  std::uint64_t seed = 0;
  bool seed_set = false;  // the seed is mandatory; defaults would hide replay bugs
  double t_end = 600;
  std::optional<double> tolerance;  // signature matching; defaulted from the db
};

struct Scenario {
  double width = 200;
  double height = 200;
  std::vector<NodePlacement> nodes;
  SensorConfig sensors;
  EnergyRates energy;
  LinkParams link;
  ProtocolParams protocol;
  PlumeParams plume;
  SignatureDb signatures;
  Watchlist watchlist;
  std::vector<Target> targets;
  RunParams run;

  DeploymentField field() const { return {width, height, nodes}; }
  double tolerance_value() const {
    return run.tolerance ? *run.tolerance : default_tolerance(signatures);
  }
};

namespace detail {

// whitespace-splits a line; double quotes group a token, no escape sequences
inline std::vector<std::string> tokenize(const std::string& line, int line_no) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    if (line[i] == '"') {
      std::size_t end = line.find('"', i + 1);
      if (end == std::string::npos)
        throw SyntaxError(line_no, "unterminated quote");
      out.push_back(line.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      std::size_t end = i;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      out.push_back(line.substr(i, end - i));
      i = end;
    }
  }
  return out;
}

inline double parse_num(const std::string& tok, int line_no) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw SyntaxError(line_no, "expected a number, got '" + tok + "'");
  return v;
}

inline long long parse_int(const std::string& tok, int line_no) {
  char* end = nullptr;
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw SyntaxError(line_no, "expected an integer, got '" + tok + "'");
  return v;
}

}  // namespace detail

inline void validate_scenario(const Scenario& s) {
  auto bad = [](const std::string& field, const std::string& reason) {
    throw InvariantViolationError(field, reason);
  };

  if (s.width <= 0 || s.height <= 0) bad("field", "dimensions must be positive");

  std::set<int> node_ids;
  for (const NodePlacement& n : s.nodes) {
    if (!node_ids.insert(n.id).second)
      bad("nodes.id=" + std::to_string(n.id), "duplicate node id");
    if (n.pos.x < 0 || n.pos.x > s.width || n.pos.y < 0 || n.pos.y > s.height)
      bad("nodes.id=" + std::to_string(n.id), "position outside the field");
  }

  const SensorConfig& sc = s.sensors;
  if (sc.magnetic.threshold <= 0 || sc.chemical.threshold <= 0 ||
      sc.gas.threshold <= 0)
    bad("sensors", "thresholds must be positive");
  if (sc.magnetic.max_range < 0 || sc.chemical.range < 0 || sc.radar.range < 0)
    bad("sensors", "ranges must be non-negative");
  if (sc.chemical.noise_sigma < 0 || sc.gas.noise_sigma < 0 ||
      sc.radar.fix_noise_sigma < 0)
    bad("sensors", "noise sigmas must be non-negative");
  if (sc.radar.period <= 0) bad("sensors.radar.period", "must be positive");

  if (!(s.energy.sleep_w < s.energy.active_w &&
        s.energy.active_w < s.energy.head_w))
    bad("energy", "rates must increase: sleep < active < head");
  if (s.energy.tx_j < 0 || s.energy.sample_j < 0)
    bad("energy", "per-event costs must be non-negative");

  if (s.link.up_bps <= 0 || s.link.down_bps <= 0)
    bad("link", "bit rates must be positive");
  if (s.link.propagation < 0) bad("link.propagation", "must be non-negative");
  if (s.link.drop_prob < 0 || s.link.drop_prob > 1)
    bad("link.drop-prob", "must be within [0, 1]");

  const ProtocolParams& p = s.protocol;
  if (p.guard_period <= 0 || p.idle_timeout <= 0 || p.gas_period <= 0 ||
      p.gas_duration <= 0 || p.fusion_interval <= 0)
    bad("protocol", "all periods must be positive");
  if (p.wake_radius <= 0) bad("protocol.wake-radius", "must be positive");

  if (s.plume.cell_size <= 0) bad("plume.cell-size", "must be positive");
  if (s.plume.persistence <= 0) bad("plume.persistence", "must be positive");
  if (s.plume.feed_period <= 0) bad("plume.feed-period", "must be positive");

  std::size_t dim = 0;
  for (std::size_t i = 0; i < s.signatures.size(); ++i) {
    const SignatureRecord& rec = s.signatures[i];
    if (rec.id != static_cast<int>(i) + 1)
      bad("signatures.id=" + std::to_string(rec.id),
          "record ids must be dense from 1 in order");
    if (rec.features.empty())
      bad("signatures.id=" + std::to_string(rec.id), "empty feature vector");
    if (i == 0)
      dim = rec.features.size();
    else if (rec.features.size() != dim)
      bad("signatures.id=" + std::to_string(rec.id),
          "feature dimension differs from the first record");
    for (double f : rec.features)
      if (f < 0)
        bad("signatures.id=" + std::to_string(rec.id),
            "features must be non-negative");
  }

  std::set<std::string> keys;
  for (const WatchlistEntry& e : s.watchlist)
    if (!keys.insert(e.identity_key).second)
      bad("watchlist.key=" + e.identity_key, "duplicate identity key");

  std::set<int> target_ids;
  for (const Target& t : s.targets) {
    std::string f = "targets.id=" + std::to_string(t.id);
    if (!target_ids.insert(t.id).second) bad(f, "duplicate target id");
    if (t.waypoints.empty()) bad(f, "needs at least one waypoint");
    for (std::size_t i = 1; i < t.waypoints.size(); ++i)
      if (t.waypoints[i].t <= t.waypoints[i - 1].t)
        bad(f, "waypoint times must be strictly increasing");
    if (t.cargo.ferrous_mass < 0) bad(f, "ferrous mass must be non-negative");
    if (t.cargo.gas_emission_rate < 0)
      bad(f, "gas emission rate must be non-negative");
    if (t.cargo.chemical) {
      if (t.cargo.chemical->empty()) bad(f, "empty chemical vector");
      for (double c : *t.cargo.chemical)
        if (c < 0) bad(f, "chemical components must be non-negative");
    }
  }

  if (!s.run.seed_set) bad("run.seed", "required");
  if (s.run.t_end < 0) bad("run.t-end", "must be non-negative");
  if (s.run.tolerance && *s.run.tolerance < 0)
    bad("run.tolerance", "must be non-negative");
}

inline Scenario parse_scenario(const std::string& text) {
  using detail::parse_int;
  using detail::parse_num;
  using detail::tokenize;

  Scenario s;
  std::string section;
  bool saw_header = false;
  std::optional<Target> open_target;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                               : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::size_t a = raw.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = raw.find_last_not_of(" \t\r");
    std::string line = raw.substr(a, b - a + 1);
    if (line.empty() || line[0] == '#') continue;

    if (!saw_header) {
      if (line != "e-dass-scenario v1")
        throw SyntaxError(line_no, "expected header 'e-dass-scenario v1'");
      saw_header = true;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']')
        throw SyntaxError(line_no, "unterminated section name");
      if (open_target)
        throw SyntaxError(line_no, "section change inside a target block");
      section = line.substr(1, line.size() - 2);
      static const std::set<std::string> known{
          "field", "plume", "nodes", "sensors", "energy", "link",
          "protocol", "signatures", "watchlist", "targets", "run"};
      if (!known.count(section))
        throw SyntaxError(line_no, "unknown section [" + section + "]");
      continue;
    }

    std::vector<std::string> tok = tokenize(line, line_no);
    if (tok.empty()) continue;

    if (section == "field") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      if (tok[0] == "width") s.width = parse_num(tok[1], line_no);
      else if (tok[0] == "height") s.height = parse_num(tok[1], line_no);
      else throw SyntaxError(line_no, "unknown field key '" + tok[0] + "'");
    } else if (section == "plume") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      if (tok[0] == "cell-size") s.plume.cell_size = parse_num(tok[1], line_no);
      else if (tok[0] == "persistence") s.plume.persistence = parse_num(tok[1], line_no);
      else if (tok[0] == "feed-period") s.plume.feed_period = parse_num(tok[1], line_no);
      else throw SyntaxError(line_no, "unknown plume key '" + tok[0] + "'");
    } else if (section == "nodes") {
      if (tok.size() != 3)
        throw SyntaxError(line_no, "expected 'id x y'");
      NodePlacement n;
      n.id = static_cast<int>(parse_int(tok[0], line_no));
      n.pos = {parse_num(tok[1], line_no), parse_num(tok[2], line_no)};
      s.nodes.push_back(n);
    } else if (section == "sensors") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      double v = parse_num(tok[1], line_no);
      const std::string& k = tok[0];
      SensorConfig& sc = s.sensors;
      if (k == "magnetic.moment-scale") sc.magnetic.moment_scale = v;
      else if (k == "magnetic.threshold") sc.magnetic.threshold = v;
      else if (k == "magnetic.max-range") sc.magnetic.max_range = v;
      else if (k == "chemical.range") sc.chemical.range = v;
      else if (k == "chemical.noise-sigma") sc.chemical.noise_sigma = v;
      else if (k == "chemical.threshold") sc.chemical.threshold = v;
      else if (k == "gas.threshold") sc.gas.threshold = v;
      else if (k == "gas.noise-sigma") sc.gas.noise_sigma = v;
      else if (k == "radar.range") sc.radar.range = v;
      else if (k == "radar.fix-noise-sigma") sc.radar.fix_noise_sigma = v;
      else if (k == "radar.period") sc.radar.period = v;
      else throw SyntaxError(line_no, "unknown sensor key '" + k + "'");
    } else if (section == "energy") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      double v = parse_num(tok[1], line_no);
      if (tok[0] == "sleep-w") s.energy.sleep_w = v;
      else if (tok[0] == "active-w") s.energy.active_w = v;
      else if (tok[0] == "head-w") s.energy.head_w = v;
      else if (tok[0] == "tx-j") s.energy.tx_j = v;
      else if (tok[0] == "sample-j") s.energy.sample_j = v;
      else throw SyntaxError(line_no, "unknown energy key '" + tok[0] + "'");
    } else if (section == "link") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      double v = parse_num(tok[1], line_no);
      if (tok[0] == "up-bps") s.link.up_bps = v;
      else if (tok[0] == "down-bps") s.link.down_bps = v;
      else if (tok[0] == "propagation") s.link.propagation = v;
      else if (tok[0] == "drop-prob") s.link.drop_prob = v;
      else throw SyntaxError(line_no, "unknown link key '" + tok[0] + "'");
    } else if (section == "protocol") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      double v = parse_num(tok[1], line_no);
      ProtocolParams& p = s.protocol;
      if (tok[0] == "guard-period") p.guard_period = v;
      else if (tok[0] == "idle-timeout") p.idle_timeout = v;
      else if (tok[0] == "gas-period") p.gas_period = v;
      else if (tok[0] == "gas-duration") p.gas_duration = v;
      else if (tok[0] == "fusion-interval") p.fusion_interval = v;
      else if (tok[0] == "wake-radius") p.wake_radius = v;
      else throw SyntaxError(line_no, "unknown protocol key '" + tok[0] + "'");
    } else if (section == "signatures") {
      if (tok.size() < 4)
        throw SyntaxError(line_no, "expected 'id name rate-class features...'");
      SignatureRecord rec;
      rec.id = static_cast<int>(parse_int(tok[0], line_no));
      rec.name = tok[1];
      if (tok[2] == "high") rec.rate_class = RateClass::High;
      else if (tok[2] == "low") rec.rate_class = RateClass::Low;
      else throw SyntaxError(line_no, "rate class must be 'high' or 'low'");
      for (std::size_t i = 3; i < tok.size(); ++i)
        rec.features.push_back(parse_num(tok[i], line_no));
      s.signatures.push_back(std::move(rec));
    } else if (section == "watchlist") {
      if (tok.size() != 4)
        throw SyntaxError(line_no, "expected 'key name address status'");
      WatchlistEntry e;
      e.identity_key = tok[0];
      e.name = tok[1];
      e.address = tok[2];
      if (tok[3] == "brown") e.status = WatchStatus::Brown;
      else if (tok[3] == "black") e.status = WatchStatus::Black;
      else throw SyntaxError(line_no, "status must be 'brown' or 'black'");
      s.watchlist.push_back(std::move(e));
    } else if (section == "targets") {
      if (tok[0] == "target") {
        if (open_target)
          throw SyntaxError(line_no, "previous target block is missing 'end'");
        if (tok.size() != 2) throw SyntaxError(line_no, "expected 'target id'");
        open_target = Target{};
        open_target->id = static_cast<int>(parse_int(tok[1], line_no));
      } else if (!open_target) {
        throw SyntaxError(line_no, "expected a 'target <id>' block");
      } else if (tok[0] == "end") {
        s.targets.push_back(std::move(*open_target));
        open_target.reset();
      } else if (tok[0] == "ferrous-mass") {
        if (tok.size() != 2) throw SyntaxError(line_no, "expected one value");
        open_target->cargo.ferrous_mass = parse_num(tok[1], line_no);
      } else if (tok[0] == "gas-rate") {
        if (tok.size() != 2) throw SyntaxError(line_no, "expected one value");
        open_target->cargo.gas_emission_rate = parse_num(tok[1], line_no);
      } else if (tok[0] == "identity-key") {
        if (tok.size() != 2) throw SyntaxError(line_no, "expected one token");
        open_target->cargo.identity_key = tok[1];
      } else if (tok[0] == "chemical") {
        if (tok.size() < 2) throw SyntaxError(line_no, "expected components");
        std::vector<double> v;
        for (std::size_t i = 1; i < tok.size(); ++i)
          v.push_back(parse_num(tok[i], line_no));
        open_target->cargo.chemical = std::move(v);
      } else if (tok[0] == "waypoint") {
        if (tok.size() != 4) throw SyntaxError(line_no, "expected 't x y'");
        Waypoint w;
        w.t = parse_num(tok[1], line_no);
        w.pos = {parse_num(tok[2], line_no), parse_num(tok[3], line_no)};
        open_target->waypoints.push_back(w);
      } else {
        throw SyntaxError(line_no, "unknown target key '" + tok[0] + "'");
      }
    } else if (section == "run") {
      if (tok.size() != 2) throw SyntaxError(line_no, "expected 'key value'");
      if (tok[0] == "seed") {
        long long v = parse_int(tok[1], line_no);
        if (v < 0) throw SyntaxError(line_no, "seed must be non-negative");
        s.run.seed = static_cast<std::uint64_t>(v);
        s.run.seed_set = true;
      } else if (tok[0] == "t-end") {
        s.run.t_end = parse_num(tok[1], line_no);
      } else if (tok[0] == "tolerance") {
        s.run.tolerance = parse_num(tok[1], line_no);
      } else {
        throw SyntaxError(line_no, "unknown run key '" + tok[0] + "'");
      }
    } else {
      throw SyntaxError(line_no, "content before any [section]");
    }
  }

  if (!saw_header) throw SyntaxError(line_no, "missing scenario header");
  if (open_target)
    throw SyntaxError(line_no, "target block is missing 'end'");

  validate_scenario(s);
  return s;
}

inline std::string serialize_scenario(const Scenario& s) {
  std::string out = "e-dass-scenario v1\n";
  auto kv = [&out](const std::string& k, double v) {
    out += k;
    out += ' ';
    out += fmt_double(v);
    out += '\n';
  };
  auto quoted = [](const std::string& v) {
    return v.find(' ') == std::string::npos && !v.empty() ? v : '"' + v + '"';
  };

  out += "\n[field]\n";
  kv("width", s.width);
  kv("height", s.height);

  out += "\n[plume]\n";
  kv("cell-size", s.plume.cell_size);
  kv("persistence", s.plume.persistence);
  kv("feed-period", s.plume.feed_period);

  out += "\n[nodes]\n";
  for (const NodePlacement& n : s.nodes)
    out += std::to_string(n.id) + " " + fmt_double(n.pos.x) + " " +
           fmt_double(n.pos.y) + "\n";

  out += "\n[sensors]\n";
  kv("magnetic.moment-scale", s.sensors.magnetic.moment_scale);
  kv("magnetic.threshold", s.sensors.magnetic.threshold);
  kv("magnetic.max-range", s.sensors.magnetic.max_range);
  kv("chemical.range", s.sensors.chemical.range);
  kv("chemical.noise-sigma", s.sensors.chemical.noise_sigma);
  kv("chemical.threshold", s.sensors.chemical.threshold);
  kv("gas.threshold", s.sensors.gas.threshold);
  kv("gas.noise-sigma", s.sensors.gas.noise_sigma);
  kv("radar.range", s.sensors.radar.range);
  kv("radar.fix-noise-sigma", s.sensors.radar.fix_noise_sigma);
  kv("radar.period", s.sensors.radar.period);

  out += "\n[energy]\n";
  kv("sleep-w", s.energy.sleep_w);
  kv("active-w", s.energy.active_w);
  kv("head-w", s.energy.head_w);
  kv("tx-j", s.energy.tx_j);
  kv("sample-j", s.energy.sample_j);

  out += "\n[link]\n";
  kv("up-bps", s.link.up_bps);
  kv("down-bps", s.link.down_bps);
  kv("propagation", s.link.propagation);
  kv("drop-prob", s.link.drop_prob);

  out += "\n[protocol]\n";
  kv("guard-period", s.protocol.guard_period);
  kv("idle-timeout", s.protocol.idle_timeout);
  kv("gas-period", s.protocol.gas_period);
  kv("gas-duration", s.protocol.gas_duration);
  kv("fusion-interval", s.protocol.fusion_interval);
  kv("wake-radius", s.protocol.wake_radius);

  if (!s.signatures.empty()) {
    out += "\n[signatures]\n";
    for (const SignatureRecord& rec : s.signatures) {
      out += std::to_string(rec.id) + " " + quoted(rec.name) + " " +
             rate_class_name(rec.rate_class);
      for (double f : rec.features) out += " " + fmt_double(f);
      out += '\n';
    }
  }

  if (!s.watchlist.empty()) {
    out += "\n[watchlist]\n";
    for (const WatchlistEntry& e : s.watchlist)
      out += quoted(e.identity_key) + " " + quoted(e.name) + " " +
             quoted(e.address) + " " +
             (e.status == WatchStatus::Black ? "black\n" : "brown\n");
  }

  if (!s.targets.empty()) {
    out += "\n[targets]\n";
    for (const Target& t : s.targets) {
      out += "target " + std::to_string(t.id) + "\n";
      if (t.cargo.ferrous_mass != 0)
        out += "  ferrous-mass " + fmt_double(t.cargo.ferrous_mass) + "\n";
      if (t.cargo.chemical) {
        out += "  chemical";
        for (double c : *t.cargo.chemical) out += " " + fmt_double(c);
        out += '\n';
      }
      if (t.cargo.gas_emission_rate != 0)
        out += "  gas-rate " + fmt_double(t.cargo.gas_emission_rate) + "\n";
      if (t.cargo.identity_key)
        out += "  identity-key " + quoted(*t.cargo.identity_key) + "\n";
      for (const Waypoint& w : t.waypoints)
        out += "  waypoint " + fmt_double(w.t) + " " + fmt_double(w.pos.x) +
               " " + fmt_double(w.pos.y) + "\n";
      out += "end\n";
    }
  }

  out += "\n[run]\n";
  out += "seed " + std::to_string(s.run.seed) + "\n";
  kv("t-end", s.run.t_end);
  if (s.run.tolerance) kv("tolerance", *s.run.tolerance);

  return out;
}

}  // namespace edass
