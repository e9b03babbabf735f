#pragma once

// Ground truth: the deployment field, target trajectories with cargo, and the
// gas plume a moving emitter leaves behind.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sim.hpp"
#include "util.hpp"

namespace edass {

struct Position {
  double x = 0;
  double y = 0;
};

inline double distance(const Position& a, const Position& b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct NodePlacement {
  int id = 0;
  Position pos;
};

struct DeploymentField {
  double width = 0;
  double height = 0;
  std::vector<NodePlacement> nodes;
};

struct Cargo {
  double ferrous_mass = 0;                      // kg-equivalent scalar
  std::optional<std::vector<double>> chemical;  // compound feature vector
  double gas_emission_rate = 0;                 // concentration units per second
  std::optional<std::string> identity_key;      // opaque carrier identity token
};

struct Waypoint {
  SimTime t = 0;
  Position pos;
};

struct Target {
  int id = 0;
  std::vector<Waypoint> waypoints;  // strictly increasing times, at least one
  Cargo cargo;
};

struct BeforeStartError : Error {
  explicit BeforeStartError(const std::string& w) : Error(w) {}
};
struct OutOfFieldError : Error {
  explicit OutOfFieldError(const std::string& w) : Error(w) {}
};

// Piecewise-linear interpolation between waypoints; the target holds its
// final position forever after the last one.
inline Position position_at(const Target& target, SimTime t) {
  const auto& wp = target.waypoints;
  if (wp.empty() || t < wp.front().t)
    throw BeforeStartError("target " + std::to_string(target.id) +
                           " has no position at t=" + fmt_fixed(t, 6));
  std::size_t i = 0;
  while (i < wp.size() && wp[i].t <= t) ++i;
  if (i == wp.size()) return wp.back().pos;
  const Waypoint& a = wp[i - 1];
  const Waypoint& b = wp[i];
  double f = (t - a.t) / (b.t - a.t);
  return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

// Grid of cells with hold-then-clear persistence: a cell keeps whatever
// concentration it was last fed for `persistence` seconds (boundary
// inclusive) and reads as zero after that. No diffusion or decay.
class PlumeField {
 public:
  PlumeField() = default;
  PlumeField(double width, double height, double cell_size = 2.0,
             double persistence = 300.0)
      : width_(width), height_(height), cell_(cell_size),
        persistence_(persistence) {}

  void feed(const Position& p, double amount, SimTime t) {
    Cell& c = cells_[index(p)];
    // mass that already expired is gone; a new feed must not resurrect it
    if (c.fed && t - c.last_fed > persistence_) c.concentration = 0;
    c.concentration += amount;
    c.last_fed = t;
    c.fed = true;
  }

  double concentration_at(const Position& p, SimTime t) const {
    require_inside(p);
    auto it = cells_.find(index(p));
    if (it == cells_.end() || !it->second.fed) return 0;
    return (t - it->second.last_fed <= persistence_) ? it->second.concentration
                                                     : 0;
  }

  double total_mass(SimTime t) const {
    double m = 0;
    for (const auto& [idx, c] : cells_)
      if (c.fed && t - c.last_fed <= persistence_) m += c.concentration;
    return m;
  }

  double persistence() const { return persistence_; }
  double cell_size() const { return cell_; }

 private:
  struct Cell {
    double concentration = 0;
    SimTime last_fed = 0;
    bool fed = false;
  };

  std::pair<long, long> index(const Position& p) const {
    return {static_cast<long>(std::floor(p.x / cell_)),
            static_cast<long>(std::floor(p.y / cell_))};
  }

  void require_inside(const Position& p) const {
    if (p.x < 0 || p.y < 0 || p.x > width_ || p.y > height_)
      throw OutOfFieldError("position (" + fmt_double(p.x) + ", " +
                            fmt_double(p.y) + ") is outside the field");
  }

  double width_ = 0, height_ = 0;
  double cell_ = 2.0;
  double persistence_ = 300.0;
  std::map<std::pair<long, long>, Cell> cells_;
};

// Deposits one tick's worth of emission into the cell under the target.
// Non-emitting cargo leaves the plume untouched.
inline void feed_plume(PlumeField& plume, const Target& target, SimTime t,
                       double tick_interval) {
  if (target.cargo.gas_emission_rate <= 0) return;
  plume.feed(position_at(target, t),
             target.cargo.gas_emission_rate * tick_interval, t);
}

}  // namespace edass
