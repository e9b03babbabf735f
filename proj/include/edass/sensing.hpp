#pragma once

// Sensor models: pure functions from ground truth to an optional reading.
// A reading is only emitted when its strength clears the modality threshold,
// so downstream code never sees sub-threshold samples.

#include <algorithm>
#include <optional>
#include <vector>

#include "sim.hpp"
#include "world.hpp"

namespace edass {

enum class Modality { Magnetic, Chemical, Gas, Radar };

inline const char* modality_name(Modality m) {
  switch (m) {
    case Modality::Magnetic: return "magnetic";
    case Modality::Chemical: return "chemical";
    case Modality::Gas: return "gas";
    case Modality::Radar: return "radar";
  }
  return "unknown";
}

struct SensorReading {
  int node_id = 0;
  SimTime time = 0;
  Modality modality = Modality::Magnetic;
  double strength = 0;              // flux | match intensity | concentration | SNR proxy
  std::vector<double> chem_payload; // chemical only
  std::optional<Position> fix;      // radar only
};

struct MagneticConfig {
  double moment_scale = 40;
  double threshold = 0.05;
  double max_range = 16;  // meters
};

struct ChemicalConfig {
  double range = 10;  // meters
  double noise_sigma = 0.01;
  double threshold = 0.2;
};

struct GasConfig {
  double threshold = 0.5;
  double noise_sigma = 0.01;
};

struct RadarConfig {
  double range = 9.144;  // meters, 30 ft
  double fix_noise_sigma = 0.1;
  double period = 1.0;  // seconds between active-mode sweeps
};

struct SensorConfig {
  MagneticConfig magnetic;
  ChemicalConfig chemical;
  GasConfig gas;
  RadarConfig radar;
};

// Point-dipole falloff: strength = scale * mass / d^3, with d clamped at
// 0.5 m so a target sitting on the node does not blow up the math.
inline std::optional<SensorReading> sample_magnetic(int node_id,
                                                    const Position& node_pos,
                                                    const Target& target,
                                                    SimTime t,
                                                    const MagneticConfig& cfg) {
  if (target.cargo.ferrous_mass <= 0) return std::nullopt;
  double d = std::max(distance(node_pos, position_at(target, t)), 0.5);
  double strength = cfg.moment_scale * target.cargo.ferrous_mass / (d * d * d);
  if (strength < cfg.threshold || d > cfg.max_range) return std::nullopt;
  return SensorReading{node_id, t, Modality::Magnetic, strength, {}, std::nullopt};
}

// In range, the payload is the cargo's feature vector plus per-component
// Gaussian noise clamped at zero; strength is the payload magnitude.
inline std::optional<SensorReading> sample_chemical(int node_id,
                                                    const Position& node_pos,
                                                    const Target& target,
                                                    SimTime t,
                                                    const ChemicalConfig& cfg,
                                                    RandomSource& rng) {
  if (!target.cargo.chemical) return std::nullopt;
  if (distance(node_pos, position_at(target, t)) > cfg.range)
    return std::nullopt;
  std::vector<double> payload = *target.cargo.chemical;
  for (double& c : payload) c = std::max(0.0, c + rng.normal(0, cfg.noise_sigma));
  double strength = l2_norm(payload);
  if (strength < cfg.threshold) return std::nullopt;
  return SensorReading{node_id, t, Modality::Chemical, strength,
                       std::move(payload), std::nullopt};
}

// Reads the plume cell under the node. Out-of-field positions propagate the
// field error rather than reading as zero.
inline std::optional<SensorReading> sample_gas(int node_id,
                                               const Position& node_pos,
                                               const PlumeField& plume,
                                               SimTime t, const GasConfig& cfg,
                                               RandomSource& rng) {
  double c = plume.concentration_at(node_pos, t) + rng.normal(0, cfg.noise_sigma);
  c = std::max(0.0, c);
  if (c < cfg.threshold) return std::nullopt;
  return SensorReading{node_id, t, Modality::Gas, c, {}, std::nullopt};
}

// Detection boundary is inclusive at exactly the configured range; the fix is
// the true position plus independent 2-D noise, and strength falls off
// linearly from 1 at zero range to 0 at the boundary.
inline std::optional<SensorReading> sample_radar(int node_id,
                                                 const Position& node_pos,
                                                 const Target& target, SimTime t,
                                                 const RadarConfig& cfg,
                                                 RandomSource& rng) {
  Position truth = position_at(target, t);
  double d = distance(node_pos, truth);
  if (d > cfg.range) return std::nullopt;
  Position fix{truth.x + rng.normal(0, cfg.fix_noise_sigma),
               truth.y + rng.normal(0, cfg.fix_noise_sigma)};
  double strength = (cfg.range - d) / cfg.range;
  return SensorReading{node_id, t, Modality::Radar, strength, {}, fix};
}

}  // namespace edass
