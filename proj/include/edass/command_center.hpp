#pragma once

// Command-center logic: chemical signature matching against the compound
// database, unknown-compound registration, watchlist identity handling, and
// the staged alert escalation.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sim.hpp"
#include "util.hpp"

namespace edass {

enum class RateClass { High, Low };  // detonating vs deflagrating compounds

inline const char* rate_class_name(RateClass r) {
  return r == RateClass::High ? "high" : "low";
}

struct SignatureRecord {
  int id = 0;  // dense from 1
  std::string name;
  std::vector<double> features;  // one dimension per database
  RateClass rate_class = RateClass::High;
};

using SignatureDb = std::vector<SignatureRecord>;

enum class WatchStatus { Brown, Black };

struct WatchlistEntry {
  std::string identity_key;
  std::string name;
  std::string address;
  WatchStatus status = WatchStatus::Brown;
  std::string details;  // explosive name recorded at observation time
};

using Watchlist = std::vector<WatchlistEntry>;

struct DimensionMismatchError : Error {
  explicit DimensionMismatchError(const std::string& w) : Error(w) {}
};
struct UnconfirmedError : Error {
  explicit UnconfirmedError(const std::string& w) : Error(w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(w) {}
};

inline void require_dimension(const std::vector<double>& observed,
                              const SignatureDb& db) {
  if (!db.empty() && observed.size() != db.front().features.size())
    throw DimensionMismatchError(
        "observed vector has dimension " + std::to_string(observed.size()) +
        ", database uses " + std::to_string(db.front().features.size()));
}

inline double feature_distance(const std::vector<double>& a,
                               const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Nearest record under Euclidean distance; a match requires the minimum
// distance to be within tolerance. Ties resolve to the smallest record id.
// Returns std::nullopt for an unknown compound.
inline std::optional<int> match_signature(const std::vector<double>& observed,
                                          const SignatureDb& db,
                                          double tolerance) {
  require_dimension(observed, db);
  std::optional<int> best_id;
  double best = std::numeric_limits<double>::infinity();
  for (const SignatureRecord& rec : db) {
    double d = feature_distance(observed, rec.features);
    if (d < best || (d == best && best_id && rec.id < *best_id)) {
      best = d;
      best_id = rec.id;
    }
  }
  if (!best_id || best > tolerance) return std::nullopt;
  return best_id;
}

// Appends the observation as a fresh record (id = max + 1, conservative
// high rate class) so the same compound matches from now on. Registering a
// vector that already matches is a caller bug and is rejected loudly.
inline int register_unknown(const std::vector<double>& observed, SignatureDb& db,
                            double tolerance) {
  require_dimension(observed, db);
  if (auto hit = match_signature(observed, db, tolerance))
    throw PreconditionError("observation already matches record " +
                            std::to_string(*hit));
  int id = 1;
  for (const SignatureRecord& rec : db) id = std::max(id, rec.id + 1);
  db.push_back(SignatureRecord{id, "UNKNOWN-" + std::to_string(id), observed,
                               RateClass::High});
  return id;
}

enum class IdentityResult { NotListed, Brown, Black };

inline const char* identity_result_name(IdentityResult r) {
  switch (r) {
    case IdentityResult::NotListed: return "not-listed";
    case IdentityResult::Brown: return "brown";
    case IdentityResult::Black: return "black";
  }
  return "unknown";
}

// Plain table lookup; carriers without an identity key are NotListed.
inline IdentityResult lookup_identity(const std::optional<std::string>& key,
                                      const Watchlist& wl) {
  if (!key) return IdentityResult::NotListed;
  for (const WatchlistEntry& e : wl)
    if (e.identity_key == *key)
      return e.status == WatchStatus::Black ? IdentityResult::Black
                                            : IdentityResult::Brown;
  return IdentityResult::NotListed;
}

// Puts the carrier under observation with the compound that was found.
// Black entries are never downgraded; brown re-marks are idempotent apart
// from recording the latest compound name.
inline void mark_brown(const std::string& key, const std::string& explosive_name,
                       Watchlist& wl) {
  for (WatchlistEntry& e : wl) {
    if (e.identity_key == key) {
      if (e.status == WatchStatus::Black) return;
      e.details = explosive_name;
      return;
    }
  }
  wl.push_back(WatchlistEntry{key, "", "", WatchStatus::Brown, explosive_name});
}

enum class AlertKind {
  TrafficSignalOverride,
  VoiceBroadcast,
  RedZoneDeclared,
  BaseStationReport,
  PoliceNotify
};

inline const char* alert_kind_name(AlertKind k) {
  switch (k) {
    case AlertKind::TrafficSignalOverride: return "TrafficSignalOverride";
    case AlertKind::VoiceBroadcast: return "VoiceBroadcast";
    case AlertKind::RedZoneDeclared: return "RedZoneDeclared";
    case AlertKind::BaseStationReport: return "BaseStationReport";
    case AlertKind::PoliceNotify: return "PoliceNotify";
  }
  return "unknown";
}

struct Alert {
  AlertKind kind;
  SimTime time = 0;
  int zone = 0;  // cluster id that produced the confirmation
  std::string details;
};

// What the escalation needs to know about a confirmed detection.
struct Confirmation {
  int track_id = 0;
  int record_id = 0;
  std::string record_name;
  IdentityResult identity = IdentityResult::NotListed;
};

// Fixed escalation ladder: lock the traffic signals, broadcast, declare the
// red zone, report to the base station (which fans out to the security
// departments). A blacklisted identity prepends the police notification.
// Without a chemical confirmation there is nothing to escalate.
inline std::vector<Alert> escalate(const std::optional<Confirmation>& confirmed,
                                   SimTime t, int zone) {
  if (!confirmed)
    throw UnconfirmedError("escalation requires a chemical confirmation");
  std::vector<Alert> out;
  std::string what = confirmed->record_name;
  if (confirmed->identity == IdentityResult::Black)
    out.push_back(Alert{AlertKind::PoliceNotify, t, zone,
                        "blacklisted carrier with " + what});
  out.push_back(Alert{AlertKind::TrafficSignalOverride, t, zone,
                      "halt inbound traffic"});
  out.push_back(Alert{AlertKind::VoiceBroadcast, t, zone,
                      "evacuation broadcast"});
  out.push_back(Alert{AlertKind::RedZoneDeclared, t, zone,
                      "cluster zone sealed"});
  out.push_back(Alert{AlertKind::BaseStationReport, t, zone,
                      what + " confirmed; security departments notified"});
  return out;
}

// Matching tolerance scaled to the database so scenarios of any feature
// magnitude behave alike: 0.15 times the mean record norm.
inline double default_tolerance(const SignatureDb& db) {
  if (db.empty()) return 0;
  double s = 0;
  for (const SignatureRecord& rec : db) s += l2_norm(rec.features);
  return 0.15 * s / static_cast<double>(db.size());
}

}  // namespace edass
