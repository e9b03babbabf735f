#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <vector>

#include <edass/command_center.hpp>
#include <edass/sim.hpp>

using namespace edass;

static SignatureDb small_db() {
  return {
      {1, "TNT", {0.9, 0.1, 0.3, 0.1}, RateClass::High},
      {2, "RDX", {0.2, 0.8, 0.4, 0.1}, RateClass::High},
      {3, "ANFO", {0.1, 0.2, 0.9, 0.3}, RateClass::Low},
  };
}

TEST_CASE("an exact feature vector matches its record") {
  SignatureDb db = small_db();
  auto hit = match_signature({0.2, 0.8, 0.4, 0.1}, db, 0.15);
  REQUIRE(hit);
  CHECK(*hit == 2);
}

TEST_CASE("an empty database never matches") {
  SignatureDb db;
  CHECK(!match_signature({0.5, 0.5}, db, 10.0));
}

TEST_CASE("a nearest record outside tolerance is not a match") {
  SignatureDb db = small_db();
  CHECK(!match_signature({0.9, 0.1, 0.3, 0.9}, db, 0.15));
}

TEST_CASE("equidistant records match the smaller id") {
  SignatureDb db = {
      {1, "A", {0.0, 1.0}, RateClass::High},
      {2, "B", {2.0, 1.0}, RateClass::High},
  };
  auto hit = match_signature({1.0, 1.0}, db, 5.0);
  REQUIRE(hit);
  CHECK(*hit == 1);
  // same distances with the records listed in the opposite order
  std::swap(db[0], db[1]);
  hit = match_signature({1.0, 1.0}, db, 5.0);
  REQUIRE(hit);
  CHECK(*hit == 1);
}

TEST_CASE("dimension mismatches are rejected") {
  SignatureDb db = small_db();
  CHECK_THROWS_AS(match_signature({0.5, 0.5}, db, 0.15),
                  DimensionMismatchError);
  CHECK_THROWS_AS(register_unknown({0.5}, db, 0.15), DimensionMismatchError);
}

TEST_CASE("matching agrees with an exhaustive nearest-neighbor scan") {
  RandomSource rng(2468);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 1 + static_cast<int>(rng.uniform(0, 6));
    int n = static_cast<int>(rng.uniform(0, 20));
    SignatureDb db;
    for (int i = 0; i < n; ++i) {
      SignatureRecord rec;
      rec.id = i + 1;
      rec.name = "R" + std::to_string(i + 1);
      for (int j = 0; j < dim; ++j)
        rec.features.push_back(rng.uniform(0, 1));
      db.push_back(rec);
    }
    std::vector<double> q;
    for (int j = 0; j < dim; ++j) q.push_back(rng.uniform(0, 1));
    double tol = rng.uniform(0, 1.2);

    std::optional<int> expect;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : db) {
      double d = feature_distance(q, rec.features);
      if (d < best) {
        best = d;
        expect = rec.id;
      }
    }
    if (expect && best > tol) expect.reset();
    CHECK(match_signature(q, db, tol) == expect);
  }
}

TEST_CASE("a match at some tolerance still matches at any larger one") {
  RandomSource rng(1357);
  SignatureDb db = small_db();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q;
    for (int j = 0; j < 4; ++j) q.push_back(rng.uniform(0, 1));
    double tol = rng.uniform(0, 0.8);
    auto hit = match_signature(q, db, tol);
    if (hit) {
      auto wider = match_signature(q, db, tol + rng.uniform(0, 2));
      REQUIRE(wider);
      CHECK(*wider == *hit);
    }
  }
}

TEST_CASE("registration appends a dense-id high-rate record") {
  SignatureDb db = small_db();
  int id = register_unknown({0.5, 0.5, 0.5, 0.5}, db, 0.15);
  CHECK(id == 4);
  REQUIRE(db.size() == 4);
  CHECK(db.back().name == "UNKNOWN-4");
  CHECK(db.back().rate_class == RateClass::High);
}

TEST_CASE("a registered compound matches on the next observation") {
  SignatureDb db = small_db();
  std::vector<double> v{0.55, 0.45, 0.6, 0.7};
  REQUIRE(!match_signature(v, db, 0.15));
  int id = register_unknown(v, db, 0.15);
  auto hit = match_signature(v, db, 0.15);
  REQUIRE(hit);
  CHECK(*hit == id);
}

TEST_CASE("registering an already-matching vector is a surfaced bug") {
  SignatureDb db = small_db();
  std::vector<double> v{0.55, 0.45, 0.6, 0.7};
  register_unknown(v, db, 0.15);
  CHECK_THROWS_AS(register_unknown(v, db, 0.15), PreconditionError);
}

TEST_CASE("identity lookups read the watchlist") {
  Watchlist wl = {
      {"K-1", "A", "addr", WatchStatus::Brown, ""},
      {"K-2", "B", "addr", WatchStatus::Black, ""},
  };
  CHECK(lookup_identity(std::nullopt, wl) == IdentityResult::NotListed);
  CHECK(lookup_identity(std::string("K-9"), wl) == IdentityResult::NotListed);
  CHECK(lookup_identity(std::string("K-1"), wl) == IdentityResult::Brown);
  CHECK(lookup_identity(std::string("K-2"), wl) == IdentityResult::Black);
}

TEST_CASE("marking brown creates, updates, and never downgrades") {
  Watchlist wl;
  mark_brown("K-5", "TNT", wl);
  REQUIRE(wl.size() == 1);
  CHECK(wl[0].status == WatchStatus::Brown);
  CHECK(wl[0].details == "TNT");

  mark_brown("K-5", "RDX", wl);  // idempotent apart from the compound name
  REQUIRE(wl.size() == 1);
  CHECK(wl[0].status == WatchStatus::Brown);
  CHECK(wl[0].details == "RDX");

  wl.push_back({"K-6", "B", "addr", WatchStatus::Black, "old"});
  mark_brown("K-6", "TNT", wl);
  CHECK(wl[1].status == WatchStatus::Black);
  CHECK(wl[1].details == "old");
}

TEST_CASE("black status is absorbing under any op sequence") {
  RandomSource rng(86);
  for (int trial = 0; trial < 50; ++trial) {
    Watchlist wl = {{"K", "X", "addr", WatchStatus::Black, ""}};
    for (int i = 0; i < 40; ++i) {
      mark_brown(rng.uniform() < 0.5 ? "K" : "other", "C", wl);
      REQUIRE(lookup_identity(std::string("K"), wl) == IdentityResult::Black);
    }
  }
}

TEST_CASE("escalation runs the fixed ladder for an unlisted identity") {
  Confirmation c{1, 1, "TNT", IdentityResult::NotListed};
  auto alerts = escalate(c, 12.5, 3);
  REQUIRE(alerts.size() == 4);
  CHECK(alerts[0].kind == AlertKind::TrafficSignalOverride);
  CHECK(alerts[1].kind == AlertKind::VoiceBroadcast);
  CHECK(alerts[2].kind == AlertKind::RedZoneDeclared);
  CHECK(alerts[3].kind == AlertKind::BaseStationReport);
  for (const Alert& a : alerts) {
    CHECK(a.time == 12.5);
    CHECK(a.zone == 3);
  }
}

TEST_CASE("a blacklisted identity prepends the police notification") {
  Confirmation c{1, 2, "RDX", IdentityResult::Black};
  auto alerts = escalate(c, 1, 9);
  REQUIRE(alerts.size() == 5);
  CHECK(alerts[0].kind == AlertKind::PoliceNotify);
  CHECK(alerts[1].kind == AlertKind::TrafficSignalOverride);
  CHECK(alerts[4].kind == AlertKind::BaseStationReport);
}

TEST_CASE("a brown identity does not trigger the police notification") {
  Confirmation c{1, 2, "RDX", IdentityResult::Brown};
  CHECK(escalate(c, 1, 9).size() == 4);
}

TEST_CASE("escalating without a chemical confirmation is an error") {
  CHECK_THROWS_AS(escalate(std::nullopt, 0, 1), UnconfirmedError);
}

TEST_CASE("the default tolerance scales with the database") {
  SignatureDb db = small_db();
  double mean_norm = (l2_norm(db[0].features) + l2_norm(db[1].features) +
                      l2_norm(db[2].features)) /
                     3.0;
  CHECK(default_tolerance(db) == Catch::Approx(0.15 * mean_norm));
  CHECK(default_tolerance({}) == 0.0);
}
