#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <edass/metrics.hpp>
#include <edass/scenario.hpp>

using namespace edass;

static Scenario two_node_scenario() {
  return parse_scenario(
      "e-dass-scenario v1\n"
      "[nodes]\n1 10 10\n2 30 10\n"
      "[targets]\ntarget 1\nwaypoint 0 0 10\nwaypoint 40 40 10\nend\n"
      "[run]\nseed 1\nt-end 40\n");
}

TEST_CASE("a quiet trace has no latencies and keeps the energy bill") {
  Scenario scn = two_node_scenario();
  std::string trace =
      "# e-dass-trace v1 seed=1\n"
      "5.000000 node/1 sensor-tick what=guard\n"
      "5.000000 node/2 sensor-tick what=guard\n"
      "40.000000 node/1 timer what=energy-final mode=sleep consumed=0.001200000\n"
      "40.000000 node/2 timer what=energy-final mode=sleep consumed=0.001300000\n";
  MetricsSummary m = compute_metrics(trace, scn);
  CHECK(!m.first_detection_latency);
  CHECK(!m.confirmation_latency);
  CHECK(!m.tracking_rmse);
  CHECK(m.track_loss_count == 0);
  CHECK(m.energy_total == Catch::Approx(0.0025));
  REQUIRE(m.energy_per_node.size() == 2);
  CHECK(m.energy_per_node[0].first == 1);
  CHECK(m.energy_per_node[0].second == Catch::Approx(0.0012));
  CHECK(m.alert_sequence.empty());
  CHECK(format_metrics(m).find("first-detection-latency: none") !=
        std::string::npos);
  CHECK(format_metrics(m).find("alert-sequence: none") != std::string::npos);
}

TEST_CASE("detection and confirmation latencies come from the first hits") {
  Scenario scn = two_node_scenario();
  std::string trace =
      "# e-dass-trace v1 seed=1\n"
      "5.000000 node/1 sensor-tick what=guard\n"
      "10.000000 node/1 sensor-tick what=guard mag=0.5 chem=0.9\n"
      "10.001008 cu message-delivery kind=cu-notify modality=chemical "
      "match=known record=1 name=TNT identity=not-listed\n"
      "15.000000 node/1 sensor-tick what=guard mag=0.4\n";
  MetricsSummary m = compute_metrics(trace, scn);
  REQUIRE(m.first_detection_latency);
  CHECK(*m.first_detection_latency == 10.0);
  REQUIRE(m.confirmation_latency);
  CHECK(*m.confirmation_latency == 10.001008);
}

TEST_CASE("tracking error compares fused fixes against the trajectory") {
  Scenario scn = two_node_scenario();
  // target moves at 1 m/s along y=10; fixes at t=10 and t=20
  std::string exact =
      "# e-dass-trace v1 seed=1\n"
      "10.500000 node/1 timer what=fusion-round fix_t=10.000000 "
      "fix_x=10.000000000000 fix_y=10.000000000000 n=1 src=radar\n"
      "20.500000 node/1 timer what=fusion-round fix_t=20.000000 "
      "fix_x=20.000000000000 fix_y=10.000000000000 n=2 src=fused\n";
  MetricsSummary m = compute_metrics(exact, scn);
  REQUIRE(m.tracking_rmse);
  CHECK(*m.tracking_rmse == 0.0);

  // a 3-4-5 offset on the only fix gives an rmse of exactly 5
  std::string off =
      "# e-dass-trace v1 seed=1\n"
      "10.500000 node/1 timer what=fusion-round fix_t=10.000000 "
      "fix_x=13.000000000000 fix_y=14.000000000000 n=1 src=radar\n";
  m = compute_metrics(off, scn);
  REQUIRE(m.tracking_rmse);
  CHECK(*m.tracking_rmse == Catch::Approx(5.0));
}

TEST_CASE("track losses and alerts are counted off the trace") {
  Scenario scn = two_node_scenario();
  std::string trace =
      "# e-dass-trace v1 seed=1\n"
      "12.000000 cu message-delivery kind=track-update fix_t=11.000000 "
      "fix_x=11.0 fix_y=10.0 pred_t=13.000000 pred_x=13.0 pred_y=10.0 "
      "track_loss=1\n"
      "14.000000 cu timer what=alert kind=TrafficSignalOverride zone=1 track=1\n"
      "14.000000 cu timer what=alert kind=VoiceBroadcast zone=1 track=1\n"
      "14.000000 cu timer what=alert kind=RedZoneDeclared zone=1 track=1\n"
      "14.000000 cu timer what=alert kind=BaseStationReport zone=1 track=1\n";
  MetricsSummary m = compute_metrics(trace, scn);
  CHECK(m.track_loss_count == 1);
  REQUIRE(m.alert_sequence.size() == 4);
  CHECK(m.alert_sequence[0] == AlertKind::TrafficSignalOverride);
  CHECK(m.alert_sequence[3] == AlertKind::BaseStationReport);
  std::string text = format_metrics(m);
  CHECK(text.find("alert-sequence: TrafficSignalOverride,VoiceBroadcast,"
                  "RedZoneDeclared,BaseStationReport") != std::string::npos);
  CHECK(text.find("track-loss-count: 1") != std::string::npos);
}

TEST_CASE("a trace naming unplaced nodes does not belong to the scenario") {
  Scenario scn = two_node_scenario();
  std::string trace =
      "# e-dass-trace v1 seed=1\n"
      "5.000000 node/99 sensor-tick what=guard\n";
  CHECK_THROWS_AS(compute_metrics(trace, scn), MismatchedTraceError);
  CHECK_THROWS_AS(compute_metrics("no header\n", scn), MismatchedTraceError);
  std::string bad_alert =
      "# e-dass-trace v1 seed=1\n"
      "5.000000 cu timer what=alert kind=NotAnAlert\n";
  CHECK_THROWS_AS(compute_metrics(bad_alert, scn), MismatchedTraceError);
}

TEST_CASE("metrics are a pure function of trace and scenario") {
  Scenario scn = two_node_scenario();
  std::string trace =
      "# e-dass-trace v1 seed=1\n"
      "10.000000 node/1 sensor-tick what=guard mag=0.5\n"
      "40.000000 node/1 timer what=energy-final mode=sleep consumed=0.5\n";
  std::string a = format_metrics(compute_metrics(trace, scn));
  std::string b = format_metrics(compute_metrics(trace, scn));
  CHECK(a == b);
}

TEST_CASE("the formatted summary has the documented layout") {
  MetricsSummary m;
  m.first_detection_latency = 5.0;
  m.confirmation_latency = 5.001008;
  m.tracking_rmse = 0.25;
  m.track_loss_count = 2;
  m.energy_per_node = {{1, 0.5}, {2, 0.25}};
  m.energy_total = 0.75;
  m.alert_sequence = {AlertKind::PoliceNotify,
                      AlertKind::TrafficSignalOverride};
  CHECK(format_metrics(m) ==
        "first-detection-latency: 5.000000\n"
        "confirmation-latency: 5.001008\n"
        "tracking-rmse: 0.250000000000\n"
        "track-loss-count: 2\n"
        "energy-total: 0.750000000\n"
        "energy-node-1: 0.500000000\n"
        "energy-node-2: 0.250000000\n"
        "alert-sequence: PoliceNotify,TrafficSignalOverride\n");
}
