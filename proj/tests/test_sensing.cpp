#include <catch2/catch_amalgamated.hpp>

#include <edass/sensing.hpp>

using namespace edass;

static Target cargo_target(Position pos) {
  Target t;
  t.id = 1;
  t.waypoints = {{0, pos}};
  return t;
}

TEST_CASE("magnetic sampling ignores non-ferrous cargo") {
  Target t = cargo_target({3, 0});
  t.cargo.ferrous_mass = 0;
  CHECK(!sample_magnetic(1, {0, 0}, t, 0, MagneticConfig{}));
}

TEST_CASE("magnetic strength follows the inverse-cube law") {
  MagneticConfig cfg;
  Target near = cargo_target({2, 0});
  near.cargo.ferrous_mass = 4;
  Target far = cargo_target({4, 0});
  far.cargo.ferrous_mass = 4;
  auto a = sample_magnetic(1, {0, 0}, near, 0, cfg);
  auto b = sample_magnetic(1, {0, 0}, far, 0, cfg);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->strength / b->strength == Catch::Approx(8.0));
  CHECK(a->modality == Modality::Magnetic);
}

TEST_CASE("magnetic range gate cuts off even a huge mass") {
  MagneticConfig cfg;  // max_range 16
  Target t = cargo_target({20, 0});
  t.cargo.ferrous_mass = 1e9;
  CHECK(!sample_magnetic(1, {0, 0}, t, 0, cfg));
}

TEST_CASE("magnetic readings below threshold are suppressed") {
  MagneticConfig cfg;
  Target t = cargo_target({15, 0});
  t.cargo.ferrous_mass = 0.1;  // 40*0.1/15^3 = 0.0012 < 0.05
  CHECK(!sample_magnetic(1, {0, 0}, t, 0, cfg));
}

TEST_CASE("the near-field clamp caps magnetic strength") {
  MagneticConfig cfg;
  Target on_top = cargo_target({0.1, 0});
  on_top.cargo.ferrous_mass = 2;
  Target at_clamp = cargo_target({0.5, 0});
  at_clamp.cargo.ferrous_mass = 2;
  auto a = sample_magnetic(1, {0, 0}, on_top, 0, cfg);
  auto b = sample_magnetic(1, {0, 0}, at_clamp, 0, cfg);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->strength == b->strength);
}

TEST_CASE("chemical sampling needs a chemical vector") {
  RandomSource rng(1);
  Target t = cargo_target({1, 0});
  CHECK(!sample_chemical(1, {0, 0}, t, 0, ChemicalConfig{}, rng));
}

TEST_CASE("noiseless chemical payload equals the cargo vector") {
  ChemicalConfig cfg;
  cfg.noise_sigma = 0;
  RandomSource rng(1);
  Target t = cargo_target({5, 0});
  t.cargo.chemical = std::vector<double>{0.9, 0.1, 0.3, 0.1};
  auto r = sample_chemical(1, {0, 0}, t, 0, cfg, rng);
  REQUIRE(r);
  CHECK(r->chem_payload == std::vector<double>{0.9, 0.1, 0.3, 0.1});
  CHECK(r->strength == Catch::Approx(std::sqrt(0.81 + 0.01 + 0.09 + 0.01)));
  CHECK(r->modality == Modality::Chemical);
}

TEST_CASE("out-of-range chemical sampling emits nothing and draws nothing") {
  ChemicalConfig cfg;  // range 10
  RandomSource rng(7), witness(7);
  Target t = cargo_target({11, 0});
  t.cargo.chemical = std::vector<double>{0.9};
  CHECK(!sample_chemical(1, {0, 0}, t, 0, cfg, rng));
  // no draws were consumed, so the source still matches a fresh one
  CHECK(rng.uniform() == witness.uniform());
}

TEST_CASE("noisy chemical sample mean stays near the configured truth") {
  // component values sit far above zero relative to sigma, so the clamp
  // never bites and the sample mean is an unbiased estimate
  ChemicalConfig cfg;
  cfg.noise_sigma = 0.01;
  std::vector<double> truth{0.9, 0.5, 0.3};
  Target t = cargo_target({5, 0});
  t.cargo.chemical = truth;
  RandomSource rng(4242);
  const int n = 1000;
  std::vector<double> sum(truth.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    auto r = sample_chemical(1, {0, 0}, t, 0, cfg, rng);
    REQUIRE(r);
    for (std::size_t j = 0; j < truth.size(); ++j) sum[j] += r->chem_payload[j];
  }
  for (std::size_t j = 0; j < truth.size(); ++j)
    CHECK(std::abs(sum[j] / n - truth[j]) <
          3 * cfg.noise_sigma / std::sqrt(double(n)));
}

TEST_CASE("gas sampling over a clean field emits nothing") {
  PlumeField plume(100, 100);
  GasConfig cfg;
  cfg.noise_sigma = 0;
  RandomSource rng(1);
  CHECK(!sample_gas(1, {50, 50}, plume, 10, cfg, rng));
}

TEST_CASE("gas sampling honors the plume persistence boundary") {
  PlumeField plume(100, 100);
  plume.feed({50, 50}, 2.0, 100);  // emitter departs after this feed
  GasConfig cfg;
  cfg.noise_sigma = 0;
  RandomSource rng(1);
  auto still_there = sample_gas(1, {50, 50}, plume, 100 + 299, cfg, rng);
  REQUIRE(still_there);
  CHECK(still_there->strength == 2.0);
  CHECK(still_there->modality == Modality::Gas);
  CHECK(!sample_gas(1, {50, 50}, plume, 100 + 301, cfg, rng));
}

TEST_CASE("gas sampling outside the field propagates the error") {
  PlumeField plume(100, 100);
  GasConfig cfg;
  RandomSource rng(1);
  CHECK_THROWS_AS(sample_gas(1, {-5, 50}, plume, 0, cfg, rng), OutOfFieldError);
}

TEST_CASE("radar detects through 9.144 m inclusive and not beyond") {
  RadarConfig cfg;
  RandomSource rng(1);
  Target t9 = cargo_target({9.0, 0});
  CHECK(sample_radar(1, {0, 0}, t9, 0, cfg, rng));
  Target t92 = cargo_target({9.2, 0});
  CHECK(!sample_radar(1, {0, 0}, t92, 0, cfg, rng));
  Target edge = cargo_target({9.144, 0});
  auto r = sample_radar(1, {0, 0}, edge, 0, cfg, rng);
  REQUIRE(r);
  CHECK(r->strength == 0.0);  // linear falloff reaches zero at the boundary
}

TEST_CASE("noiseless radar fixes equal the true position") {
  RadarConfig cfg;
  cfg.fix_noise_sigma = 0;
  RandomSource rng(1);
  Target t = cargo_target({3, 4});
  auto r = sample_radar(1, {0, 0}, t, 0, cfg, rng);
  REQUIRE(r);
  REQUIRE(r->fix);
  CHECK(r->fix->x == 3.0);
  CHECK(r->fix->y == 4.0);
  CHECK(r->strength == Catch::Approx((9.144 - 5.0) / 9.144));
  CHECK(r->modality == Modality::Radar);
}

TEST_CASE("no sampler ever emits below its threshold") {
  RandomSource rng(31337);
  PlumeField plume(200, 200);
  for (int i = 0; i < 500; ++i) {
    Position node{rng.uniform(0, 200), rng.uniform(0, 200)};
    Target t = cargo_target({rng.uniform(0, 200), rng.uniform(0, 200)});
    t.cargo.ferrous_mass = rng.uniform(0, 10);
    t.cargo.chemical =
        std::vector<double>{rng.uniform(0, 1), rng.uniform(0, 1)};
    t.cargo.gas_emission_rate = rng.uniform(0, 3);

    MagneticConfig mc;
    mc.threshold = rng.uniform(0.001, 0.5);
    if (auto r = sample_magnetic(1, node, t, 0, mc))
      REQUIRE(r->strength >= mc.threshold);

    ChemicalConfig cc;
    cc.threshold = rng.uniform(0.01, 1.5);
    cc.noise_sigma = rng.uniform(0, 0.1);
    if (auto r = sample_chemical(1, node, t, 0, cc, rng))
      REQUIRE(r->strength >= cc.threshold);

    feed_plume(plume, t, i, 1);
    GasConfig gc;
    gc.threshold = rng.uniform(0.01, 2.0);
    gc.noise_sigma = rng.uniform(0, 0.1);
    if (auto r = sample_gas(1, node, plume, i, gc, rng))
      REQUIRE(r->strength >= gc.threshold);
  }
}

TEST_CASE("samplers are pure functions of their inputs and rng state") {
  Target t = cargo_target({4, 3});
  t.cargo.ferrous_mass = 5;
  t.cargo.chemical = std::vector<double>{0.6, 0.4};
  RandomSource a(77), b(77);
  auto ra = sample_chemical(1, {0, 0}, t, 0, ChemicalConfig{}, a);
  auto rb = sample_chemical(1, {0, 0}, t, 0, ChemicalConfig{}, b);
  REQUIRE(ra);
  REQUIRE(rb);
  CHECK(ra->chem_payload == rb->chem_payload);
  auto fa = sample_radar(1, {0, 0}, t, 0, RadarConfig{}, a);
  auto fb = sample_radar(1, {0, 0}, t, 0, RadarConfig{}, b);
  REQUIRE(fa);
  REQUIRE(fb);
  CHECK(fa->fix->x == fb->fix->x);
  CHECK(fa->fix->y == fb->fix->y);
}
