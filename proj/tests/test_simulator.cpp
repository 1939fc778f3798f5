#include <doctest.h>

#include "support.hpp"
#include "warpdiff/analysis.hpp"
#include "warpdiff/simulator.hpp"

using namespace warpdiff;
using testsupport::angle_between;

TEST_SUITE_BEGIN("simulator");

TEST_CASE("noiseless generation is exactly proportional") {
  SimProfile profile;
  profile.seed = 42;
  profile.runtime_speeds = {1.0, 2.5, 14.0};
  profile.case_workloads = {0.5, 1.0, 8.0, 0.01};
  profile.noise_sigma = 0.0;

  TimingMatrix m = generate(profile);
  REQUIRE(m.n_cases() == 4);
  REQUIRE(m.n_runtimes() == 3);
  for (std::size_t i = 0; i < m.n_cases(); ++i) {
    for (std::size_t j = 0; j < m.n_runtimes(); ++j) {
      CHECK(m.at(i, j) == profile.case_workloads[i] * profile.runtime_speeds[j]);
    }
  }

  for (const CaseAnalysis& c : rank_cases(m)) {
    CHECK(c.distance < 1e-12);
    CHECK_FALSE(c.located_runtime.has_value());
  }
}

TEST_CASE("generation is deterministic in the profile") {
  SimProfile profile = default_profile(123456789, 30, 5, 0.07);
  TimingMatrix a = generate(profile);
  TimingMatrix b = generate(profile);
  CHECK(a == b);

  profile.seed += 1;
  TimingMatrix c = generate(profile);
  CHECK(a != c);
}

TEST_CASE("noiseless oracle is parallel to the speed vector") {
  SimProfile profile;
  profile.seed = 7;
  profile.runtime_speeds = {1.0, 1.2, 9.0, 13.0, 1.4, 17.0, 2.0};
  profile.case_workloads.assign(50, 0.0);
  for (std::size_t i = 0; i < profile.case_workloads.size(); ++i) {
    profile.case_workloads[i] = 0.01 * double(i + 1);
  }
  profile.noise_sigma = 0.0;

  OracleVector oracle = estimate_oracle(generate(profile));
  std::vector<double> speed_direction = normalize_vector(profile.runtime_speeds);
  CHECK(angle_between(oracle.components, speed_direction) < 1e-12);
}

// Empirical regression bound: with sigma = 0.05, n = 120, k = 7, the largest
// angle between any row's unit vector and the speed direction was 0.1282 rad
// over seeds 1..200. The bound adds ~15% headroom; a noise-model change that
// widens the cluster should trip it.
TEST_CASE("noisy rows cluster around the speed direction") {
  const double kMaxRowAngleBound = 0.147;

  double observed_max = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    SimProfile profile = default_profile(seed, 120, 7, 0.05);
    std::vector<double> direction = normalize_vector(profile.runtime_speeds);
    TimingMatrix m = generate(profile);
    for (std::size_t i = 0; i < m.n_cases(); ++i) {
      observed_max = std::max(observed_max, angle_between(m.row(i), direction));
    }
  }
  CHECK(observed_max < kMaxRowAngleBound);
  CHECK(observed_max > 0.01);  // noise is actually doing something
}

TEST_CASE("inject validates its anomaly") {
  TimingMatrix m = generate(default_profile(5, 6, 3, 0.0));

  CHECK_THROWS_AS(inject(m, {0, 0, 1.0}), Error);   // factor must be > 1
  CHECK_THROWS_AS(inject(m, {0, 0, 0.5}), Error);
  try {
    inject(m, {6, 0, 2.0});
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == errc::index_out_of_range);
  }
  try {
    inject(m, {0, 3, 2.0});
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == errc::index_out_of_range);
  }
}

TEST_CASE("inject touches exactly one cell") {
  TimingMatrix m = generate(default_profile(9, 8, 4, 0.02));
  TimingMatrix one = inject(m, {2, 1, 3.0});
  TimingMatrix two = inject(one, {5, 3, 2.0});

  for (std::size_t i = 0; i < m.n_cases(); ++i) {
    for (std::size_t j = 0; j < m.n_runtimes(); ++j) {
      double expected = m.at(i, j);
      if (i == 2 && j == 1) expected *= 3.0;
      if (i == 5 && j == 3) expected *= 2.0;
      CHECK(two.at(i, j) == expected);
    }
  }
}

TEST_CASE("an injected factor-3 anomaly is located") {
  TimingMatrix m = generate(default_profile(31, 40, 7, 0.05));
  TimingMatrix injected = inject(m, {17, 4, 3.0});

  std::vector<CaseAnalysis> ranking = rank_cases(injected);
  CHECK(ranking[0].case_id == injected.case_ids[17]);
  REQUIRE(ranking[0].located_runtime.has_value());
  CHECK(*ranking[0].located_runtime == injected.runtime_ids[4]);
}

TEST_CASE("split_stages recombines to the total") {
  TimingMatrix m = generate(default_profile(3, 10, 3, 0.05));
  std::vector<std::array<double, 3>> fractions{
      {0.1, 0.3, 0.6}, {0.05, 0.15, 0.8}, {0.2, 0.05, 0.75}};
  auto stages = split_stages(m, fractions);
  REQUIRE(stages.size() == 3);
  for (std::size_t i = 0; i < m.n_cases(); ++i) {
    for (std::size_t j = 0; j < m.n_runtimes(); ++j) {
      double sum = stages.at(Stage::init).at(i, j) + stages.at(Stage::load).at(i, j) +
                   stages.at(Stage::exec).at(i, j);
      CHECK(sum == doctest::Approx(m.at(i, j)).epsilon(1e-12));
    }
  }

  std::vector<std::array<double, 3>> bad{{0.5, 0.3, 0.3}, {1, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(split_stages(m, bad), Error);
}

TEST_CASE("default_profile stays in its documented ranges") {
  SimProfile p = default_profile(77, 120, 7, 0.05);
  CHECK(p.case_workloads.size() == 120);
  CHECK(p.runtime_speeds.size() == 7);
  for (double s : p.runtime_speeds) {
    CHECK(s >= 0.5);
    CHECK(s <= 30.0);
  }
  for (double w : p.case_workloads) {
    CHECK(w >= 0.01);
    CHECK(w <= 10.0);
  }
  CHECK(p == default_profile(77, 120, 7, 0.05));
}

TEST_SUITE_END();
