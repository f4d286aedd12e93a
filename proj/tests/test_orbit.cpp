#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "coop2/error.hpp"
#include "coop2/models.hpp"
#include "coop2/orbit.hpp"

using namespace coop2;
using namespace coop2::orbit;

using fixtures::basin_samples;
using fixtures::example2;
using fixtures::example3;
using fixtures::preset_settings;

TEST_CASE("Goodwin preset converges to a periodic orbit with the oracle period") {
  const Model m = example2();
  const auto e = models::goodwin_equilibrium(m).e;
  const auto r = classify(m, e, Vector::Constant(4, 0.1), preset_settings(m));
  REQUIRE(r.verdict == Verdict::PeriodicOrbit);
  CHECK(r.basin_tag == 0);
  CHECK(*r.return_map_contraction < 1e-4);
  CHECK(r.min_dist_to_e > r.mu_sep);
  CHECK(r.amplitude.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(r.amplitude(i) > 0.1);
  const double p_ref = oracle::rk4_period(
      [](const Vector& x) { return oracle::goodwin_field(x, {0.5, 0.5, 0.5, 0.5}, 10); }, Vector::Constant(4, 0.1), 3,
      1.2770, 1000.0, 0.01);
  CHECK(std::abs(*r.period / p_ref - 1.0) < 1e-3);
}

TEST_CASE("RNA preset converges to a periodic orbit with the oracle period") {
  const Model m = example3();
  const auto e = models::equilibrium(m).e;
  const auto r = classify(m, e, Vector::Zero(4), preset_settings(m));
  REQUIRE(r.verdict == Verdict::PeriodicOrbit);
  CHECK(*r.return_map_contraction < 1e-4);
  CHECK(r.min_dist_to_e > r.mu_sep);
  const double p_ref = oracle::rk4_period(oracle::rna_field, Vector::Zero(4), 3, 0.1421, 1000.0, 5e-4);
  CHECK(std::abs(*r.period / p_ref - 1.0) < 1e-3);
}

TEST_CASE("period is stable under horizon doubling and a change of section") {
  for (const Model& m : {example2(), example3()}) {
    const auto e = models::equilibrium(m).e;
    const Vector a = m.is_rna() ? Vector::Zero(4) : Vector::Constant(4, 0.1);
    Settings s = preset_settings(m);
    const auto base = classify(m, e, a, s);
    REQUIRE(base.period.has_value());
    s.horizon *= 2.0;
    const auto longer = classify(m, e, a, s);
    REQUIRE(longer.period.has_value());
    CHECK(std::abs(*longer.period / *base.period - 1.0) < 1e-3);
    s = preset_settings(m);
    s.section_index = 0;
    const auto first = classify(m, e, a, s);
    REQUIRE(first.period.has_value());
    CHECK(std::abs(*first.period / *base.period - 1.0) < 1e-3);
  }
}

TEST_CASE("stable Goodwin regime converges to the equilibrium") {
  const Model m = models::goodwin({1, 1, 1}, 1);
  const auto e = models::goodwin_equilibrium(m).e;
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int k = 0; k < 10; ++k) {
    const Vector a = m.box.from_unit({u(rng), u(rng), u(rng)});
    const auto r = classify(m, e, a);
    CHECK(r.verdict == Verdict::Equilibrium);
    CHECK(r.final_dist_to_e < r.tau_eq);
    CHECK_FALSE(r.period.has_value());
  }
}

TEST_CASE("starting at the equilibrium is stationary") {
  for (const Model& m : {example2(), example3()}) {
    const auto e = models::equilibrium(m).e;
    CHECK(classify(m, e, e).verdict == Verdict::Equilibrium);
  }
}

TEST_CASE("harmonic oscillator: period 2 pi on any section") {
  Matrix a(2, 2);
  a << 0, -1, 1, 0;
  const Model m = linear_model(a, Vector::Zero(2), Box{Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)});
  Settings s;
  s.horizon = 100.0;
  const auto r = classify(m, Vector::Zero(2), Vector{{1.0, 0.0}}, s);
  REQUIRE(r.verdict == Verdict::PeriodicOrbit);
  CHECK(*r.period == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-8));
  CHECK(r.amplitude(0) == doctest::Approx(2.0).epsilon(1e-6));
  for (double t : r.crossings) CHECK(std::abs(std::remainder(t, 2.0 * std::numbers::pi)) < 1e-8);
}

TEST_CASE("short windows are Undetermined, never coerced") {
  const Model m = example2();
  const auto e = models::goodwin_equilibrium(m).e;
  Settings s;
  s.horizon = 30.0;
  const auto r = classify(m, e, Vector::Constant(4, 0.1), s);
  CHECK(r.verdict == Verdict::Undetermined);
  CHECK(r.crossings.size() <= 3);
}

TEST_CASE("classify validates its inputs") {
  const Model m = example2();
  const auto e = models::goodwin_equilibrium(m).e;
  Settings s;
  s.horizon = -1.0;
  CHECK_THROWS_AS(classify(m, e, e, s), Error);
  CHECK_THROWS_AS(classify(m, e, Vector::Constant(4, 100.0)), Error);
  CHECK_THROWS_AS(classify(m, e, Vector::Zero(3)), Error);
}

TEST_CASE("basin filter") {
  const Model m = example2();
  const auto e = models::goodwin_equilibrium(m).e;
  Vector eps = e;
  eps(0) += 1e-3;
  const Vector alt = e + 0.05 * Vector{{1.0, -1.0, 1.0, -1.0}};
  const auto p = basin_filter(e, {eps, alt, Vector::Constant(4, 0.1)});
  CHECK(p.tags == std::vector<int>{0, 3, 0});
  CHECK(p.le1 == std::vector<std::size_t>{0, 2});
  CHECK(p.ge2 == std::vector<std::size_t>{1});
}

TEST_CASE("hypothesis table") {
  for (const Model& m : {example2(), example3()}) {
    const auto r = theorem2_check(m);
    CHECK(r.all_passed);
    CHECK(r.prediction.has_value());
    CHECK(r.distinct_equilibria == 1);
    REQUIRE(r.hypotheses.size() == 3);
    for (const auto& h : r.hypotheses) CHECK_MESSAGE(h.passed, h.name);
  }
  const auto stable = theorem2_check(models::goodwin({1, 1, 1}, 1));
  CHECK_FALSE(stable.all_passed);
  CHECK_FALSE(stable.prediction.has_value());
  CHECK(stable.equilibrium->unstable_count == 0);
  CHECK_FALSE(stable.hypotheses[2].passed);
}

TEST_CASE("sampled basin: 50 random starts with s^-(a - e) <= 1 per preset") {
  for (const Model& m : {example2(), example3()}) {
    const auto e = models::equilibrium(m).e;
    int periodic = 0, equilibrium = 0, undetermined = 0;
    for (const Vector& a : basin_samples(m, e, 50, 52)) {
      const auto r = classify(m, e, a, preset_settings(m));
      periodic += r.verdict == Verdict::PeriodicOrbit;
      equilibrium += r.verdict == Verdict::Equilibrium;
      undetermined += r.verdict == Verdict::Undetermined;
      if (r.verdict == Verdict::PeriodicOrbit) CHECK(r.min_dist_to_e > r.mu_sep);
    }
    MESSAGE(m.name << ": periodic " << periodic << ", undetermined " << undetermined);
    CHECK(equilibrium == 0);
    CHECK(undetermined < 5);
  }
}
