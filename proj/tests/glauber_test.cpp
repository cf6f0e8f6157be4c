#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dense.hpp"
#include "hlaser/coherence.hpp"
#include "hlaser/errors.hpp"
#include "hlaser/glauber.hpp"

namespace {

using namespace hlaser;

LaserModel solved_model(int d) {
  LaserModel m = build_model(d);
  coherence(m);
  return m;
}

TEST(IdealBeam, ClosedForms) {
  const IdealBeam beam{0.2, 1.0};
  EXPECT_DOUBLE_EQ(ideal_g1(beam, 3.0, 1.0), std::exp(-0.2));
  EXPECT_DOUBLE_EQ(ideal_g2(beam, {1.5, 1.5, 1.5, 1.5}), 1.0);
  // s = s', t = t': the combination is 4|s - t|
  EXPECT_NEAR(ideal_g2(beam, {0.0, 0.0, 1.0, 1.0}), std::exp(-0.4), 1e-15);
  const FourTimes x{0.3, -1.1, 2.0, 0.6};
  EXPECT_DOUBLE_EQ(ideal_g2(beam, x), ideal_g2(beam, {x.s_prime, x.s, x.t_prime, x.t}));
  EXPECT_DOUBLE_EQ(ideal_g2(beam, x), ideal_g2(beam, {x.s, x.s_prime, x.t, x.t_prime}));
}

TEST(ModelG1, FrozenThreeLevelValue) {
  const LaserModel m = solved_model(3);
  for (auto kind : {PropagatorKind::sector, PropagatorKind::krylov, PropagatorKind::dense}) {
    const auto prop = make_propagator(m, kind);
    EXPECT_NEAR(model_g1(m, 0.5, *prop), 0.5854544412438897, 1e-12);
    EXPECT_NEAR(model_g1(m, 0.0, *prop), 1.0, 1e-14);
  }
  EXPECT_THROW(model_g1(m, -1.0, *make_propagator(m)), ValidationError);
}

TEST(ModelG1, MatchesDenseOracle) {
  const LaserModel m = solved_model(9);
  const auto prop = make_propagator(m);
  for (double s : {0.1, 1.0, 4.0, 25.0}) EXPECT_NEAR(model_g1(m, s, *prop), oracle::brute_g1(m, s), 1e-11);
}

TEST(ModelG2, EqualTimesAtThreeLevels) {
  const LaserModel m = solved_model(3);
  EXPECT_NEAR(model_g2(m, {0.4, 0.4, 0.4, 0.4}, *make_propagator(m)), 0.24, 1e-14);
}

TEST(ModelG2, FrozenEightLevelValues) {
  const LaserModel m = solved_model(8);
  const auto prop = make_propagator(m);
  EXPECT_NEAR(model_g2(m, {0.3, -1.2, 2.5, 0.7}, *prop), 0.6597862846018404, 1e-11);
  EXPECT_NEAR(model_g2(m, {1.0, 1.0, -0.5, 2.0}, *prop), 0.7658943710012623, 1e-11);
}

TEST(ModelG2, MatchesDenseOracleOnRandomQuadruples) {
  std::mt19937_64 rng(2024);
  for (int d : {4, 7, 12}) {
    const LaserModel m = solved_model(d);
    const auto prop = make_propagator(m);
    const double span = 2.0 * filter_window(m);
    std::uniform_real_distribution<double> time(-span, span);
    for (int k = 0; k < 10; ++k) {
      const FourTimes x{time(rng), time(rng), time(rng), time(rng)};
      EXPECT_NEAR(model_g2(m, x, *prop), oracle::brute_g2(m, x.as_array()), 1e-9) << "dim=" << d;
    }
  }
}

TEST(ModelG2, PropagatorsAgree) {
  const LaserModel m = solved_model(15);
  const auto sector = make_propagator(m, PropagatorKind::sector);
  const auto krylov = make_propagator(m, PropagatorKind::krylov, {30, 1e-13});
  const FourTimes x{-3.0, 1.0, 2.5, -0.5};
  EXPECT_NEAR(model_g2(m, x, *sector), model_g2(m, x, *krylov), 1e-10);
}

TEST(FilterWindow, NeedsLinewidth) {
  EXPECT_THROW(filter_window(build_model(5)), ValidationError);
  const LaserModel m = solved_model(5);
  EXPECT_NEAR(filter_window(m), std::sqrt(3.0 / (2.0 * m.flux * *m.linewidth)), 1e-14);
}

TEST(DeltaG1, FrozenProfileMaxima) {
  // numpy sector-block oracle, 201 samples on [0, 10 / l].
  EXPECT_NEAR(delta_g1_profile(solved_model(50)).max_delta / 1.4802116700907142e-4, 1.0, 1e-6);
  EXPECT_NEAR(delta_g1_profile(solved_model(100)).max_delta / 1.2789007529101504e-5, 1.0, 1e-5);
}

TEST(DeltaG1, ProfileShape) {
  const G1Profile p = delta_g1_profile(solved_model(20), 10.0, 11);
  ASSERT_EQ(p.s.size(), 11u);
  EXPECT_EQ(p.s.front(), 0.0);
  EXPECT_NEAR(p.delta.front(), 0.0, 1e-13);
  for (std::size_t i = 0; i < p.s.size(); ++i) EXPECT_NEAR(p.delta[i], std::abs(p.model[i] - p.ideal[i]), 1e-16);
  EXPECT_THROW(delta_g1_profile(solved_model(20), 10.0, 1), ValidationError);
}

TEST(MaxDeltaG2, ThirtyLevelsAgainstFrozenGridScan) {
  const LaserModel m = solved_model(30);
  const DeltaG2Result plain = max_delta_g2(m, 9, false);
  const DeltaG2Result refined = max_delta_g2(m, 9, true);
  // numpy 9^3 lattice scan and corner value.
  EXPECT_NEAR(plain.corner_delta, 0.008295876654511147, 1e-10);
  EXPECT_NEAR(plain.delta, 0.008295876654511147, 1e-10);  // the corner dominates the lattice
  EXPECT_GE(refined.delta, plain.delta);
  EXPECT_NEAR(plain.tau, 37.39459357788847, 1e-8);
  EXPECT_EQ(plain.dim, 30);
  EXPECT_LT(refined.delta, 1.0 / std::sqrt(4.0 * m.flux / *m.linewidth));
}

TEST(MaxDeltaG2, ArgmaxReproducesDelta) {
  const LaserModel m = solved_model(20);
  const DeltaG2Result r = max_delta_g2(m, 7, true);
  const auto prop = make_propagator(m);
  const double at = std::abs(model_g2(m, r.argmax, *prop) - ideal_g2({*m.linewidth, m.flux}, r.argmax));
  EXPECT_NEAR(at, r.delta, 1e-14);
  EXPECT_NEAR(r.argmax.s, -r.tau, 1e-12);
  EXPECT_THROW(max_delta_g2(m, 2), ValidationError);
}

}  // namespace
