#include <cmath>
#include <string>

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "dense.hpp"
#include "hlaser/coherence.hpp"
#include "hlaser/discrete.hpp"
#include "hlaser/errors.hpp"
#include "hlaser/report.hpp"

namespace {

using namespace hlaser;

// Largest gamma the guard admits, backed off slightly.
double near_guard_gamma(const LaserModel& m) { return 0.999 / std::sqrt(m.decay_diagonal().maxCoeff()); }

TEST(BuildDiscrete, IsometryAndFixedPointAreExact) {
  for (int d : {2, 3, 10, 40, 120}) {
    const LaserModel m = build_model(d);
    for (double g : {1e-4, 1e-2, 0.1, near_guard_gamma(m)}) {
      SCOPED_TRACE(std::to_string(d) + " " + std::to_string(g));
      const DiscreteModel dm = build_discrete(m, g);
      EXPECT_LE(dm.isometry_residual, 1e-13);
      EXPECT_LE(transfer_fixed_point_residual(dm), 1e-13);
      EXPECT_EQ(dm.a2.nonZeros(), 0);
    }
  }
}

TEST(BuildDiscrete, GuardNamesTheOffendingLevel) {
  const LaserModel m = build_model(5);
  const Eigen::VectorXd decay = m.decay_diagonal();
  Eigen::Index worst = 0;
  decay.maxCoeff(&worst);
  const double at_guard = 1.0 / std::sqrt(decay[worst]);
  try {
    build_discrete(m, at_guard);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("decay[" + std::to_string(worst) + "]"), std::string::npos);
  }
  EXPECT_THROW(build_discrete(m, 0.0), ValidationError);
  EXPECT_NO_THROW(build_discrete(m, at_guard * (1 - 1e-6)));
}

TEST(TransferMatrix, MatchesDenseKroneckerSum) {
  const LaserModel m = build_model(6);
  const DiscreteModel dm = build_discrete(m, 0.3);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(36, 36);
  for (const auto* a : {&dm.a0, &dm.a1, &dm.a2, &dm.a3}) {
    const Eigen::MatrixXd da(*a);
    ref += Eigen::kroneckerProduct(da, da);
  }
  const Eigen::MatrixXd t(transfer_matrix(dm).matrix);
  EXPECT_LE((t - ref).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd gen(transfer_generator(dm).matrix);
  EXPECT_LE((gen - (ref - Eigen::MatrixXd::Identity(36, 36))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TransferGenerator, ConvergesToLiouvillianQuadratically) {
  const LaserModel m = build_model(20);
  const double r1 = liouvillian_residual(build_discrete(m, 0.1));
  const double r2 = liouvillian_residual(build_discrete(m, 0.05));
  EXPECT_GE(r1 / r2, 3.5);
  EXPECT_LE(r1 / r2, 4.5);
  EXPECT_LE(liouvillian_residual(build_discrete(m, 1e-4)), 1e-6);
}

TEST(DiscreteCoherence, ApproachesContinuum) {
  LaserModel m = build_model(20);
  const double c = coherence(m);
  const DiscreteCoherence dc = discrete_coherence(build_discrete(m, 1e-3));
  EXPECT_NEAR(dc.value / c, 1.0, 0.01);
  EXPECT_NEAR(dc.one_site_term, 1e-6 * m.flux, 1e-18);
}

TEST(DiscreteCoherence, SmallCavityMatchesDenseOracle) {
  const LaserModel m = build_model(3);
  const double c = oracle::pinv_coherence(m);
  EXPECT_NEAR(discrete_coherence(build_discrete(m, 1e-3)).value / c, 1.0, 0.01);
}

TEST(DiscreteCoherence, CauchyInGamma) {
  const LaserModel m = build_model(10);
  double prev_value = discrete_coherence(build_discrete(m, 0.2)).value;
  double prev_gap = -1.0;
  for (double g : {0.1, 0.05, 0.025}) {
    const double value = discrete_coherence(build_discrete(m, g)).value;
    const double gap = std::abs(value - prev_value);
    if (prev_gap > 0) {
      EXPECT_GT(prev_gap / gap, 3.0) << "gamma=" << g;
      EXPECT_LT(prev_gap / gap, 5.0) << "gamma=" << g;
    }
    prev_gap = gap;
    prev_value = value;
  }
}

TEST(Unitaries, AreOrthogonal) {
  const LaserModel m = build_model(7);
  for (const Eigen::MatrixXd& u : {gain_unitary(m, 0.01), loss_unitary(m, 0.01)}) {
    EXPECT_LE((u.transpose() * u - Eigen::MatrixXd::Identity(14, 14)).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(gain_unitary(m, -1.0), ValidationError);
}

TEST(ChannelEquivalence, MatchesExplicitQubitOracle) {
  for (int d : {2, 3, 5}) {
    for (double dt : {1e-2, 1e-3}) {
      const LaserModel m = build_model(d);
      const ChannelDistance got = channel_equivalence(m, dt);
      const oracle::ChoiDistances ref = oracle::choi_distances(m, dt);
      EXPECT_NEAR(got.distance, ref.full, 1e-13) << d << " " << dt;
      EXPECT_NEAR(got.cavity_distance, ref.cavity, 1e-13) << d << " " << dt;
    }
  }
}

TEST(ChannelEquivalence, FrozenDistances) {
  // Dense numpy construction with explicit pump and beam qubits.
  const ChannelDistance a = channel_equivalence(build_model(5), 1e-2);
  const ChannelDistance b = channel_equivalence(build_model(5), 1e-3);
  EXPECT_NEAR(a.distance, 4.45e-3, 0.01e-3);
  EXPECT_NEAR(b.distance, 1.42e-4, 0.01e-4);
  EXPECT_NEAR(a.cavity_distance / b.cavity_distance, 99.0, 1.0);
  const ChannelDistance c = channel_equivalence(build_model(2), 1e-4);
  EXPECT_NEAR(c.distance, 1.0e-6, 0.01e-6);
  EXPECT_NEAR(c.cavity_distance, 1.333e-8, 0.01e-8);
}

TEST(ChannelEquivalence, VanishesAsStepShrinks) {
  const LaserModel m = build_model(4);
  double prev = 1.0;
  for (double dt : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double dist = channel_equivalence(m, dt).distance;
    EXPECT_LT(dist, prev);
    prev = dist;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(DiscreteReport, JsonKeys) {
  const Json j = to_json(discrete_report(build_discrete(build_model(6), 0.01)));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  const std::vector<std::string> expected{"dim", "gamma", "isometry_residual", "fixed_point_residual",
                                          "liouvillian_residual", "discrete_coherence", "one_site_term"};
  EXPECT_EQ(keys, expected);
}

}  // namespace
