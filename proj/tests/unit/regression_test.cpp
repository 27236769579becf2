#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "flr/error.hpp"
#include "flr/regression.hpp"
#include "flr/simulate.hpp"
#include "support/support.hpp"

using namespace flr;
using flr::testing::Rng;

namespace {

double rel(const KernelOp& a, const KernelOp& b) {
  return hs_norm(a - b) / std::max(1e-300, hs_norm(b));
}

KernelOp smooth_kernel(const MeasureSpace& s) {
  return kernel_op_from_fn([](double u, double t) { return 1.0 - (u - t) * (u - t); }, s, s);
}

}  // namespace

TEST(Dataset, ValidatesShapes) {
  const MeasureSpace s = MeasureSpace::uniform_grid(3);
  EXPECT_THROW(Dataset(s, s, Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 3)), Error);
  EXPECT_THROW(Dataset(s, s, Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Zero(3, 3)), Error);
  EXPECT_THROW(Dataset(s, s, Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd::Zero(4, 3)), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 3);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Dataset(s, s, bad, Eigen::MatrixXd::Zero(4, 3)), Error);
}

TEST(Dataset, SliceAndReverse) {
  Rng rng(40);
  const MeasureSpace s = MeasureSpace::uniform_grid(4);
  const Dataset d = flr::testing::random_dataset(smooth_kernel(s), 6, 0.1, rng);
  const Dataset sl = d.slice(2, 3);
  EXPECT_EQ(sl.size(), 3u);
  EXPECT_EQ(sl.x().row(0), d.x().row(2));
  const Dataset r = d.reversed();
  EXPECT_EQ(r.y().row(0), d.y().row(5));
  EXPECT_EQ(r.x().row(5), d.x().row(0));
}

TEST(CenterPrefix, IdenticalObservationsCenterToZero) {
  const MeasureSpace s = MeasureSpace::uniform_grid(3);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 3);
  x.col(1) *= 7.0;
  const Dataset d(s, s, x, x);
  const Dataset c = center_prefix(d, 1.0);
  EXPECT_EQ(c.x().cwiseAbs().maxCoeff(), 0.0);
}

TEST(CenterPrefix, MatchesHandComputedMeans) {
  const MeasureSpace s = MeasureSpace::uniform_grid(2);
  Eigen::MatrixXd x(4, 2), y(4, 2);
  x << 1, 2, 3, 4, 5, 9, 100, 100;
  y << 0, 1, 2, 3, 4, 8, -50, 50;
  const Dataset c = center_prefix(Dataset(s, s, x, y), 0.75);
  ASSERT_EQ(c.size(), 3u);
  // prefix means: x = (3, 5), y = (2, 4)
  Eigen::MatrixXd want_x(3, 2), want_y(3, 2);
  want_x << -2, -3, 0, -1, 2, 4;
  want_y << -2, -3, 0, -1, 2, 4;
  EXPECT_TRUE(c.x().isApprox(want_x));
  EXPECT_TRUE(c.y().isApprox(want_y));
  EXPECT_THROW((void)center_prefix(Dataset(s, s, x, y), 0.25), Error);
}

TEST(CenterPrefix, ShiftIsAbsorbedBitForBit) {
  Rng rng(41);
  const MeasureSpace s = MeasureSpace::uniform_grid(5);
  const std::size_t n = 8;
  Eigen::MatrixXd x(n, 5), y(n, 5);
  // dyadic values keep means and differences exact in binary
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < 5; ++j) {
      x(i, j) = std::ldexp(static_cast<double>(static_cast<int>(rng() % 64) - 32), -3);
      y(i, j) = std::ldexp(static_cast<double>(static_cast<int>(rng() % 64) - 32), -3);
    }
  Eigen::MatrixXd xs = x;
  Eigen::RowVectorXd shift(5);
  shift << 2.0, 2.25, -0.5, 3.125, 0.75;
  xs.rowwise() += shift;
  const Dataset a = center_prefix(Dataset(s, s, x, y), 1.0);
  const Dataset b = center_prefix(Dataset(s, s, xs, y), 1.0);
  EXPECT_EQ(a.x(), b.x());
}

TEST(SlopeEstimate, NoiselessDataRecoversProjectedSlope) {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const MeasureSpace xs = flr::testing::random_space(6, rng);
    const MeasureSpace ys = flr::testing::random_space(4, rng);
    const KernelOp s = flr::testing::random_kernel(ys, xs, rng);
    const Dataset d = flr::testing::random_dataset(s, 40, 0.0, rng);
    for (double x : {0.5, 1.0}) {
      for (bool center : {false, true}) {
        const SlopeFit fit = slope_estimate(d, x, 3, center);
        EXPECT_LE(rel(fit.slope, compose(s, fit.projection)), 1e-8);
        EXPECT_LE(rel(compose(fit.slope, fit.projection), fit.slope), 1e-8);
      }
    }
  }
}

TEST(SlopeEstimate, ZeroResponsesGiveZeroSlope) {
  Rng rng(43);
  const MeasureSpace s = MeasureSpace::uniform_grid(5);
  Dataset d = flr::testing::random_dataset(KernelOp::zero(s, s), 20, 0.0, rng);
  const SlopeFit fit = slope_estimate(d, 0.6, 2, false);
  EXPECT_EQ(hs_norm(fit.slope), 0.0);
}

TEST(SlopeEstimate, PrefixTooShortOrRankDeficient) {
  Rng rng(44);
  const MeasureSpace s = MeasureSpace::uniform_grid(5);
  const Dataset d = flr::testing::random_dataset(smooth_kernel(s), 10, 0.1, rng);
  try {
    (void)slope_estimate(d, 0.2, 3, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientPrefix);
  }
  // centered prefix of 3 has rank 2
  try {
    (void)slope_estimate(d, 0.3, 3, true);
    FAIL();
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.level(), 3u);
    EXPECT_EQ(e.prefix_size(), 3u);
  }
}

TEST(SlopeEstimate, ZeroRegressorPrefixIsRankDeficient) {
  const MeasureSpace s = MeasureSpace::uniform_grid(4);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 4), y = Eigen::MatrixXd::Zero(10, 4);
  x.bottomRows(5).setRandom();
  const Dataset d(s, s, x, y);
  EXPECT_THROW((void)pred_distance_stat(d, KernelOp::zero(s, s), 0.5, 1, false), RankDeficiencyError);
}

TEST(DistanceStat, ExactCancellationAndZeroNull) {
  Rng rng(45);
  const MeasureSpace s = MeasureSpace::uniform_grid(7);
  const KernelOp op = smooth_kernel(s);
  const Dataset d = flr::testing::random_dataset(op, 50, 0.0, rng);
  const double scale = hs_norm_squared(op);
  EXPECT_LE(distance_stat(d, op, 1.0, 3), 1e-10 * scale);
  EXPECT_LE(pred_distance_stat(d, op, 1.0, 3), 1e-10 * scale);
  const SlopeFit fit = slope_estimate(d, 0.8, 3, true);
  EXPECT_NEAR(distance_stat(d, KernelOp::zero(s, s), 0.8, 3), hs_norm_squared(fit.slope), 1e-12 * scale);
}

TEST(DistanceStat, ShiftInvariantWhenCentered) {
  Rng rng(46);
  for (int rep = 0; rep < 20; ++rep) {
    const MeasureSpace s = flr::testing::random_space(6, rng);
    const KernelOp op = flr::testing::random_kernel(s, s, rng);
    const KernelOp s0 = flr::testing::random_kernel(s, s, rng);
    const Dataset d = flr::testing::random_dataset(op, 30, 0.3, rng);
    const FuncObs fx = flr::testing::random_func(s, rng);
    const FuncObs fy = flr::testing::random_func(s, rng);
    Eigen::MatrixXd x = d.x(), y = d.y();
    x.rowwise() += fx.values().transpose();
    y.rowwise() += fy.values().transpose();
    const Dataset shifted(s, s, x, y);
    for (double frac : {0.5, 1.0}) {
      const double a = distance_stat(d, s0, frac, 3), b = distance_stat(shifted, s0, frac, 3);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, a));
      const double p = pred_distance_stat(d, s0, frac, 3), q = pred_distance_stat(shifted, s0, frac, 3);
      EXPECT_NEAR(p, q, 1e-12 * std::max(1.0, p));
    }
  }
}

TEST(DistancePath, AgreesWithOneShotStatistic) {
  Rng rng(47);
  const MeasureSpace s = MeasureSpace::uniform_grid(6);
  const KernelOp op = smooth_kernel(s);
  const Dataset d = flr::testing::random_dataset(op, 60, 0.5, rng);
  const std::vector<double> fr{0.2, 0.4, 0.6, 0.8};
  for (DistanceKind kind : {DistanceKind::Location, DistanceKind::Prediction}) {
    const auto path = distance_path(d, KernelOp::zero(s, s), fr, 3, kind);
    ASSERT_EQ(path.size(), 5u);
    const double one =
        kind == DistanceKind::Location ? distance_stat(d, KernelOp::zero(s, s), 1.0, 3)
                                       : pred_distance_stat(d, KernelOp::zero(s, s), 1.0, 3);
    EXPECT_EQ(path.at(1.0), one);
    for (double x : fr) {
      const double single =
          kind == DistanceKind::Location ? distance_stat(d, KernelOp::zero(s, s), x, 3)
                                         : pred_distance_stat(d, KernelOp::zero(s, s), x, 3);
      EXPECT_NEAR(path.at(x), single, 1e-10 * std::max(1.0, single));
    }
  }
}

TEST(DistancePath, ChecksSmallestPrefixFirst) {
  Rng rng(48);
  const MeasureSpace s = MeasureSpace::uniform_grid(6);
  const Dataset d = flr::testing::random_dataset(smooth_kernel(s), 10, 0.5, rng);
  const std::vector<double> fr{0.2, 0.6};
  EXPECT_THROW((void)distance_path(d, KernelOp::zero(s, s), fr, 3, DistanceKind::Location), Error);
}

TEST(SlopeEstimate, ConsistencyOnSimulationDesign) {
  // hs_norm(S_N - S Pi_k)^2 averaged over seeds shrinks as N grows.
  const MeasureSpace grid = MeasureSpace::default_grid();
  const KernelOp s = kernel_op_from_fn(phi_s, grid, grid);
  std::vector<double> err;
  for (std::size_t n : {100u, 400u, 1600u}) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SimConfig cfg;
      cfg.n = n;
      cfg.seed = seed;
      const Dataset d = gen_dataset(cfg, s);
      const SlopeFit fit = slope_estimate(d, 1.0, 4, true);
      acc += hs_norm_squared(fit.slope - compose(s, fit.projection));
    }
    err.push_back(acc / 10.0);
  }
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[2], err[1]);
}
