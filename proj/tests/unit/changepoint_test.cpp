#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "flr/changepoint.hpp"
#include "flr/error.hpp"
#include "flr/simulate.hpp"
#include "support/support.hpp"

using namespace flr;
using flr::testing::Rng;

namespace {

QuantileTable table_for(const NuMeasure& nu) {
  return QuantileTable(nu, 1000, 100000, 1, 0, {{0.05, 10.96, 0.2}});
}

Dataset change_data(std::size_t n, std::uint64_t seed, const KernelOp& before, const KernelOp& after,
                    double noise, double theta = 0.5) {
  SimConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.noise_scale = noise;
  return gen_dataset(cfg, before, ChangeSpec{theta, after});
}

// Index set covered by a segment fit, recovered by fitting on a dataset whose
// rows are unit pulses of the row index.
std::vector<std::size_t> hand_indices(std::size_t begin, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(begin + i + 1);
  return out;
}

}  // namespace

TEST(Cusum, IdenticalProductsTieToTwo) {
  const MeasureSpace s = MeasureSpace::uniform_grid(3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 3);
  const ChangePointFit fit = cusum_theta(Dataset(s, s, x, 2.0 * x));
  EXPECT_EQ(fit.split, 2u);
  EXPECT_DOUBLE_EQ(fit.theta, 0.2);
  for (std::size_t m = 2; m < 10; ++m) EXPECT_NEAR(fit.objective[m], 0.0, 1e-25);
}

TEST(Cusum, NeedsFourObservations) {
  const MeasureSpace s = MeasureSpace::uniform_grid(2);
  EXPECT_THROW((void)cusum_theta(Dataset(s, s, Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 2))),
               Error);
}

TEST(Cusum, ObjectiveMatchesDirectFormulaAndIsNonnegative) {
  Rng rng(50);
  const MeasureSpace s = flr::testing::random_space(4, rng);
  const Dataset d = flr::testing::random_dataset(flr::testing::random_kernel(s, s, rng), 12, 0.5, rng);
  const ChangePointFit fit = cusum_theta(d);
  const double n = 12.0;
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t m = 2; m <= 11; ++m) {
    KernelOp a(s, s), b(s, s);
    for (std::size_t i = 0; i < 12; ++i) {
      const KernelOp t = outer(d.response(i), d.regressor(i));
      if (i < m) a += t; else b += t;
    }
    a *= 1.0 / static_cast<double>(m);
    b *= 1.0 / (n - static_cast<double>(m));
    const double f = (m / n) * (1.0 - m / n) * hs_norm_squared(a - b);
    EXPECT_NEAR(fit.objective[m], f, 1e-10 * std::max(1.0, f));
    EXPECT_GE(fit.objective[m], 0.0);
    if (f > best) {
      best = f;
      arg = m;
    }
  }
  EXPECT_EQ(fit.split, arg);
}

TEST(Cusum, StrongNoiselessChangeIsLocated) {
  const MeasureSpace g = MeasureSpace::default_grid();
  const KernelOp s = kernel_op_from_fn(phi_s, g, g);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ChangePointFit fit = cusum_theta(change_data(200, seed, KernelOp::zero(g, g), s, 0.0));
    EXPECT_LE(std::abs(fit.theta - 0.5), 0.02) << "seed " << seed;
  }
}

TEST(Cusum, TimeReversalMirrorsObjective) {
  Rng rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const MeasureSpace s = flr::testing::random_space(5, rng);
    const Dataset d = flr::testing::random_dataset(flr::testing::random_kernel(s, s, rng), 30, 1.0, rng);
    const ChangePointFit fwd = cusum_theta(d);
    const ChangePointFit bwd = cusum_theta(d.reversed());
    // f(M) on the reversed sample equals f(N - M) on the original
    for (std::size_t m = 2; m + 2 <= 30; ++m) {
      EXPECT_NEAR(bwd.objective[30 - m], fwd.objective[m], 1e-10 * std::max(1.0, fwd.objective[m]));
    }
    // M = N - 1 has no mirror inside 2..N-1, so only an interior maximizer maps across
    if (30 - fwd.split >= 2) {
      const double mirrored = bwd.objective[30 - fwd.split];
      EXPECT_NEAR(mirrored, fwd.objective[fwd.split], 1e-10 * fwd.objective[fwd.split]);
      EXPECT_LE(mirrored, bwd.objective[bwd.split] + 1e-12);
    }
  }
}

TEST(SplitPlan, SegmentsMustHoldTwoObservations) {
  EXPECT_THROW((void)SplitPlan::two_sample(1, 10), Error);
  EXPECT_THROW((void)SplitPlan::two_sample(10, 1), Error);
  const SplitPlan p = SplitPlan::two_sample(4, 6);
  EXPECT_EQ(p.boundary(), 4u);
  EXPECT_EQ(p.total(), 10u);
  EXPECT_DOUBLE_EQ(p.theta(), 0.4);
}

TEST(SplitSlope, ToyIndexSets) {
  // N = 10, boundary 4, x = 0.5: segment one {1, 2}, segment two {5, 6, 7}.
  const MeasureSpace s = MeasureSpace::dirac();
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 1);
  Eigen::MatrixXd y(10, 1);
  for (int i = 0; i < 10; ++i) y(i, 0) = std::ldexp(1.0, i);  // bit i marks row i + 1
  const Dataset d(s, s, x, y);
  const SplitPlan plan = SplitPlan::two_sample(4, 6);
  auto decode = [](double v) {
    std::vector<std::size_t> idx;
    auto bits = static_cast<unsigned long long>(std::llround(v));
    for (std::size_t i = 0; i < 64; ++i)
      if (bits >> i & 1ULL) idx.push_back(i + 1);
    return idx;
  };
  // slope = (1/b) sum y_n x_n * (1/((1/b) sum x_n^2)) = sum y_n / count for x = 1
  const SlopeFit one = split_slope(d, plan, 0.5, 1, Segment::One, false);
  const SlopeFit two = split_slope(d, plan, 0.5, 1, Segment::Two, false);
  EXPECT_EQ(one.prefix, 2u);
  EXPECT_EQ(two.prefix, 3u);
  EXPECT_EQ(decode(one.slope(0, 0) * 2.0), hand_indices(0, 2));
  EXPECT_EQ(decode(two.slope(0, 0) * 3.0), hand_indices(4, 3));
  // covariance divisors are the segment lengths
  EXPECT_DOUBLE_EQ(one.covariance(0, 0), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(two.covariance(0, 0), 3.0 / 6.0);
  // x = 1 covers the whole second segment
  EXPECT_EQ(decode(split_slope(d, plan, 1.0, 1, Segment::Two, false).slope(0, 0) * 6.0), hand_indices(4, 6));
}

TEST(SplitSlope, NoiselessNoChangeRecoversProjectedSlope) {
  Rng rng(52);
  const MeasureSpace s = flr::testing::random_space(6, rng);
  const KernelOp op = flr::testing::random_kernel(s, s, rng);
  const Dataset d = flr::testing::random_dataset(op, 40, 0.0, rng);
  const SplitPlan plan = SplitPlan::two_sample(18, 22);
  for (Segment seg : {Segment::One, Segment::Two}) {
    const SlopeFit f = split_slope(d, plan, 1.0, 3, seg);
    EXPECT_LE(hs_norm(f.slope - compose(op, f.projection)), 1e-8 * hs_norm(op));
  }
  EXPECT_THROW((void)split_slope(d, SplitPlan::two_sample(10, 10), 1.0, 3, Segment::One), Error);
}

TEST(TwoSample, ReproducesChangePointPathAtForcedSplit) {
  const MeasureSpace g = MeasureSpace::default_grid();
  const Dataset d = change_data(200, 3, kernel_op_from_fn(phi_s0, g, g), 5.0 * kernel_op_from_fn(phi_s, g, g), 1.0);
  const ChangePointFit fit = cusum_theta(d);
  const SplitPlan est = SplitPlan::estimated(fit, d.size());
  const SplitPlan two = SplitPlan::two_sample(fit.split, d.size() - fit.split);
  const std::vector<double> fr{0.2, 0.4, 0.6, 0.8};
  for (DistanceKind kind : {DistanceKind::Location, DistanceKind::Prediction}) {
    EXPECT_EQ(change_path(d, est, fr, 3, kind), change_path(d, two, fr, 3, kind));
  }
}

TEST(TestCp, NoChangeAcceptsPositiveDelta) {
  const MeasureSpace g = MeasureSpace::default_grid();
  const NuMeasure nu = NuMeasure::default_measure();
  const KernelOp s = kernel_op_from_fn(phi_s, g, g);
  KernelOp after = s;
  after *= 1.0 + 1e-4;  // keeps the normalizer away from zero
  const Dataset d = change_data(200, 4, s, after, 0.0);
  const SplitPlan plan = SplitPlan::two_sample(100, 100);
  const TestResult loc = test_cp_location(d, 0.05, 3, nu, 0.05, table_for(nu), plan);
  const TestResult pred = test_cp_prediction(d, 0.05, 3, nu, 0.05, table_for(nu), plan);
  EXPECT_FALSE(loc.reject);
  EXPECT_FALSE(pred.reject);
  EXPECT_LT(loc.statistic, 0.0);
}

TEST(TestCp, MonotoneInDeltaAndScaleEquivariant) {
  const MeasureSpace g = MeasureSpace::default_grid();
  const NuMeasure nu = NuMeasure::default_measure();
  const Dataset d = change_data(300, 5, kernel_op_from_fn(phi_s0, g, g), 5.0 * kernel_op_from_fn(phi_s, g, g), 1.0);
  double prev = std::numeric_limits<double>::infinity();
  bool prev_reject = true;
  for (double delta : {0.0, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    const TestResult r = test_cp_location(d, delta, 3, nu, 0.05, table_for(nu));
    EXPECT_LT(r.statistic, prev);
    if (r.reject) EXPECT_TRUE(prev_reject);
    prev = r.statistic;
    prev_reject = r.reject;
  }
  const double c = 2.0;
  const Dataset scaled(d.regressor_space(), d.response_space(), d.x(), c * d.y());
  for (double delta : {0.0, 3.0}) {
    const TestResult a = test_cp_prediction(d, delta, 3, nu, 0.05, table_for(nu));
    const TestResult b = test_cp_prediction(scaled, c * c * delta, 3, nu, 0.05, table_for(nu));
    EXPECT_NEAR(a.statistic, b.statistic, 1e-8 * std::max(1.0, std::abs(a.statistic)));
    EXPECT_EQ(a.reject, b.reject);
  }
}

TEST(TestCp, NoiselessDistanceTracksProjectedDifference) {
  const MeasureSpace g = MeasureSpace::default_grid();
  const KernelOp s1 = kernel_op_from_fn(phi_s0, g, g);
  const KernelOp s2 = 5.0 * kernel_op_from_fn(phi_s, g, g);
  const Dataset d = change_data(400, 6, s1, s2, 0.0);
  const SplitPlan plan = SplitPlan::two_sample(200, 200);
  const SlopeFit a = split_slope(d, plan, 1.0, 4, Segment::One);
  const SlopeFit b = split_slope(d, plan, 1.0, 4, Segment::Two, true, &a.eigs);
  const double dcp = hs_norm_squared(a.slope - b.slope);
  const double target = hs_norm_squared(compose(s1 - s2, a.projection));
  EXPECT_NEAR(dcp, target, 0.1 * target);
}
