#include "flr/changepoint.hpp"

#include <algorithm>
#include <sstream>

#include "flr/error.hpp"

namespace flr {

ChangePointFit cusum_theta(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "change-point estimation needs N >= 4");
  const Eigen::VectorXd& wy = data.response_space().weight_vector();
  const Eigen::VectorXd& wx = data.regressor_space().weight_vector();
  const Eigen::MatrixXd weight = wy * wx.transpose();

  const Eigen::MatrixXd total = data.y().transpose() * data.x();
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(total.rows(), total.cols());
  const double nn = static_cast<double>(n);

  ChangePointFit fit;
  fit.objective.assign(n + 1, 0.0);
  double best = -1.0;
  for (std::size_t m = 1; m < n; ++m) {
    const auto row = static_cast<Eigen::Index>(m - 1);
    prefix.noalias() += data.y().row(row).transpose() * data.x().row(row);
    if (m < 2) continue;
    const double mm = static_cast<double>(m);
    const Eigen::MatrixXd diff = prefix / mm - (total - prefix) / (nn - mm);
    const double hs = diff.cwiseAbs2().cwiseProduct(weight).sum();
    const double f = (mm / nn) * (1.0 - mm / nn) * hs;
    fit.objective[m] = f;
    if (f > best) {
      best = f;
      fit.split = m;
    }
  }
  fit.theta = static_cast<double>(fit.split) / nn;
  return fit;
}

SplitPlan::SplitPlan(std::size_t boundary, std::size_t total, Mode mode)
    : boundary_(boundary), total_(total), mode_(mode) {
  if (boundary < 2 || total < boundary + 2) {
    std::ostringstream os;
    os << "split at " << boundary << " of " << total << " leaves a segment shorter than 2";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

SplitPlan SplitPlan::estimated(const ChangePointFit& fit, std::size_t n) {
  return SplitPlan(fit.split, n, Mode::EstimatedChangePoint);
}

SplitPlan SplitPlan::two_sample(std::size_t n1, std::size_t n2) {
  return SplitPlan(n1, n1 + n2, Mode::TwoSample);
}

SlopeFit split_slope(const Dataset& data, const SplitPlan& plan, double x, std::size_t k,
                     Segment segment, bool center, const EigenSystem* reference) {
  if (plan.total() != data.size()) {
    throw Error(ErrorKind::InvalidArgument, "split plan was built for a different sample size");
  }
  const std::size_t b = plan.boundary();
  if (segment == Segment::One) {
    return fit_segment(data, 0, prefix_length(x, b), static_cast<double>(b), k, center, reference, x);
  }
  const std::size_t len = data.size() - b;
  return fit_segment(data, b, prefix_length(x, len), static_cast<double>(len), k, center, reference,
                     x);
}

namespace {

double change_distance(const SlopeFit& one, const SlopeFit& two, DistanceKind kind) {
  if (kind == DistanceKind::Location) return hs_norm_squared(one.slope - two.slope);
  return hs_norm_squared(compose(one.slope, sqrt_op(one.eigs)) - compose(two.slope, sqrt_op(two.eigs)));
}

}  // namespace

std::map<double, double> change_path(const Dataset& data, const SplitPlan& plan,
                                     std::span<const double> fractions, std::size_t k,
                                     DistanceKind kind, bool center) {
  const SlopeFit full1 = split_slope(data, plan, 1.0, k, Segment::One, center);
  const SlopeFit full2 = split_slope(data, plan, 1.0, k, Segment::Two, center);
  std::map<double, double> path;
  path[1.0] = change_distance(full1, full2, kind);
  for (double x : fractions) {
    if (x == 1.0) continue;
    const SlopeFit a = split_slope(data, plan, x, k, Segment::One, center, &full1.eigs);
    const SlopeFit b = split_slope(data, plan, x, k, Segment::Two, center, &full2.eigs);
    path[x] = change_distance(a, b, kind);
  }
  return path;
}

namespace {

TestResult run_cp(const Dataset& data, double delta, std::size_t k, const NuMeasure& nu, double alpha,
                  const QuantileTable& table, const std::optional<SplitPlan>& plan, bool center,
                  DistanceKind kind) {
  const SplitPlan p = plan ? *plan : SplitPlan::estimated(cusum_theta(data), data.size());
  auto path = change_path(data, p, nu.support(), k, kind, center);
  return decide(std::move(path), nu, delta, alpha, table, k);
}

}  // namespace

TestResult test_cp_location(const Dataset& data, double delta, std::size_t k, const NuMeasure& nu,
                            double alpha, const QuantileTable& table,
                            const std::optional<SplitPlan>& plan, bool center) {
  return run_cp(data, delta, k, nu, alpha, table, plan, center, DistanceKind::Location);
}

TestResult test_cp_prediction(const Dataset& data, double delta, std::size_t k, const NuMeasure& nu,
                              double alpha, const QuantileTable& table,
                              const std::optional<SplitPlan>& plan, bool center) {
  return run_cp(data, delta, k, nu, alpha, table, plan, center, DistanceKind::Prediction);
}

}  // namespace flr
