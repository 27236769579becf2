#include "flr/regression.hpp"

#include <algorithm>
#include <sstream>

#include "flr/error.hpp"

namespace flr {

namespace {

Eigen::MatrixXd stack(std::span<const FuncObs> obs, const MeasureSpace& space) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(obs.size()), static_cast<Eigen::Index>(space.size()));
  for (std::size_t n = 0; n < obs.size(); ++n) {
    if (!(obs[n].space() == space)) throw Error(ErrorKind::Dimension, "observations mix spaces");
    m.row(static_cast<Eigen::Index>(n)) = obs[n].values().transpose();
  }
  return m;
}

void require_prefix(std::size_t count, std::size_t minimum, const char* what) {
  if (count < minimum) {
    std::ostringstream os;
    os << what << ": prefix of " << count << " observations, need at least " << minimum;
    throw Error(ErrorKind::InsufficientPrefix, os.str());
  }
}

}  // namespace

Dataset::Dataset(MeasureSpace regressor_space, MeasureSpace response_space, Eigen::MatrixXd x,
                 Eigen::MatrixXd y)
    : regressor_space_(std::move(regressor_space)),
      response_space_(std::move(response_space)),
      x_(std::move(x)),
      y_(std::move(y)) {
  if (x_.rows() != y_.rows()) throw Error(ErrorKind::Dimension, "dataset: X and Y differ in length");
  if (x_.rows() < 2) throw Error(ErrorKind::InvalidArgument, "dataset needs at least two observations");
  if (static_cast<std::size_t>(x_.cols()) != regressor_space_.size() ||
      static_cast<std::size_t>(y_.cols()) != response_space_.size()) {
    throw Error(ErrorKind::Dimension, "dataset: observations do not match their grids");
  }
  if (!x_.allFinite() || !y_.allFinite()) throw Error(ErrorKind::InvalidArgument, "dataset has non-finite values");
}

Dataset::Dataset(std::span<const FuncObs> x, std::span<const FuncObs> y)
    : Dataset(x.empty() ? MeasureSpace::dirac() : x.front().space(),
              y.empty() ? MeasureSpace::dirac() : y.front().space(),
              x.empty() ? Eigen::MatrixXd() : stack(x, x.front().space()),
              y.empty() ? Eigen::MatrixXd() : stack(y, y.front().space())) {}

FuncObs Dataset::regressor(std::size_t n) const {
  return FuncObs(regressor_space_, x_.row(static_cast<Eigen::Index>(n)).transpose());
}

FuncObs Dataset::response(std::size_t n) const {
  return FuncObs(response_space_, y_.row(static_cast<Eigen::Index>(n)).transpose());
}

Dataset Dataset::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > size()) throw Error(ErrorKind::InvalidArgument, "dataset slice out of range");
  const auto b = static_cast<Eigen::Index>(begin);
  const auto c = static_cast<Eigen::Index>(count);
  return Dataset(regressor_space_, response_space_, x_.middleRows(b, c), y_.middleRows(b, c));
}

Dataset Dataset::reversed() const {
  return Dataset(regressor_space_, response_space_, x_.colwise().reverse(), y_.colwise().reverse());
}

Dataset center_prefix(const Dataset& data, double x) {
  const std::size_t m = prefix_length(x, data.size());
  require_prefix(m, 2, "centering");
  Eigen::MatrixXd xs = data.x().topRows(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd ys = data.y().topRows(static_cast<Eigen::Index>(m));
  const Eigen::RowVectorXd xbar = xs.colwise().mean();
  const Eigen::RowVectorXd ybar = ys.colwise().mean();
  xs.rowwise() -= xbar;
  ys.rowwise() -= ybar;
  return Dataset(data.regressor_space(), data.response_space(), std::move(xs), std::move(ys));
}

SlopeFit fit_segment(const Dataset& data, std::size_t begin, std::size_t count, double divisor,
                     std::size_t k, bool center, const EigenSystem* reference, double x) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "cut-off level k must be positive");
  if (begin + count > data.size()) throw Error(ErrorKind::InvalidArgument, "segment out of range");
  require_prefix(count, std::max<std::size_t>(k, center ? 2 : 1), "slope estimate");

  const auto b = static_cast<Eigen::Index>(begin);
  const auto c = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd xs = data.x().middleRows(b, c);
  Eigen::MatrixXd ys = data.y().middleRows(b, c);
  if (center) {
    const Eigen::RowVectorXd xbar = xs.colwise().mean();
    const Eigen::RowVectorXd ybar = ys.colwise().mean();
    xs.rowwise() -= xbar;
    ys.rowwise() -= ybar;
  }

  KernelOp cov = covariance_rows(data.regressor_space(), xs, count, divisor);
  Eigen::MatrixXd cross = ys.transpose() * xs;
  cross /= divisor;
  KernelOp cross_op(data.response_space(), data.regressor_space(), std::move(cross));

  EigenSystem eigs = eigensystem(cov, reference, count);
  KernelOp inverse = regularized_inverse(eigs, k);
  KernelOp proj = projection(eigs, k);
  KernelOp slope = compose(cross_op, inverse);
  return SlopeFit{std::move(slope), std::move(proj), std::move(cov), std::move(eigs), x, k, count};
}

SlopeFit slope_estimate(const Dataset& data, double x, std::size_t k, bool center,
                        const EigenSystem* reference) {
  const std::size_t m = prefix_length(x, data.size());
  return fit_segment(data, 0, m, static_cast<double>(data.size()), k, center, reference, x);
}

double fit_distance(const SlopeFit& fit, const KernelOp& s0, DistanceKind kind) {
  KernelOp diff = fit.slope - compose(s0, fit.projection);
  if (kind == DistanceKind::Prediction) diff = compose(diff, sqrt_op(fit.eigs));
  return hs_norm_squared(diff);
}

double distance_stat(const Dataset& data, const KernelOp& s0, double x, std::size_t k, bool center) {
  return fit_distance(slope_estimate(data, x, k, center), s0, DistanceKind::Location);
}

double pred_distance_stat(const Dataset& data, const KernelOp& s0, double x, std::size_t k,
                          bool center) {
  return fit_distance(slope_estimate(data, x, k, center), s0, DistanceKind::Prediction);
}

std::map<double, double> distance_path(const Dataset& data, const KernelOp& s0,
                                       std::span<const double> fractions, std::size_t k,
                                       DistanceKind kind, bool center) {
  if (!(s0.domain() == data.regressor_space()) || !(s0.codomain() == data.response_space())) {
    throw Error(ErrorKind::Dimension, "S0 does not map the regressor grid to the response grid");
  }
  std::vector<double> xs(fractions.begin(), fractions.end());
  std::sort(xs.begin(), xs.end());
  if (!xs.empty()) {
    require_prefix(prefix_length(xs.front(), data.size()), std::max<std::size_t>(k, center ? 2 : 1),
                   "smallest sequential prefix");
  }

  std::map<double, double> path;
  const SlopeFit full = slope_estimate(data, 1.0, k, center);
  path[1.0] = fit_distance(full, s0, kind);
  for (double x : xs) {
    if (x == 1.0) continue;
    const SlopeFit fit = slope_estimate(data, x, k, center, &full.eigs);
    path[x] = fit_distance(fit, s0, kind);
  }
  return path;
}

}  // namespace flr
