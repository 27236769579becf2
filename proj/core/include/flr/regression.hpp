#pragma once

// Sequential spectral cut-off estimation of the slope in Y = S X + eps, and
// the squared-distance statistics that drive the relevant-hypothesis tests.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "flr/measure_space.hpp"
#include "flr/spectral.hpp"

namespace flr {

// Paired functional observations. Rows of x()/y() are the observations, so
// row n of x() holds X_n on the regressor grid.
class Dataset {
 public:
  Dataset(MeasureSpace regressor_space, MeasureSpace response_space, Eigen::MatrixXd x,
          Eigen::MatrixXd y);
  Dataset(std::span<const FuncObs> x, std::span<const FuncObs> y);

  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  const MeasureSpace& regressor_space() const noexcept { return regressor_space_; }
  const MeasureSpace& response_space() const noexcept { return response_space_; }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::MatrixXd& y() const noexcept { return y_; }
  FuncObs regressor(std::size_t n) const;
  FuncObs response(std::size_t n) const;

  // Observations [begin, begin + count).
  Dataset slice(std::size_t begin, std::size_t count) const;
  // Time-reversed copy.
  Dataset reversed() const;

 private:
  MeasureSpace regressor_space_;
  MeasureSpace response_space_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd y_;
};

// The first floor(xN) observations with their own prefix means removed.
Dataset center_prefix(const Dataset& data, double x);

struct SlopeFit {
  KernelOp slope;        // S_N[x]
  KernelOp projection;   // Pi_k[x]
  KernelOp covariance;   // Gamma_N[x]
  EigenSystem eigs;      // all eigenpairs of Gamma_N[x]
  double x = 1.0;
  std::size_t k = 0;
  std::size_t prefix = 0;  // number of observations used
};

// Fit on observations [begin, begin + count) with covariance and
// cross-covariance divided by `divisor`. Centering, when requested, uses the
// means of exactly those observations. Eigenfunctions are sign-aligned to
// `reference` when given.
SlopeFit fit_segment(const Dataset& data, std::size_t begin, std::size_t count, double divisor,
                     std::size_t k, bool center, const EigenSystem* reference = nullptr,
                     double x = 1.0);

// S_N[x] = (1/N) sum_{n <= floor(xN)} Y_n (x) X_n Gamma^dagger_k[x].
SlopeFit slope_estimate(const Dataset& data, double x, std::size_t k, bool center,
                        const EigenSystem* reference = nullptr);

enum class DistanceKind { Location, Prediction };

// |||A - S0 Pi|||^2 for location, |||(A - S0 Pi) Gamma^{1/2}|||^2 for
// prediction, where A, Pi, Gamma come from `fit`.
double fit_distance(const SlopeFit& fit, const KernelOp& s0, DistanceKind kind);

double distance_stat(const Dataset& data, const KernelOp& s0, double x, std::size_t k,
                     bool center = true);
double pred_distance_stat(const Dataset& data, const KernelOp& s0, double x, std::size_t k,
                          bool center = true);

// Sequential path x -> D[x] over `fractions` plus x = 1. Every prefix
// eigensystem is aligned to the x = 1 system. The smallest prefix is checked
// for rank before any other work.
std::map<double, double> distance_path(const Dataset& data, const KernelOp& s0,
                                       std::span<const double> fractions, std::size_t k,
                                       DistanceKind kind, bool center = true);

}  // namespace flr
