#pragma once

// Relevant changes in the slope of a functional linear model with one change
// point, and the two-sample special case.

#include <cstddef>
#include <optional>
#include <vector>

#include "flr/regression.hpp"
#include "flr/selfnorm.hpp"

namespace flr {

struct ChangePointFit {
  double theta = 0.0;             // split / N
  std::size_t split = 0;          // M*, last index of the first segment (1-based count)
  std::vector<double> objective;  // objective[M] = f(M) for M = 2..N-1; 0, 1 and N unused
};

// CUSUM estimate over the products Y_n (x) X_n:
//   f(M) = (M/N)(1 - M/N) |||(1/M) sum_{n<=M} - (1/(N-M)) sum_{n>M}|||^2,
// maximized over 2 <= M <= N-1 with the smallest M winning ties.
ChangePointFit cusum_theta(const Dataset& data);

class SplitPlan {
 public:
  enum class Mode { EstimatedChangePoint, TwoSample };

  static SplitPlan estimated(const ChangePointFit& fit, std::size_t n);
  static SplitPlan two_sample(std::size_t n1, std::size_t n2);

  // Number of observations in segment one.
  std::size_t boundary() const noexcept { return boundary_; }
  std::size_t total() const noexcept { return total_; }
  Mode mode() const noexcept { return mode_; }
  double theta() const noexcept { return static_cast<double>(boundary_) / static_cast<double>(total_); }

 private:
  SplitPlan(std::size_t boundary, std::size_t total, Mode mode);

  std::size_t boundary_;
  std::size_t total_;
  Mode mode_;
};

enum class Segment { One, Two };

// Segment one: observations 1..floor(x b) divided by b. Segment two:
// floor(x (N - b)) observations starting at b + 1, divided by N - b. Here b is
// the plan's boundary, i.e. floor(theta N) or N1.
SlopeFit split_slope(const Dataset& data, const SplitPlan& plan, double x, std::size_t k,
                     Segment segment, bool center = true, const EigenSystem* reference = nullptr);

// Path x -> |||S1[x] - S2[x]|||^2 (location) or with each side smoothed by its
// own Gamma^{(j)}[x]^{1/2} (prediction), over nu's support and x = 1.
std::map<double, double> change_path(const Dataset& data, const SplitPlan& plan,
                                     std::span<const double> fractions, std::size_t k,
                                     DistanceKind kind, bool center = true);

// The plan defaults to the CUSUM estimate.
TestResult test_cp_location(const Dataset& data, double delta, std::size_t k, const NuMeasure& nu,
                            double alpha, const QuantileTable& table,
                            const std::optional<SplitPlan>& plan = std::nullopt, bool center = true);
TestResult test_cp_prediction(const Dataset& data, double delta, std::size_t k, const NuMeasure& nu,
                              double alpha, const QuantileTable& table,
                              const std::optional<SplitPlan>& plan = std::nullopt,
                              bool center = true);

}  // namespace flr
