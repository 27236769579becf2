#pragma once

// Self-normalized relevant-hypothesis tests.
//
// For a sequential distance path D[x] the normalizer is
//   V = { sum_x nu(x) x^4 (D[x] - D[1])^2 }^{1/2}
// and the test statistic is W = (D[1] - Delta) / V, rejected when it exceeds
// the (1 - alpha) quantile of the pivotal limit
//   W = B(1) / { int x^2 (B(x) - x B(1))^2 dnu(x) }^{1/2}.
// No sqrt(N) factor appears in the numerator: V already carries the
// N^{-1/2} rate of the path fluctuations, so this ratio is the one whose
// boundary limit is W. The same quantile table serves the location,
// prediction, change-point and two-sample tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flr/measure_space.hpp"
#include "flr/regression.hpp"

namespace flr {

class NuMeasure {
 public:
  // Support strictly increasing inside (0, 1), weights positive and summing
  // to one (within 1e-12).
  NuMeasure(std::vector<double> support, std::vector<double> weights);

  static NuMeasure uniform(std::vector<double> support);
  // Uniform on {1/5, 2/5, 3/5, 4/5}.
  static NuMeasure default_measure();

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  // Lower end a of the interval I = [a, 1].
  double lower() const noexcept { return support_.front(); }

  friend bool operator==(const NuMeasure&, const NuMeasure&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
};

// Throws InvalidArgument when a support point or x = 1 is missing.
double normalizer(const std::map<double, double>& path, const NuMeasure& nu);

struct QuantileRow {
  double alpha = 0.0;     // upper-tail probability
  double quantile = 0.0;  // q_{1 - alpha}
  double se = 0.0;        // Monte Carlo standard error of the quantile
};

class QuantileTable {
 public:
  QuantileTable(NuMeasure nu, std::size_t steps, std::size_t reps, std::uint64_t seed,
                std::size_t degenerate, std::vector<QuantileRow> rows);

  const NuMeasure& nu() const noexcept { return nu_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t replications() const noexcept { return reps_; }
  std::uint64_t seed() const noexcept { return seed_; }
  // Paths redrawn because the denominator underflowed.
  std::size_t degenerate_draws() const noexcept { return degenerate_; }
  const std::vector<QuantileRow>& rows() const noexcept { return rows_; }

  // q_{1 - alpha}; throws InvalidArgument if alpha is not tabulated.
  double quantile(double alpha) const;
  const QuantileRow& row(double alpha) const;

  void write(std::ostream& os) const;
  static QuantileTable read(std::istream& is);
  void save(const std::filesystem::path& path) const;
  static QuantileTable load(const std::filesystem::path& path);

 private:
  NuMeasure nu_;
  std::size_t steps_;
  std::size_t reps_;
  std::uint64_t seed_;
  std::size_t degenerate_;
  std::vector<QuantileRow> rows_;
};

inline const std::vector<double>& default_alphas() {
  static const std::vector<double> a{0.01, 0.025, 0.05, 0.1, 0.5, 0.9, 0.95, 0.975, 0.99};
  return a;
}

struct WSample {
  std::vector<double> values;  // in replication order
  std::size_t degenerate = 0;
};

// Draws `reps` realizations of W from Gaussian random walks on
// {0, 1/steps, ..., 1}. Replication i uses stream derive_seed(seed, i).
WSample simulate_w(const NuMeasure& nu, std::size_t reps, std::size_t steps, std::uint64_t seed,
                   unsigned threads = 0);

// Linear interpolation between order statistics (R type 7) of sorted data.
double empirical_quantile(std::span<const double> sorted, double p);
// Half-width of the +-1 binomial-sd order-statistic band around the p-quantile.
double quantile_standard_error(std::span<const double> sorted, double p);

// Requires reps >= 1e4, steps >= 500 and every support point on the step grid.
QuantileTable w_quantile(const NuMeasure& nu, std::span<const double> alphas, std::size_t reps,
                         std::size_t steps, std::uint64_t seed, unsigned threads = 0);

struct TestResult {
  double statistic = 0.0;
  double normalizer = 0.0;
  double quantile = 0.0;
  bool reject = false;
  std::map<double, double> path;
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t k = 0;
};

// Builds the decision from a sequential path. Throws DegenerateNormalizer
// when V = 0.
TestResult decide(std::map<double, double> path, const NuMeasure& nu, double delta, double alpha,
                  const QuantileTable& table, std::size_t k);

// (D[1] - Delta) / V for a path and its normalizer.
double self_normalized_statistic(double d1, double v, double delta);

TestResult test_location(const Dataset& data, const KernelOp& s0, double delta, std::size_t k,
                         const NuMeasure& nu, double alpha, const QuantileTable& table,
                         bool center = true);
TestResult test_prediction(const Dataset& data, const KernelOp& s0, double delta, std::size_t k,
                           const NuMeasure& nu, double alpha, const QuantileTable& table,
                           bool center = true);

}  // namespace flr
