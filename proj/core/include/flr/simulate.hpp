#pragma once

// Data generators and the Monte Carlo harness for rejection curves.
//
// Regressors are shifted beta densities
//   X(t) = Gamma(A+B)/(Gamma(A)Gamma(B)) t^A (1-t)^B + Z,  A, B ~ U[2,5], Z ~ N(0,1),
// errors are stationary Ornstein-Uhlenbeck paths with covariance
// exp(-|s-t|)/2, and the dependent regime lifts both through a functional
// AR(1) recursion with a burn-in.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flr/measure_space.hpp"
#include "flr/regression.hpp"
#include "flr/rng.hpp"
#include "flr/selfnorm.hpp"

namespace flr {

enum class Dependence { Iid, Ar1 };

struct SimConfig {
  std::size_t n = 500;
  std::size_t k = 4;
  Dependence dependence = Dependence::Iid;
  double rho = 0.6;
  std::size_t burnin = 200;
  double noise_scale = 1.0;
  std::uint64_t seed = 1;
  NuMeasure nu = NuMeasure::default_measure();
  double alpha = 0.05;
  std::vector<double> deltas;
  std::size_t replications = 100;
  unsigned threads = 0;
  bool center = true;

  // Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

// Slope switches from the generating slope to `after` once floor(theta N)
// observations have been drawn.
struct ChangeSpec {
  double theta = 0.5;
  KernelOp after;
};

// phi_{S0}(s, t) = 1 - |s - t|^2
double phi_s0(double s, double t);
// phi_S(s, t) = 1 - (4/5)|s - t|^2 + (1/5) cos(|s - t| / 5)
double phi_s(double s, double t);

// kernel[i, j] = phi(s_j, t_i) with s on the domain grid and t on the
// codomain grid, so that (A f)(t) = int phi(s, t) f(s) dmu(s).
KernelOp kernel_op_from_fn(const std::function<double(double, double)>& phi,
                           const MeasureSpace& codomain, const MeasureSpace& domain);

FuncObs beta_shift_curve(const MeasureSpace& space, double a, double b, double shift);
// One curve per row.
Eigen::MatrixXd beta_shift_regressors(const MeasureSpace& space, std::size_t n, Engine& eng);
Eigen::MatrixXd ou_errors(const MeasureSpace& space, std::size_t n, Engine& eng);
// Y_n = rho Y_{n-1} + X_n started from zero; the first `burnin` rows are
// dropped.
Eigen::MatrixXd ar1_lift(const Eigen::MatrixXd& series, double rho, std::size_t burnin);

// Regressors and errors come from streams 0 and 1 of cfg.seed.
Dataset gen_dataset(const SimConfig& cfg, const KernelOp& slope,
                    const std::optional<ChangeSpec>& change = std::nullopt);

// Large-sample centered covariance used as the population Gamma. Fixed seed,
// n observations, one per dependence regime.
inline constexpr std::uint64_t kCovarianceOracleSeed = 0x5eedc0feULL;
KernelOp covariance_oracle(const MeasureSpace& space, Dependence dependence, double rho = 0.6,
                           std::size_t burnin = 200, std::size_t n = 100000,
                           std::uint64_t seed = kCovarianceOracleSeed);

// |||(S - S0) Pi_k|||^2 / |||S - S0|||^2 with Pi_k from the eigensystem of gamma.
double rel_explanation(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma, std::size_t k);
// Same measure for (S - S0) Gamma^{1/2}.
double rel_explanation_pred(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma,
                            std::size_t k);
// |||(S - S0) Gamma^{1/2}|||^2 = E||S X - S0 X||^2 for centred X with covariance gamma.
double prediction_distance(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma);

enum class CurveKind { Location, Prediction, ChangePoint };

struct RejectionCurve {
  std::vector<double> deltas;
  std::vector<double> rates;
  std::vector<double> se;
  std::size_t successes = 0;  // replications that produced a statistic
  std::size_t failures = 0;   // rank failures, degenerate normalizers, bad splits
  std::string config_echo;    // "key: value" lines

  void write_csv(std::ostream& os) const;
};

// Per-replication outcome: D[1] and the normalizer, or nothing on failure.
struct ReplicationStat {
  bool ok = false;
  double d1 = 0.0;
  double normalizer = 0.0;
  double theta = 0.0;  // change-point runs only
};

ReplicationStat run_replication(const SimConfig& cfg, CurveKind kind, const KernelOp& s0,
                                const KernelOp& slope, const std::optional<ChangeSpec>& change,
                                std::size_t replication);

// For change-point curves `s0` is unused; `change` describes the alternative.
RejectionCurve rejection_curve(const SimConfig& cfg, CurveKind kind, const KernelOp& s0,
                               const KernelOp& slope, const QuantileTable& table,
                               const std::optional<ChangeSpec>& change = std::nullopt);

std::string to_string(CurveKind kind);
std::string to_string(Dependence dependence);

}  // namespace flr
