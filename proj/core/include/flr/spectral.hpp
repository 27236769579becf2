#pragma once

// Empirical covariance operators and their spectral calculus in the weighted
// geometry: eigensystems, spectral cut-off inverses, projections and PSD
// square roots.

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "flr/measure_space.hpp"

namespace flr {

// Relative threshold below which an eigenvalue counts as zero when inverting.
inline constexpr double kDefaultRankTolerance = 1e-10;

// Number of terms floor(x n) in a prefix of relative length x. Products such
// as 0.29 * 100 land a hair below the integer, so a 1e-9 relative slack is
// applied before flooring. Throws InvalidArgument unless 0 < x <= 1.
std::size_t prefix_length(double x, std::size_t n);

// Eigenvalues in non-increasing order with mu-orthonormal eigenfunctions
// (stored as columns of values on the space's grid).
class EigenSystem {
 public:
  EigenSystem(MeasureSpace space, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenfunctions,
              std::size_t observations = 0);

  const MeasureSpace& space() const noexcept { return space_; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double eigenvalue(std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }
  const Eigen::MatrixXd& eigenfunction_matrix() const noexcept { return functions_; }
  FuncObs eigenfunction(std::size_t i) const;
  // Sample size behind the estimate, 0 when not from data. Used in errors.
  std::size_t observations() const noexcept { return observations_; }

 private:
  MeasureSpace space_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd functions_;
  std::size_t observations_;
};

// (1/divisor) sum_{n < count} row_n (x) row_n for observations stored as rows.
KernelOp covariance_rows(const MeasureSpace& space, const Eigen::MatrixXd& rows, std::size_t count,
                         double divisor);

// (1/N) sum_{n <= floor(xN)} X_n (x) X_n. The divisor stays N for every x.
KernelOp covariance_prefix(std::span<const FuncObs> sample, double x);

// Top-m eigenpairs of a symmetric PSD operator on a single space. Signs are
// aligned to `reference` where it has a matching eigenfunction, otherwise the
// first entry with magnitude above 1e-8 is made positive.
EigenSystem eigensystem(const KernelOp& c, std::size_t m,
                        const EigenSystem* reference = nullptr, std::size_t observations = 0);
// All eigenpairs supported on positive-weight points.
EigenSystem eigensystem(const KernelOp& c, const EigenSystem* reference = nullptr,
                        std::size_t observations = 0);

// sum_{i<=k} (1/lambda_i) e_i (x) e_i. Throws RankDeficiencyError when
// lambda_k <= tol * lambda_1.
KernelOp regularized_inverse(const EigenSystem& eigs, std::size_t k,
                             double tol = kDefaultRankTolerance);
// Validates the same condition without building the operator.
void require_rank(const EigenSystem& eigs, std::size_t k, double tol = kDefaultRankTolerance);

// sum_{i<=k} e_i (x) e_i
KernelOp projection(const EigenSystem& eigs, std::size_t k);

KernelOp sqrt_op(const KernelOp& c);
KernelOp sqrt_op(const EigenSystem& full);

}  // namespace flr
