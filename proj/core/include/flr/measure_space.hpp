#pragma once

// Discretized L^2(T, mu) spaces and the Hilbert-Schmidt operator algebra
// between them. A space is a strictly increasing grid with nonnegative
// point masses; every inner product and integral action is a weighted sum
// over that grid.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace flr {

class MeasureSpace {
 public:
  // Throws InvalidArgument unless points are strictly increasing, all
  // weights are >= 0 and at least one weight is positive.
  MeasureSpace(std::vector<double> points, std::vector<double> weights);

  // n equispaced points on [0, 1], each with mass 1/n.
  static MeasureSpace uniform_grid(std::size_t n);
  // The grid used throughout the simulation study: {0, 1/50, ..., 1}.
  static MeasureSpace default_grid() { return uniform_grid(51); }
  // Single atom of mass one (scalar responses).
  static MeasureSpace dirac(double point = 1.0);

  std::size_t size() const noexcept { return data_->points.size(); }
  std::span<const double> points() const noexcept { return data_->points; }
  std::span<const double> weights() const noexcept { return data_->weights; }
  const Eigen::VectorXd& weight_vector() const noexcept { return data_->w; }
  double point(std::size_t i) const { return data_->points[i]; }
  double weight(std::size_t i) const { return data_->weights[i]; }

  friend bool operator==(const MeasureSpace& a, const MeasureSpace& b);

 private:
  struct Data {
    std::vector<double> points;
    std::vector<double> weights;
    Eigen::VectorXd w;
  };
  std::shared_ptr<const Data> data_;
};

// One observed function, stored as its values on the grid of `space`.
class FuncObs {
 public:
  explicit FuncObs(MeasureSpace space);  // zero function
  FuncObs(MeasureSpace space, Eigen::VectorXd values);

  const MeasureSpace& space() const noexcept { return space_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return space_.size(); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  FuncObs& operator+=(const FuncObs& other);
  FuncObs& operator-=(const FuncObs& other);
  FuncObs& operator*=(double c);

 private:
  MeasureSpace space_;
  Eigen::VectorXd values_;
};

FuncObs operator+(FuncObs a, const FuncObs& b);
FuncObs operator-(FuncObs a, const FuncObs& b);
FuncObs operator*(double c, FuncObs a);

// Hilbert-Schmidt operator from `domain` to `codomain`, represented by its
// kernel values K(t_i, s_j) with i over the codomain grid and j over the
// domain grid. The action is (A f)(t_i) = sum_j K[i,j] f(s_j) w_j.
class KernelOp {
 public:
  KernelOp(MeasureSpace codomain, MeasureSpace domain);  // zero operator
  KernelOp(MeasureSpace codomain, MeasureSpace domain, Eigen::MatrixXd kernel);

  static KernelOp zero(const MeasureSpace& codomain, const MeasureSpace& domain) {
    return KernelOp(codomain, domain);
  }
  // Kernel delta_ij / w_j, the unit of the weighted action. Zero-weight
  // points get a zero diagonal entry.
  static KernelOp identity(const MeasureSpace& space);

  const MeasureSpace& codomain() const noexcept { return codomain_; }
  const MeasureSpace& domain() const noexcept { return domain_; }
  const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
  double operator()(std::size_t i, std::size_t j) const {
    return kernel_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  KernelOp& operator+=(const KernelOp& other);
  KernelOp& operator-=(const KernelOp& other);
  KernelOp& operator*=(double c);

 private:
  MeasureSpace codomain_;
  MeasureSpace domain_;
  Eigen::MatrixXd kernel_;
};

KernelOp operator+(KernelOp a, const KernelOp& b);
KernelOp operator-(KernelOp a, const KernelOp& b);
KernelOp operator*(double c, KernelOp a);

double inner(const FuncObs& f, const FuncObs& g);
double norm(const FuncObs& f);

// g (x) f : h -> g <f, h>
KernelOp outer(const FuncObs& g, const FuncObs& f);
FuncObs apply(const KernelOp& a, const FuncObs& f);
// Kernel of A o B is K_A diag(w) K_B with w the weights of A's domain.
KernelOp compose(const KernelOp& a, const KernelOp& b);
// Adjoint with respect to the weighted inner products: kernel transpose.
KernelOp adjoint(const KernelOp& a);

double hs_inner(const KernelOp& a, const KernelOp& b);
double hs_norm(const KernelOp& a);
double hs_norm_squared(const KernelOp& a);
// Largest singular value of diag(sqrt w_cod) K diag(sqrt w_dom).
double op_norm(const KernelOp& a);

bool is_symmetric(const KernelOp& a, double rel_tol = 1e-10);

}  // namespace flr
