#include "flr/spectral.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "flr/error.hpp"

namespace flr {

namespace {

constexpr double kNegativeClamp = 1e-12;
constexpr double kSignThreshold = 1e-8;

void align_sign(Eigen::Ref<Eigen::VectorXd> e, const Eigen::VectorXd& w,
                const Eigen::MatrixXd* reference, Eigen::Index i) {
  if (reference != nullptr && i < reference->cols()) {
    const double ip = (e.cwiseProduct(reference->col(i))).dot(w);
    if (ip < 0.0) e = -e;
    return;
  }
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (std::abs(e[j]) > kSignThreshold) {
      if (e[j] < 0.0) e = -e;
      return;
    }
  }
}

}  // namespace

std::size_t prefix_length(double x, std::size_t n) {
  if (!(x > 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "prefix fraction " << x << " is outside (0, 1]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const double raw = x * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-9)));
}

EigenSystem::EigenSystem(MeasureSpace space, Eigen::VectorXd eigenvalues,
                         Eigen::MatrixXd eigenfunctions, std::size_t observations)
    : space_(std::move(space)),
      values_(std::move(eigenvalues)),
      functions_(std::move(eigenfunctions)),
      observations_(observations) {
  if (functions_.cols() != values_.size() ||
      static_cast<std::size_t>(functions_.rows()) != space_.size()) {
    throw Error(ErrorKind::Dimension, "eigensystem shape mismatch");
  }
}

FuncObs EigenSystem::eigenfunction(std::size_t i) const {
  if (i >= count()) throw Error(ErrorKind::InvalidArgument, "eigenfunction index out of range");
  return FuncObs(space_, functions_.col(static_cast<Eigen::Index>(i)));
}

KernelOp covariance_rows(const MeasureSpace& space, const Eigen::MatrixXd& rows, std::size_t count,
                         double divisor) {
  if (static_cast<std::size_t>(rows.cols()) != space.size()) {
    throw Error(ErrorKind::Dimension, "observations do not match the grid size");
  }
  if (count > static_cast<std::size_t>(rows.rows())) {
    throw Error(ErrorKind::InvalidArgument, "covariance prefix exceeds the sample");
  }
  const auto head = rows.topRows(static_cast<Eigen::Index>(count));
  Eigen::MatrixXd k = head.transpose() * head;
  k /= divisor;
  return KernelOp(space, space, std::move(k));
}

KernelOp covariance_prefix(std::span<const FuncObs> sample, double x) {
  if (sample.empty()) throw Error(ErrorKind::InsufficientPrefix, "empty sample");
  const std::size_t n = sample.size();
  const std::size_t m = prefix_length(x, n);
  if (m == 0) throw Error(ErrorKind::InsufficientPrefix, "prefix floor(xN) is empty");
  const MeasureSpace& space = sample.front().space();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sample[i].space() == space)) throw Error(ErrorKind::Dimension, "sample mixes spaces");
    rows.row(static_cast<Eigen::Index>(i)) = sample[i].values().transpose();
  }
  return covariance_rows(space, rows, m, static_cast<double>(n));
}

EigenSystem eigensystem(const KernelOp& c, std::size_t m, const EigenSystem* reference,
                        std::size_t observations) {
  if (!(c.codomain() == c.domain())) {
    throw Error(ErrorKind::Dimension, "eigensystem needs an operator on a single space");
  }
  if (!is_symmetric(c)) throw Error(ErrorKind::NotSymmetric, "eigensystem of an asymmetric kernel");
  const MeasureSpace& space = c.domain();
  const auto weights = space.weights();

  std::vector<Eigen::Index> support;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) support.push_back(static_cast<Eigen::Index>(j));
  }
  const auto p = static_cast<Eigen::Index>(support.size());
  if (m > support.size()) {
    std::ostringstream os;
    os << "requested " << m << " eigenpairs but the space supports " << support.size();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }

  Eigen::VectorXd sqrt_w(p);
  for (Eigen::Index a = 0; a < p; ++a) sqrt_w[a] = std::sqrt(weights[static_cast<std::size_t>(support[a])]);
  Eigen::MatrixXd sym(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) {
      sym(a, b) = sqrt_w[a] * c.kernel()(support[a], support[b]) * sqrt_w[b];
    }
  }
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "eigensolver failed");
  const Eigen::VectorXd& asc = solver.eigenvalues();
  const double scale = asc.size() == 0 ? 0.0 : asc.cwiseAbs().maxCoeff();

  const auto mm = static_cast<Eigen::Index>(m);
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::VectorXd values(mm);
  Eigen::MatrixXd functions = Eigen::MatrixXd::Zero(n, mm);
  const Eigen::MatrixXd* ref = reference != nullptr ? &reference->eigenfunction_matrix() : nullptr;
  if (reference != nullptr && !(reference->space() == space)) {
    throw Error(ErrorKind::Dimension, "reference eigensystem lives on another space");
  }

  for (Eigen::Index i = 0; i < p; ++i) {
    const double lambda = asc[p - 1 - i];
    if (lambda < -kNegativeClamp * scale) {
      std::ostringstream os;
      os << "operator is not positive semidefinite (eigenvalue " << lambda << ")";
      throw Error(ErrorKind::NotPositiveSemidefinite, os.str());
    }
    if (i >= mm) continue;
    values[i] = lambda < 0.0 ? 0.0 : lambda;
    const auto v = solver.eigenvectors().col(p - 1 - i);
    for (Eigen::Index a = 0; a < p; ++a) functions(support[a], i) = v[a] / sqrt_w[a];
    const double nrm = std::sqrt(functions.col(i).cwiseAbs2().dot(space.weight_vector()));
    if (nrm > 0.0) functions.col(i) /= nrm;
    align_sign(functions.col(i), space.weight_vector(), ref, i);
  }
  return EigenSystem(space, std::move(values), std::move(functions), observations);
}

EigenSystem eigensystem(const KernelOp& c, const EigenSystem* reference, std::size_t observations) {
  std::size_t support = 0;
  for (double w : c.domain().weights()) support += w > 0.0 ? 1 : 0;
  return eigensystem(c, support, reference, observations);
}

void require_rank(const EigenSystem& eigs, std::size_t k, double tol) {
  if (k == 0 || k > eigs.count()) {
    std::ostringstream os;
    os << "cut-off level k=" << k << " outside 1.." << eigs.count();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const double l1 = eigs.eigenvalue(0);
  const double lk = eigs.eigenvalue(k - 1);
  if (!(lk > tol * l1) || !(lk > 0.0)) throw RankDeficiencyError(k, eigs.observations(), lk, l1);
}

KernelOp regularized_inverse(const EigenSystem& eigs, std::size_t k, double tol) {
  require_rank(eigs, k, tol);
  const auto kk = static_cast<Eigen::Index>(k);
  const auto e = eigs.eigenfunction_matrix().leftCols(kk);
  const Eigen::VectorXd inv = eigs.eigenvalues().head(kk).cwiseInverse();
  return KernelOp(eigs.space(), eigs.space(), e * inv.asDiagonal() * e.transpose());
}

KernelOp projection(const EigenSystem& eigs, std::size_t k) {
  if (k > eigs.count()) {
    std::ostringstream os;
    os << "projection level k=" << k << " exceeds " << eigs.count() << " eigenfunctions";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const auto e = eigs.eigenfunction_matrix().leftCols(static_cast<Eigen::Index>(k));
  return KernelOp(eigs.space(), eigs.space(), e * e.transpose());
}

KernelOp sqrt_op(const EigenSystem& full) {
  const Eigen::VectorXd r = full.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const auto& e = full.eigenfunction_matrix();
  return KernelOp(full.space(), full.space(), e * r.asDiagonal() * e.transpose());
}

KernelOp sqrt_op(const KernelOp& c) { return sqrt_op(eigensystem(c)); }

}  // namespace flr
