#include "flr/measure_space.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "flr/error.hpp"

namespace flr {

namespace {

void require_same(const MeasureSpace& a, const MeasureSpace& b, const char* what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << ": spaces differ (" << a.size() << " vs " << b.size() << " points)";
    throw Error(ErrorKind::Dimension, os.str());
  }
}

}  // namespace

MeasureSpace::MeasureSpace(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "measure space needs at least one point");
  if (points.size() != weights.size()) {
    throw Error(ErrorKind::Dimension, "measure space: points and weights differ in length");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !std::isfinite(weights[i])) {
      throw Error(ErrorKind::InvalidArgument, "measure space: non-finite point or weight");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "measure space: points must be strictly increasing");
    }
    if (weights[i] < 0.0) throw Error(ErrorKind::InvalidArgument, "measure space: negative weight");
    any_positive = any_positive || weights[i] > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::InvalidArgument, "measure space: all weights are zero");

  auto data = std::make_shared<Data>();
  data->w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  data->points = std::move(points);
  data->weights = std::move(weights);
  data_ = std::move(data);
}

MeasureSpace MeasureSpace::uniform_grid(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "uniform grid needs at least one point");
  if (n == 1) return dirac(0.0);
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return MeasureSpace(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

MeasureSpace MeasureSpace::dirac(double point) { return MeasureSpace({point}, {1.0}); }

bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->points == b.data_->points && a.data_->weights == b.data_->weights;
}

FuncObs::FuncObs(MeasureSpace space)
    : space_(std::move(space)), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space_.size()))) {}

FuncObs::FuncObs(MeasureSpace space, Eigen::VectorXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != space_.size()) {
    throw Error(ErrorKind::Dimension, "function values do not match the grid size");
  }
  if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "function values must be finite");
}

FuncObs& FuncObs::operator+=(const FuncObs& other) {
  require_same(space_, other.space_, "function sum");
  values_ += other.values_;
  return *this;
}

FuncObs& FuncObs::operator-=(const FuncObs& other) {
  require_same(space_, other.space_, "function difference");
  values_ -= other.values_;
  return *this;
}

FuncObs& FuncObs::operator*=(double c) {
  values_ *= c;
  return *this;
}

FuncObs operator+(FuncObs a, const FuncObs& b) { return a += b; }
FuncObs operator-(FuncObs a, const FuncObs& b) { return a -= b; }
FuncObs operator*(double c, FuncObs a) { return a *= c; }

KernelOp::KernelOp(MeasureSpace codomain, MeasureSpace domain)
    : codomain_(std::move(codomain)),
      domain_(std::move(domain)),
      kernel_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(codomain_.size()),
                                    static_cast<Eigen::Index>(domain_.size()))) {}

KernelOp::KernelOp(MeasureSpace codomain, MeasureSpace domain, Eigen::MatrixXd kernel)
    : codomain_(std::move(codomain)), domain_(std::move(domain)), kernel_(std::move(kernel)) {
  if (static_cast<std::size_t>(kernel_.rows()) != codomain_.size() ||
      static_cast<std::size_t>(kernel_.cols()) != domain_.size()) {
    throw Error(ErrorKind::Dimension, "kernel shape does not match codomain x domain");
  }
  if (!kernel_.allFinite()) throw Error(ErrorKind::InvalidArgument, "kernel values must be finite");
}

KernelOp KernelOp::identity(const MeasureSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = space.weight(static_cast<std::size_t>(i));
    if (w > 0.0) k(i, i) = 1.0 / w;
  }
  return KernelOp(space, space, std::move(k));
}

KernelOp& KernelOp::operator+=(const KernelOp& other) {
  require_same(codomain_, other.codomain_, "operator sum");
  require_same(domain_, other.domain_, "operator sum");
  kernel_ += other.kernel_;
  return *this;
}

KernelOp& KernelOp::operator-=(const KernelOp& other) {
  require_same(codomain_, other.codomain_, "operator difference");
  require_same(domain_, other.domain_, "operator difference");
  kernel_ -= other.kernel_;
  return *this;
}

KernelOp& KernelOp::operator*=(double c) {
  kernel_ *= c;
  return *this;
}

KernelOp operator+(KernelOp a, const KernelOp& b) { return a += b; }
KernelOp operator-(KernelOp a, const KernelOp& b) { return a -= b; }
KernelOp operator*(double c, KernelOp a) { return a *= c; }

double inner(const FuncObs& f, const FuncObs& g) {
  require_same(f.space(), g.space(), "inner product");
  const auto& w = f.space().weight_vector();
  double s = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) s += f.values()[j] * g.values()[j] * w[j];
  return s;
}

double norm(const FuncObs& f) { return std::sqrt(inner(f, f)); }

KernelOp outer(const FuncObs& g, const FuncObs& f) {
  return KernelOp(g.space(), f.space(), g.values() * f.values().transpose());
}

FuncObs apply(const KernelOp& a, const FuncObs& f) {
  require_same(a.domain(), f.space(), "operator action");
  Eigen::VectorXd weighted = f.values().cwiseProduct(a.domain().weight_vector());
  return FuncObs(a.codomain(), a.kernel() * weighted);
}

KernelOp compose(const KernelOp& a, const KernelOp& b) {
  require_same(a.domain(), b.codomain(), "composition");
  return KernelOp(a.codomain(), b.domain(),
                  a.kernel() * a.domain().weight_vector().asDiagonal() * b.kernel());
}

KernelOp adjoint(const KernelOp& a) {
  return KernelOp(a.domain(), a.codomain(), a.kernel().transpose());
}

double hs_inner(const KernelOp& a, const KernelOp& b) {
  require_same(a.codomain(), b.codomain(), "HS inner product");
  require_same(a.domain(), b.domain(), "HS inner product");
  const auto& wc = a.codomain().weight_vector();
  const auto& wd = a.domain().weight_vector();
  double s = 0.0;
  for (Eigen::Index j = 0; j < wd.size(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < wc.size(); ++i) col += a.kernel()(i, j) * b.kernel()(i, j) * wc[i];
    s += col * wd[j];
  }
  return s;
}

double hs_norm_squared(const KernelOp& a) { return hs_inner(a, a); }

double hs_norm(const KernelOp& a) { return std::sqrt(hs_norm_squared(a)); }

double op_norm(const KernelOp& a) {
  const Eigen::VectorXd sc = a.codomain().weight_vector().cwiseSqrt();
  const Eigen::VectorXd sd = a.domain().weight_vector().cwiseSqrt();
  const Eigen::MatrixXd m = sc.asDiagonal() * a.kernel() * sd.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() == 0 ? 0.0 : sv[0];
}

bool is_symmetric(const KernelOp& a, double rel_tol) {
  if (!(a.codomain() == a.domain())) return false;
  const double scale = a.kernel().cwiseAbs().maxCoeff();
  const double diff = (a.kernel() - a.kernel().transpose()).cwiseAbs().maxCoeff();
  return diff <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace flr
