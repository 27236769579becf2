#pragma once

// Random instances and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "flr/measure_space.hpp"
#include "flr/regression.hpp"

namespace flr::testing {

using Rng = std::mt19937_64;

inline double unif(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Strictly increasing points in [0, 1] with positive random weights.
inline MeasureSpace random_space(std::size_t n, Rng& rng) {
  std::vector<double> pts(n), w(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += unif(rng, 0.05, 1.0);
    pts[i] = t;
    w[i] = unif(rng, 0.1, 1.0);
  }
  for (double& p : pts) p /= t + 0.05;
  return MeasureSpace(pts, w);
}

inline FuncObs random_func(const MeasureSpace& s, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  return FuncObs(s, v);
}

inline KernelOp random_kernel(const MeasureSpace& cod, const MeasureSpace& dom, Rng& rng) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(cod.size()), static_cast<Eigen::Index>(dom.size()));
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) k(i, j) = gauss(rng);
  return KernelOp(cod, dom, k);
}

// mu-orthonormal functions, one per column: e = Q / sqrt(w).
inline Eigen::MatrixXd random_orthonormal(const MeasureSpace& s, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::VectorXd rs = s.weight_vector().cwiseSqrt().cwiseInverse();
  return rs.asDiagonal() * q;
}

// Symmetric PSD operator sum_i lambda_i e_i (x) e_i with the given spectrum.
inline KernelOp psd_with_spectrum(const MeasureSpace& s, const std::vector<double>& lambda,
                                  const Eigen::MatrixXd& e) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    k += lambda[i] * e.col(c) * e.col(c).transpose();
  }
  return KernelOp(s, s, k);
}

// Sample covariance (1/m) sum f_i f_i^T from m random functions.
inline KernelOp random_psd(const MeasureSpace& s, std::size_t m, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const FuncObs f = random_func(s, rng);
    k += f.values() * f.values().transpose();
  }
  return KernelOp(s, s, k / static_cast<double>(m));
}

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues descending.
// Written independently of Eigen's solvers to serve as an oracle.
struct JacobiResult {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns
};

inline JacobiResult jacobi_eigen(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  JacobiResult r;
  r.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.values.push_back(a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]));
    r.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return r;
}

// Weighted symmetrization diag(sqrt w) K diag(sqrt w).
inline Eigen::MatrixXd symmetrized(const KernelOp& c) {
  const Eigen::VectorXd r = c.domain().weight_vector().cwiseSqrt();
  return r.asDiagonal() * c.kernel() * r.asDiagonal();
}

// Noiseless or noisy data Y = S X + sigma * eps with Gaussian regressors
// that have a decaying spectrum, so every prefix has full rank.
inline Dataset random_dataset(const KernelOp& s, std::size_t n, double sigma, Rng& rng) {
  const MeasureSpace& xs = s.domain();
  const MeasureSpace& ys = s.codomain();
  const auto p = static_cast<Eigen::Index>(xs.size());
  const auto q = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p), y(static_cast<Eigen::Index>(n), q);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = gauss(rng) / (1.0 + 0.5 * static_cast<double>(j));
    const FuncObs xi(xs, x.row(i).transpose());
    y.row(i) = apply(s, xi).values().transpose();
    for (Eigen::Index j = 0; j < q; ++j) y(i, j) += sigma * gauss(rng);
  }
  return Dataset(xs, ys, std::move(x), std::move(y));
}

}  // namespace flr::testing
