#include "flr/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "flr/changepoint.hpp"
#include "flr/error.hpp"
#include "flr/parallel.hpp"
#include "flr/spectral.hpp"

namespace flr {

void SimConfig::validate() const {
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "sample size must be at least 4");
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "cut-off level k must be positive");
  if (replications == 0) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in [0, 1)");
  if (!(noise_scale >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise scale must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "Delta grid must be >= 0");
    if (i > 0 && deltas[i] < deltas[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "Delta grid must be non-decreasing");
    }
  }
}

double phi_s0(double s, double t) {
  const double d = s - t;
  return 1.0 - d * d;
}

double phi_s(double s, double t) {
  const double d = std::abs(s - t);
  return 1.0 - 0.8 * d * d + 0.2 * std::cos(d / 5.0);
}

KernelOp kernel_op_from_fn(const std::function<double(double, double)>& phi,
                           const MeasureSpace& codomain, const MeasureSpace& domain) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(codomain.size()), static_cast<Eigen::Index>(domain.size()));
  for (std::size_t i = 0; i < codomain.size(); ++i) {
    for (std::size_t j = 0; j < domain.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi(domain.point(j), codomain.point(i));
    }
  }
  return KernelOp(codomain, domain, std::move(k));
}

FuncObs beta_shift_curve(const MeasureSpace& space, double a, double b, double shift) {
  const double scale = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
  Eigen::VectorXd v(static_cast<Eigen::Index>(space.size()));
  for (std::size_t j = 0; j < space.size(); ++j) {
    const double t = space.point(j);
    v[static_cast<Eigen::Index>(j)] = scale * std::pow(t, a) * std::pow(1.0 - t, b) + shift;
  }
  return FuncObs(space, std::move(v));
}

Eigen::MatrixXd beta_shift_regressors(const MeasureSpace& space, std::size_t n, Engine& eng) {
  std::uniform_real_distribution<double> shape(2.0, 5.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = shape(eng);
    const double b = shape(eng);
    const double z = gauss(eng);
    out.row(static_cast<Eigen::Index>(i)) = beta_shift_curve(space, a, b, z).values().transpose();
  }
  return out;
}

Eigen::MatrixXd ou_errors(const MeasureSpace& space, std::size_t n, Engine& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t p = space.size();
  std::vector<double> decay(p, 0.0), innovation(p, 0.0);
  for (std::size_t j = 1; j < p; ++j) {
    const double dt = space.point(j) - space.point(j - 1);
    decay[j] = std::exp(-dt);
    innovation[j] = std::sqrt(0.5 * (1.0 - std::exp(-2.0 * dt)));
  }
  const double root_half = std::sqrt(0.5);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    double e = root_half * gauss(eng);
    out(r, 0) = e;
    for (std::size_t j = 1; j < p; ++j) {
      e = decay[j] * e + innovation[j] * gauss(eng);
      out(r, static_cast<Eigen::Index>(j)) = e;
    }
  }
  return out;
}

Eigen::MatrixXd ar1_lift(const Eigen::MatrixXd& series, double rho, std::size_t burnin) {
  const auto total = static_cast<std::size_t>(series.rows());
  if (total <= burnin) {
    throw Error(ErrorKind::InvalidArgument, "AR(1) input is not longer than the burn-in period");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(total - burnin), series.cols());
  Eigen::RowVectorXd state = Eigen::RowVectorXd::Zero(series.cols());
  for (std::size_t i = 0; i < total; ++i) {
    state = rho * state + series.row(static_cast<Eigen::Index>(i));
    if (i >= burnin) out.row(static_cast<Eigen::Index>(i - burnin)) = state;
  }
  return out;
}

namespace {

// X and eps for one dataset; streams 0 and 1 of `seed`.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> draw_inputs(const MeasureSpace& xs, const MeasureSpace& ys,
                                                        std::size_t n, Dependence dep, double rho,
                                                        std::size_t burnin, std::uint64_t seed) {
  Engine ex = make_engine(seed, 0);
  Engine ee = make_engine(seed, 1);
  if (dep == Dependence::Iid) return {beta_shift_regressors(xs, n, ex), ou_errors(ys, n, ee)};
  Eigen::MatrixXd x = beta_shift_regressors(xs, n + burnin, ex);
  Eigen::MatrixXd e = ou_errors(ys, n + burnin, ee);
  return {ar1_lift(x, rho, burnin), ar1_lift(e, rho, burnin)};
}

Eigen::MatrixXd responses(const Eigen::MatrixXd& x, const KernelOp& slope) {
  const Eigen::MatrixXd weighted = slope.kernel() * slope.domain().weight_vector().asDiagonal();
  return x * weighted.transpose();
}

}  // namespace

Dataset gen_dataset(const SimConfig& cfg, const KernelOp& slope, const std::optional<ChangeSpec>& change) {
  const MeasureSpace& xs = slope.domain();
  const MeasureSpace& ys = slope.codomain();
  auto [x, e] = draw_inputs(xs, ys, cfg.n, cfg.dependence, cfg.rho, cfg.burnin, cfg.seed);
  Eigen::MatrixXd y = responses(x, slope);
  if (change) {
    if (!(change->after.domain() == xs) || !(change->after.codomain() == ys)) {
      throw Error(ErrorKind::Dimension, "post-change slope lives on other spaces");
    }
    const std::size_t split = prefix_length(change->theta, cfg.n);
    const auto tail = static_cast<Eigen::Index>(cfg.n - split);
    y.bottomRows(tail) = responses(x.bottomRows(tail), change->after);
  }
  if (cfg.noise_scale != 0.0) y += cfg.noise_scale * e;
  return Dataset(xs, ys, std::move(x), std::move(y));
}

KernelOp covariance_oracle(const MeasureSpace& space, Dependence dependence, double rho,
                           std::size_t burnin, std::size_t n, std::uint64_t seed) {
  Engine ex = make_engine(seed, 0);
  Eigen::MatrixXd x = dependence == Dependence::Iid
                          ? beta_shift_regressors(space, n, ex)
                          : ar1_lift(beta_shift_regressors(space, n + burnin, ex), rho, burnin);
  x.rowwise() -= x.colwise().mean();
  return covariance_rows(space, x, n, static_cast<double>(n));
}

namespace {

// ||A e_i||^2 accumulated over the first k eigenfunctions of gamma.
double explained(const KernelOp& a, const KernelOp& gamma, std::size_t k) {
  const EigenSystem eigs = eigensystem(gamma);
  if (k == 0 || k > eigs.count()) throw Error(ErrorKind::InvalidArgument, "k outside the rank of gamma");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const FuncObs ae = apply(a, eigs.eigenfunction(i));
    total += inner(ae, ae);
  }
  return total;
}

double ratio(const KernelOp& a, const KernelOp& gamma, std::size_t k) {
  const double whole = hs_norm_squared(a);
  if (!(whole > 0.0)) throw Error(ErrorKind::UndefinedRatio, "relative explanation of a zero difference");
  return explained(a, gamma, k) / whole;
}

}  // namespace

double rel_explanation(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma, std::size_t k) {
  return ratio(s - s0, gamma, k);
}

double rel_explanation_pred(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma,
                            std::size_t k) {
  return ratio(compose(s - s0, sqrt_op(gamma)), gamma, k);
}

double prediction_distance(const KernelOp& s, const KernelOp& s0, const KernelOp& gamma) {
  return hs_norm_squared(compose(s - s0, sqrt_op(gamma)));
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Location: return "location";
    case CurveKind::Prediction: return "prediction";
    case CurveKind::ChangePoint: return "changepoint";
  }
  return "unknown";
}

std::string to_string(Dependence dependence) {
  return dependence == Dependence::Iid ? "iid" : "ar1";
}

ReplicationStat run_replication(const SimConfig& cfg, CurveKind kind, const KernelOp& s0,
                                const KernelOp& slope, const std::optional<ChangeSpec>& change,
                                std::size_t replication) {
  SimConfig rep = cfg;
  rep.seed = derive_seed(cfg.seed, replication);
  ReplicationStat out;
  try {
    const Dataset data = gen_dataset(rep, slope, change);
    std::map<double, double> path;
    if (kind == CurveKind::ChangePoint) {
      const ChangePointFit fit = cusum_theta(data);
      out.theta = fit.theta;
      const SplitPlan plan = SplitPlan::estimated(fit, data.size());
      path = change_path(data, plan, cfg.nu.support(), cfg.k, DistanceKind::Location, cfg.center);
    } else {
      const DistanceKind dk = kind == CurveKind::Location ? DistanceKind::Location : DistanceKind::Prediction;
      path = distance_path(data, s0, cfg.nu.support(), cfg.k, dk, cfg.center);
    }
    out.normalizer = normalizer(path, cfg.nu);
    out.d1 = path.at(1.0);
    out.ok = out.normalizer > 0.0;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::RankDeficiency:
      case ErrorKind::InsufficientPrefix:
      case ErrorKind::DegenerateNormalizer:
      case ErrorKind::InvalidArgument:
        out.ok = false;
        break;
      default:
        throw;
    }
  }
  return out;
}

RejectionCurve rejection_curve(const SimConfig& cfg, CurveKind kind, const KernelOp& s0,
                               const KernelOp& slope, const QuantileTable& table,
                               const std::optional<ChangeSpec>& change) {
  cfg.validate();
  if (!(table.nu() == cfg.nu)) throw Error(ErrorKind::InvalidArgument, "quantile table nu differs from config nu");
  const double q = table.quantile(cfg.alpha);

  std::vector<ReplicationStat> stats(cfg.replications);
  parallel_for(cfg.replications, cfg.threads,
               [&](std::size_t r) { stats[r] = run_replication(cfg, kind, s0, slope, change, r); });

  RejectionCurve curve;
  curve.deltas = cfg.deltas;
  std::vector<std::size_t> rejections(cfg.deltas.size(), 0);
  for (const auto& s : stats) {
    if (!s.ok) {
      ++curve.failures;
      continue;
    }
    ++curve.successes;
    for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
      if (self_normalized_statistic(s.d1, s.normalizer, cfg.deltas[d]) > q) ++rejections[d];
    }
  }
  const double ok = static_cast<double>(curve.successes);
  for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
    const double p = ok > 0 ? static_cast<double>(rejections[d]) / ok : 0.0;
    curve.rates.push_back(p);
    curve.se.push_back(ok > 0 ? std::sqrt(p * (1.0 - p) / ok) : 0.0);
  }

  std::ostringstream echo;
  echo << std::setprecision(17);
  echo << "mode: " << to_string(kind) << "\nn: " << cfg.n << "\nk: " << cfg.k
       << "\ndependence: " << to_string(cfg.dependence) << "\nrho: " << cfg.rho
       << "\nburnin: " << cfg.burnin << "\nnoise_scale: " << cfg.noise_scale << "\nseed: " << cfg.seed
       << "\nalpha: " << cfg.alpha << "\nquantile: " << q << "\nreplications: " << cfg.replications
       << "\ncenter: " << (cfg.center ? "true" : "false") << "\nnu_support:";
  for (double x : cfg.nu.support()) echo << ' ' << x;
  echo << "\nnu_weights:";
  for (double w : cfg.nu.weights()) echo << ' ' << w;
  if (change) echo << "\nchange_theta: " << change->theta;
  echo << "\nsuccesses: " << curve.successes << "\nfailures: " << curve.failures << '\n';
  curve.config_echo = echo.str();
  return curve;
}

void RejectionCurve::write_csv(std::ostream& os) const {
  std::istringstream lines(config_echo);
  std::string line;
  while (std::getline(lines, line)) os << "# " << line << '\n';
  os << "delta,rejection_rate,mc_se,n_fail\n";
  os << std::setprecision(17);
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    os << deltas[d] << ',' << rates[d] << ',' << se[d] << ',' << failures << '\n';
  }
}

}  // namespace flr
