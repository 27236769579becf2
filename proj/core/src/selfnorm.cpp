#include "flr/selfnorm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "flr/error.hpp"
#include "flr/parallel.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

constexpr double kDenominatorFloor = 1e-300;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double lookup(const std::map<double, double>& path, double x) {
  const auto it = path.find(x);
  if (it == path.end()) {
    std::ostringstream os;
    os << "sequential path has no value at x=" << x;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return it->second;
}

std::vector<std::size_t> grid_indices(const NuMeasure& nu, std::size_t steps) {
  std::vector<std::size_t> idx;
  for (double x : nu.support()) {
    const double pos = x * static_cast<double>(steps);
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 * static_cast<double>(steps)) {
      std::ostringstream os;
      os << "support point " << x << " is not a multiple of 1/" << steps;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    idx.push_back(static_cast<std::size_t>(r));
  }
  return idx;
}

}  // namespace

NuMeasure::NuMeasure(std::vector<double> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty() || support_.size() != weights_.size()) {
    throw Error(ErrorKind::InvalidArgument, "nu needs matching, non-empty support and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!(support_[i] > 0.0 && support_[i] < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "nu support must lie in (0, 1)");
    }
    if (i > 0 && !(support_[i] > support_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "nu support must be strictly increasing");
    }
    if (!(weights_[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "nu weights must be positive");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "nu weights must sum to one");
}

NuMeasure NuMeasure::uniform(std::vector<double> support) {
  const std::size_t n = support.size();
  return NuMeasure(std::move(support), std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n)));
}

NuMeasure NuMeasure::default_measure() { return uniform({0.2, 0.4, 0.6, 0.8}); }

double normalizer(const std::map<double, double>& path, const NuMeasure& nu) {
  const double d1 = lookup(path, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < nu.support().size(); ++i) {
    const double x = nu.support()[i];
    const double dev = lookup(path, x) - d1;
    s += nu.weights()[i] * (x * x * x * x) * dev * dev;
  }
  return std::sqrt(s);
}

QuantileTable::QuantileTable(NuMeasure nu, std::size_t steps, std::size_t reps, std::uint64_t seed,
                             std::size_t degenerate, std::vector<QuantileRow> rows)
    : nu_(std::move(nu)),
      steps_(steps),
      reps_(reps),
      seed_(seed),
      degenerate_(degenerate),
      rows_(std::move(rows)) {}

const QuantileRow& QuantileTable::row(double alpha) const {
  for (const auto& r : rows_) {
    if (std::abs(r.alpha - alpha) <= 1e-12) return r;
  }
  std::ostringstream os;
  os << "quantile table has no entry for alpha=" << alpha;
  throw Error(ErrorKind::InvalidArgument, os.str());
}

double QuantileTable::quantile(double alpha) const { return row(alpha).quantile; }

void QuantileTable::write(std::ostream& os) const {
  os << "# W quantile table\n";
  os << "nu_support";
  for (double x : nu_.support()) os << ' ' << fmt(x);
  os << "\nnu_weights";
  for (double w : nu_.weights()) os << ' ' << fmt(w);
  os << "\nsteps " << steps_ << "\nreps " << reps_ << "\nseed " << seed_ << "\ndegenerate "
     << degenerate_ << "\nalpha quantile se\n";
  for (const auto& r : rows_) os << fmt(r.alpha) << ' ' << fmt(r.quantile) << ' ' << fmt(r.se) << '\n';
}

QuantileTable QuantileTable::read(std::istream& is) {
  std::vector<double> support, weights;
  std::size_t steps = 0, reps = 0, degenerate = 0;
  std::uint64_t seed = 0;
  std::vector<QuantileRow> rows;
  bool in_rows = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "quantile table line " << lineno << ": " << why;
    throw Error(ErrorKind::Parse, os.str());
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (in_rows) {
      QuantileRow r;
      if (!(ls >> r.alpha >> r.quantile >> r.se)) fail("expected 'alpha quantile se'");
      rows.push_back(r);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "nu_support" || key == "nu_weights") {
      auto& dst = key == "nu_support" ? support : weights;
      double v;
      while (ls >> v) dst.push_back(v);
      if (!ls.eof()) fail("bad number in " + key);
    } else if (key == "steps") {
      if (!(ls >> steps)) fail("bad steps");
    } else if (key == "reps") {
      if (!(ls >> reps)) fail("bad reps");
    } else if (key == "seed") {
      if (!(ls >> seed)) fail("bad seed");
    } else if (key == "degenerate") {
      if (!(ls >> degenerate)) fail("bad degenerate count");
    } else if (key == "alpha") {
      in_rows = true;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!in_rows || rows.empty()) throw Error(ErrorKind::Parse, "quantile table has no rows");
  return QuantileTable(NuMeasure(std::move(support), std::move(weights)), steps, reps, seed, degenerate,
                       std::move(rows));
}

void QuantileTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write(os);
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

QuantileTable QuantileTable::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return read(is);
}

WSample simulate_w(const NuMeasure& nu, std::size_t reps, std::size_t steps, std::uint64_t seed,
                   unsigned threads) {
  if (steps == 0) throw Error(ErrorKind::InvalidArgument, "steps must be positive");
  const std::vector<std::size_t> idx = grid_indices(nu, steps);
  const double sd = 1.0 / std::sqrt(static_cast<double>(steps));

  WSample out;
  out.values.assign(reps, 0.0);
  std::vector<std::size_t> redraws(reps, 0);
  parallel_for(reps, threads, [&](std::size_t i) {
    Engine eng = make_engine(seed, i);
    std::normal_distribution<double> gauss(0.0, sd);
    std::vector<double> at(idx.size());
    for (;;) {
      double b = 0.0;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= steps; ++j) {
        b += gauss(eng);
        while (next < idx.size() && idx[next] == j) at[next++] = b;
      }
      double den = 0.0;
      for (std::size_t s = 0; s < idx.size(); ++s) {
        const double x = nu.support()[s];
        const double bridge = at[s] - x * b;
        den += nu.weights()[s] * x * x * bridge * bridge;
      }
      if (den >= kDenominatorFloor) {
        out.values[i] = b / std::sqrt(den);
        return;
      }
      ++redraws[i];
    }
  });
  for (std::size_t r : redraws) out.degenerate += r;
  return out;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_standard_error(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double half = std::sqrt(p * (1.0 - p) / n);
  const double lo = std::clamp(p - half, 0.0, 1.0);
  const double hi = std::clamp(p + half, 0.0, 1.0);
  return 0.5 * (empirical_quantile(sorted, hi) - empirical_quantile(sorted, lo));
}

QuantileTable w_quantile(const NuMeasure& nu, std::span<const double> alphas, std::size_t reps,
                         std::size_t steps, std::uint64_t seed, unsigned threads) {
  if (reps < 10000) throw Error(ErrorKind::InvalidArgument, "need at least 1e4 replications");
  if (steps < 500) throw Error(ErrorKind::InvalidArgument, "need at least 500 Brownian steps");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  }
  WSample sample = simulate_w(nu, reps, steps, seed, threads);
  std::sort(sample.values.begin(), sample.values.end());

  std::vector<double> levels(alphas.begin(), alphas.end());
  std::sort(levels.begin(), levels.end(), std::greater<>());  // quantiles ascending
  std::vector<QuantileRow> rows;
  for (double a : levels) {
    rows.push_back({a, empirical_quantile(sample.values, 1.0 - a),
                    quantile_standard_error(sample.values, 1.0 - a)});
  }
  return QuantileTable(nu, steps, reps, seed, sample.degenerate, std::move(rows));
}

double self_normalized_statistic(double d1, double v, double delta) { return (d1 - delta) / v; }

TestResult decide(std::map<double, double> path, const NuMeasure& nu, double delta, double alpha,
                  const QuantileTable& table, std::size_t k) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold Delta must be >= 0");
  if (!(table.nu() == nu)) {
    throw Error(ErrorKind::InvalidArgument, "quantile table was simulated for a different nu");
  }
  const double v = normalizer(path, nu);
  if (!(v > 0.0)) {
    throw Error(ErrorKind::DegenerateNormalizer, "normalizer is zero: the sequential path is constant");
  }
  TestResult r;
  r.normalizer = v;
  r.statistic = self_normalized_statistic(lookup(path, 1.0), v, delta);
  r.quantile = table.quantile(alpha);
  r.reject = r.statistic > r.quantile;
  r.path = std::move(path);
  r.delta = delta;
  r.alpha = alpha;
  r.k = k;
  return r;
}

TestResult test_location(const Dataset& data, const KernelOp& s0, double delta, std::size_t k,
                         const NuMeasure& nu, double alpha, const QuantileTable& table, bool center) {
  auto path = distance_path(data, s0, nu.support(), k, DistanceKind::Location, center);
  return decide(std::move(path), nu, delta, alpha, table, k);
}

TestResult test_prediction(const Dataset& data, const KernelOp& s0, double delta, std::size_t k,
                           const NuMeasure& nu, double alpha, const QuantileTable& table,
                           bool center) {
  auto path = distance_path(data, s0, nu.support(), k, DistanceKind::Prediction, center);
  return decide(std::move(path), nu, delta, alpha, table, k);
}

}  // namespace flr
