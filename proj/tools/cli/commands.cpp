#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "flr/changepoint.hpp"
#include "flr/error.hpp"
#include "flr/io.hpp"
#include "flr/regression.hpp"

namespace flr::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_file(const RunConfig& cfg, const std::string& key, const std::string& value) {
  if (value.empty()) throw Error(ErrorKind::InvalidArgument, key + " is not set");
  const fs::path p = cfg.resolve(value);
  if (!fs::is_regular_file(p)) throw Error(ErrorKind::Io, key + ": no such file " + p.string());
}

bool is_builtin(const std::string& source) {
  return source == "phi_s" || source == "phi_s0" || source == "zero";
}

fs::path prepare_output(const fs::path& p) {
  if (p.has_parent_path() && !fs::exists(p.parent_path())) {
    throw Error(ErrorKind::Io, "output directory does not exist: " + p.parent_path().string());
  }
  return p;
}

Dataset load_dataset(const RunConfig& cfg) {
  CurveTable x = read_curves(cfg.resolve(cfg.test.x));
  CurveTable y = read_curves(cfg.resolve(cfg.test.y));
  if (x.rows.rows() != y.rows.rows()) {
    throw Error(ErrorKind::Dimension, "x and y files hold different numbers of observations");
  }
  return Dataset(std::move(x.space), std::move(y.space), std::move(x.rows), std::move(y.rows));
}

json path_json(const std::map<double, double>& path) {
  json arr = json::array();
  for (const auto& [x, d] : path) arr.push_back({{"x", x}, {"d", d}});
  return arr;
}

json result_json(const TestResult& r) {
  return json{{"delta", r.delta},         {"statistic", r.statistic}, {"normalizer", r.normalizer},
              {"quantile", r.quantile},   {"alpha", r.alpha},         {"k", r.k},
              {"decision", r.reject ? "reject" : "no rejection"}, {"reject", r.reject},
              {"path", path_json(r.path)}};
}

CurveKind curve_kind(const std::string& mode) {
  if (mode == "location") return CurveKind::Location;
  if (mode == "prediction") return CurveKind::Prediction;
  if (mode == "changepoint") return CurveKind::ChangePoint;
  throw Error(ErrorKind::Parse, "config: curve.mode must be location, prediction or changepoint");
}

DistanceKind test_kind(const std::string& kind) {
  if (kind == "location") return DistanceKind::Location;
  if (kind == "prediction") return DistanceKind::Prediction;
  throw Error(ErrorKind::Parse, "config: test.kind must be location or prediction");
}

}  // namespace

void require_inputs(const RunConfig& cfg, bool need_s0) {
  require_file(cfg, "test.x", cfg.test.x);
  require_file(cfg, "test.y", cfg.test.y);
  if (need_s0) require_file(cfg, "test.s0", cfg.test.s0);
}

QuantileTable obtain_table(const RunConfig& cfg) {
  const NuMeasure nu = cfg.nu();
  if (!cfg.quantiles.table.empty()) {
    const fs::path p = cfg.resolve(cfg.quantiles.table);
    if (fs::exists(p)) {
      QuantileTable t = QuantileTable::load(p);
      if (!(t.nu() == nu)) throw Error(ErrorKind::InvalidArgument, "quantile table " + p.string() + " uses another nu");
      return t;
    }
  }
  return w_quantile(nu, cfg.quantiles.alphas, cfg.quantiles.reps, cfg.quantiles.steps, cfg.seed, cfg.threads);
}

void cmd_quantiles(const RunConfig& cfg, const std::optional<fs::path>& out, std::ostream& log) {
  fs::path target;
  if (out) {
    target = *out;
  } else if (!cfg.quantiles.table.empty()) {
    target = cfg.resolve(cfg.quantiles.table);
  } else {
    target = "quantiles.txt";
  }
  prepare_output(target);
  const QuantileTable t =
      w_quantile(cfg.nu(), cfg.quantiles.alphas, cfg.quantiles.reps, cfg.quantiles.steps, cfg.seed, cfg.threads);
  t.save(target);
  log << std::setprecision(10);
  for (const QuantileRow& r : t.rows()) {
    log << "q_" << 1.0 - r.alpha << " = " << r.quantile << " (se " << r.se << ")\n";
  }
  log << "wrote " << target.string() << '\n';
}

void cmd_simulate(const RunConfig& cfg, const std::optional<fs::path>& out, std::ostream& log) {
  const fs::path dir = out ? *out : fs::path(".");
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "output directory does not exist: " + dir.string());
  const auto& sim = cfg.simulation;
  const MeasureSpace space = MeasureSpace::uniform_grid(sim.grid_points);
  const SimConfig sc = cfg.sim_config();
  sc.validate();
  const KernelOp slope = resolve_kernel(cfg, sim.slope, space);
  const KernelOp null_slope = resolve_kernel(cfg, sim.null_slope, space);
  std::optional<ChangeSpec> change;
  if (sim.change) change = ChangeSpec{sim.change_theta, resolve_kernel(cfg, sim.change_after, space)};
  const Dataset data = gen_dataset(sc, slope, change);
  write_curves(dir / "x.csv", data.regressor_space(), data.x());
  write_curves(dir / "y.csv", data.response_space(), data.y());
  write_kernel(dir / "slope.csv", slope);
  write_kernel(dir / "null_slope.csv", null_slope);
  if (change) write_kernel(dir / "slope_after.csv", change->after);
  log << "wrote " << data.size() << " observations on " << space.size() << " grid points to " << dir.string()
      << '\n';
}

json cmd_test(const RunConfig& cfg) {
  require_inputs(cfg, true);
  const DistanceKind kind = test_kind(cfg.test.kind);
  const Dataset data = load_dataset(cfg);
  const KernelOp s0 = read_kernel(cfg.resolve(cfg.test.s0));
  if (!(s0.domain() == data.regressor_space()) || !(s0.codomain() == data.response_space())) {
    throw Error(ErrorKind::Dimension, "S0 kernel grid does not match the data grid");
  }
  const NuMeasure nu = cfg.nu();
  const QuantileTable table = obtain_table(cfg);
  const auto path = distance_path(data, s0, nu.support(), cfg.test.k, kind, cfg.test.center);
  json results = json::array();
  for (double delta : cfg.test.deltas) {
    results.push_back(result_json(decide(path, nu, delta, cfg.test.alpha, table, cfg.test.k)));
  }
  return json{{"command", "test"}, {"kind", cfg.test.kind}, {"n", data.size()}, {"results", results}};
}

json cmd_changepoint(const RunConfig& cfg) {
  require_inputs(cfg, false);
  const DistanceKind kind = test_kind(cfg.test.kind);
  const Dataset data = load_dataset(cfg);
  const NuMeasure nu = cfg.nu();
  const QuantileTable table = obtain_table(cfg);

  json report{{"command", "changepoint"}, {"kind", cfg.test.kind}, {"n", data.size()}};
  std::optional<SplitPlan> plan;
  if (cfg.test.two_sample_n1 > 0) {
    if (cfg.test.two_sample_n1 >= data.size()) {
      throw Error(ErrorKind::InvalidArgument, "test.two_sample_n1 must be smaller than the sample size");
    }
    plan = SplitPlan::two_sample(cfg.test.two_sample_n1, data.size() - cfg.test.two_sample_n1);
    report["mode"] = "two_sample";
  } else {
    const ChangePointFit fit = cusum_theta(data);
    plan = SplitPlan::estimated(fit, data.size());
    report["mode"] = "change_point";
  }
  report["split"] = plan->boundary();
  report["theta_hat"] = plan->theta();

  const auto path = change_path(data, *plan, nu.support(), cfg.test.k, kind, cfg.test.center);
  json results = json::array();
  for (double delta : cfg.test.deltas) {
    results.push_back(result_json(decide(path, nu, delta, cfg.test.alpha, table, cfg.test.k)));
  }
  report["results"] = results;
  return report;
}

RejectionCurve cmd_curve(const RunConfig& cfg) {
  const auto& sim = cfg.simulation;
  const CurveKind kind = curve_kind(cfg.curve.mode);
  for (const KernelSpec* k : {&sim.slope, &sim.null_slope, &sim.change_after}) {
    if (!is_builtin(k->source)) require_file(cfg, "kernel", k->source);
  }
  const MeasureSpace space = MeasureSpace::uniform_grid(sim.grid_points);
  const SimConfig sc = cfg.sim_config();
  const KernelOp slope = resolve_kernel(cfg, sim.slope, space);
  const KernelOp s0 = resolve_kernel(cfg, sim.null_slope, space);
  std::optional<ChangeSpec> change;
  if (kind == CurveKind::ChangePoint || sim.change) {
    change = ChangeSpec{sim.change_theta, resolve_kernel(cfg, sim.change_after, space)};
  }
  const QuantileTable table = obtain_table(cfg);
  return rejection_curve(sc, kind, s0, slope, table, change);
}

}  // namespace flr::cli
