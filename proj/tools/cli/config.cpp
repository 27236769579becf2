#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "flr/error.hpp"
#include "flr/io.hpp"

namespace flr::cli {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& why) { throw Error(ErrorKind::Parse, "config: " + why); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) parse_fail(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) parse_fail("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_fail(where + "." + key + ": " + e.what());
  }
}

KernelSpec read_kernel_spec(const json& j, const std::string& where) {
  KernelSpec k;
  if (j.is_string()) {
    k.source = j.get<std::string>();
    return k;
  }
  reject_unknown(j, {"source", "scale"}, where);
  read(j, "source", k.source, where);
  read(j, "scale", k.scale, where);
  return k;
}

json emit_kernel_spec(const KernelSpec& k) { return json{{"source", k.source}, {"scale", k.scale}}; }

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) return base_dir / path;
  return path;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s;
  s.n = simulation.n;
  s.k = simulation.k;
  if (simulation.dependence == "iid") {
    s.dependence = Dependence::Iid;
  } else if (simulation.dependence == "ar1") {
    s.dependence = Dependence::Ar1;
  } else {
    parse_fail("simulation.dependence must be 'iid' or 'ar1'");
  }
  s.rho = simulation.rho;
  s.burnin = simulation.burnin;
  s.noise_scale = simulation.noise_scale;
  s.seed = seed;
  s.nu = nu();
  s.alpha = test.alpha;
  s.deltas = curve.deltas;
  s.replications = simulation.replications;
  s.threads = threads;
  s.center = simulation.center;
  return s;
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"seed", "threads", "nu", "quantiles", "simulation", "test", "curve"}, "config");
  RunConfig c;
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");
  if (j.contains("nu")) {
    const json& n = j.at("nu");
    reject_unknown(n, {"support", "weights"}, "nu");
    read(n, "support", c.nu_support, "nu");
    if (n.contains("weights")) {
      read(n, "weights", c.nu_weights, "nu");
    } else {
      c.nu_weights.assign(c.nu_support.size(), 1.0 / static_cast<double>(c.nu_support.size()));
    }
  }
  if (j.contains("quantiles")) {
    const json& q = j.at("quantiles");
    reject_unknown(q, {"reps", "steps", "alphas", "table"}, "quantiles");
    read(q, "reps", c.quantiles.reps, "quantiles");
    read(q, "steps", c.quantiles.steps, "quantiles");
    read(q, "alphas", c.quantiles.alphas, "quantiles");
    read(q, "table", c.quantiles.table, "quantiles");
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    reject_unknown(s,
                   {"n", "k", "dependence", "rho", "burnin", "noise_scale", "replications", "center",
                    "grid_points", "slope", "null_slope", "change"},
                   "simulation");
    auto& d = c.simulation;
    read(s, "n", d.n, "simulation");
    read(s, "k", d.k, "simulation");
    read(s, "dependence", d.dependence, "simulation");
    read(s, "rho", d.rho, "simulation");
    read(s, "burnin", d.burnin, "simulation");
    read(s, "noise_scale", d.noise_scale, "simulation");
    read(s, "replications", d.replications, "simulation");
    read(s, "center", d.center, "simulation");
    read(s, "grid_points", d.grid_points, "simulation");
    if (s.contains("slope")) d.slope = read_kernel_spec(s.at("slope"), "simulation.slope");
    if (s.contains("null_slope")) d.null_slope = read_kernel_spec(s.at("null_slope"), "simulation.null_slope");
    if (s.contains("change")) {
      const json& ch = s.at("change");
      if (ch.is_null()) {
        d.change = false;
      } else {
        reject_unknown(ch, {"theta", "after"}, "simulation.change");
        d.change = true;
        read(ch, "theta", d.change_theta, "simulation.change");
        if (ch.contains("after")) d.change_after = read_kernel_spec(ch.at("after"), "simulation.change.after");
      }
    }
  }
  if (j.contains("test")) {
    const json& t = j.at("test");
    reject_unknown(t, {"kind", "delta", "deltas", "k", "alpha", "center", "x", "y", "s0", "two_sample_n1"},
                   "test");
    read(t, "kind", c.test.kind, "test");
    if (t.contains("delta")) {
      double d = 0.0;
      read(t, "delta", d, "test");
      c.test.deltas = {d};
    }
    read(t, "deltas", c.test.deltas, "test");
    read(t, "k", c.test.k, "test");
    read(t, "alpha", c.test.alpha, "test");
    read(t, "center", c.test.center, "test");
    read(t, "x", c.test.x, "test");
    read(t, "y", c.test.y, "test");
    read(t, "s0", c.test.s0, "test");
    read(t, "two_sample_n1", c.test.two_sample_n1, "test");
  }
  if (j.contains("curve")) {
    const json& cv = j.at("curve");
    reject_unknown(cv, {"mode", "deltas"}, "curve");
    read(cv, "mode", c.curve.mode, "curve");
    read(cv, "deltas", c.curve.deltas, "curve");
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  RunConfig c = parse_config_text(ss.str());
  c.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path();
  return c;
}

json emit_config(const RunConfig& c) {
  const auto& s = c.simulation;
  json sim{{"n", s.n},
           {"k", s.k},
           {"dependence", s.dependence},
           {"rho", s.rho},
           {"burnin", s.burnin},
           {"noise_scale", s.noise_scale},
           {"replications", s.replications},
           {"center", s.center},
           {"grid_points", s.grid_points},
           {"slope", emit_kernel_spec(s.slope)},
           {"null_slope", emit_kernel_spec(s.null_slope)}};
  sim["change"] = s.change ? json{{"theta", s.change_theta}, {"after", emit_kernel_spec(s.change_after)}}
                           : json(nullptr);
  return json{{"seed", c.seed},
              {"threads", c.threads},
              {"nu", {{"support", c.nu_support}, {"weights", c.nu_weights}}},
              {"quantiles",
               {{"reps", c.quantiles.reps},
                {"steps", c.quantiles.steps},
                {"alphas", c.quantiles.alphas},
                {"table", c.quantiles.table}}},
              {"simulation", sim},
              {"test",
               {{"kind", c.test.kind},
                {"deltas", c.test.deltas},
                {"k", c.test.k},
                {"alpha", c.test.alpha},
                {"center", c.test.center},
                {"x", c.test.x},
                {"y", c.test.y},
                {"s0", c.test.s0},
                {"two_sample_n1", c.test.two_sample_n1}}},
              {"curve", {{"mode", c.curve.mode}, {"deltas", c.curve.deltas}}}};
}

KernelOp resolve_kernel(const RunConfig& cfg, const KernelSpec& spec, const MeasureSpace& space) {
  KernelOp op = [&]() -> KernelOp {
    if (spec.source == "phi_s") return kernel_op_from_fn(phi_s, space, space);
    if (spec.source == "phi_s0") return kernel_op_from_fn(phi_s0, space, space);
    if (spec.source == "zero") return KernelOp::zero(space, space);
    KernelOp k = read_kernel(cfg.resolve(spec.source));
    if (!(k.domain() == space) || !(k.codomain() == space)) {
      throw Error(ErrorKind::Dimension, "kernel " + spec.source + " is not on the simulation grid");
    }
    return k;
  }();
  op *= spec.scale;
  return op;
}

}  // namespace flr::cli
