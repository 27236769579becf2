#pragma once

// Run configuration for the command-line tool, stored as JSON with one
// section per concern. Relative file paths resolve against the directory of
// the configuration file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "flr/measure_space.hpp"
#include "flr/selfnorm.hpp"
#include "flr/simulate.hpp"

namespace flr::cli {

// A built-in kernel ("phi_s", "phi_s0", "zero") or a kernel CSV path,
// multiplied by `scale`.
struct KernelSpec {
  std::string source = "phi_s0";
  double scale = 1.0;
  bool operator==(const KernelSpec&) const = default;
};

struct QuantileSection {
  std::size_t reps = 100000;
  std::size_t steps = 1000;
  std::vector<double> alphas = default_alphas();
  std::string table;  // optional cached table file
  bool operator==(const QuantileSection&) const = default;
};

struct SimulationSection {
  std::size_t n = 500;
  std::size_t k = 4;
  std::string dependence = "iid";
  double rho = 0.6;
  std::size_t burnin = 200;
  double noise_scale = 1.0;
  std::size_t replications = 100;
  bool center = true;
  std::size_t grid_points = 51;
  KernelSpec slope{"phi_s", 1.0};
  KernelSpec null_slope{"phi_s0", 1.0};
  bool change = false;
  double change_theta = 0.5;
  KernelSpec change_after{"phi_s", 5.0};
  bool operator==(const SimulationSection&) const = default;
};

struct TestSection {
  std::string kind = "location";  // location | prediction
  std::vector<double> deltas{0.0};
  std::size_t k = 4;
  double alpha = 0.05;
  bool center = true;
  std::string x;
  std::string y;
  std::string s0;
  std::size_t two_sample_n1 = 0;  // change-point command: 0 = estimate the split
  bool operator==(const TestSection&) const = default;
};

struct CurveSection {
  std::string mode = "location";  // location | prediction | changepoint
  std::vector<double> deltas{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1};
  bool operator==(const CurveSection&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::vector<double> nu_support{0.2, 0.4, 0.6, 0.8};
  std::vector<double> nu_weights{0.25, 0.25, 0.25, 0.25};
  QuantileSection quantiles;
  SimulationSection simulation;
  TestSection test;
  CurveSection curve;

  std::filesystem::path base_dir;  // not serialized

  bool operator==(const RunConfig& o) const {
    return seed == o.seed && threads == o.threads && nu_support == o.nu_support &&
           nu_weights == o.nu_weights && quantiles == o.quantiles && simulation == o.simulation &&
           test == o.test && curve == o.curve;
  }

  NuMeasure nu() const { return NuMeasure(nu_support, nu_weights); }
  std::filesystem::path resolve(const std::string& p) const;
  SimConfig sim_config() const;
};

// Throws Error(Parse) on malformed input or unknown keys.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json emit_config(const RunConfig& cfg);

KernelOp resolve_kernel(const RunConfig& cfg, const KernelSpec& spec, const MeasureSpace& space);

}  // namespace flr::cli
