#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "flr/error.hpp"

namespace {

using flr::cli::RunConfig;
namespace fs = std::filesystem;

int exit_code(flr::ErrorKind kind) {
  switch (kind) {
    case flr::ErrorKind::Parse:
      return 3;
    case flr::ErrorKind::Io:
      return 4;
    case flr::ErrorKind::InvalidArgument:
    case flr::ErrorKind::Dimension:
      return 5;
    default:
      return 6;
  }
}

void emit(const std::string& text, const std::optional<fs::path>& out) {
  if (!out) {
    std::cout << text;
    return;
  }
  std::ofstream os(*out);
  if (!os) throw flr::Error(flr::ErrorKind::Io, "cannot write " + out->string());
  os << text;
  if (!os) throw flr::Error(flr::ErrorKind::Io, "write failed for " + out->string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relevant-hypothesis tests for functional linear regression"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  const char* names[] = {"quantiles", "simulate", "test", "changepoint", "curve"};
  const char* help[] = {"simulate the quantile table of the pivotal limit W",
                        "write a simulated dataset and its kernels as CSV",
                        "one-sample relevant test on CSV data",
                        "change-point or two-sample relevant test on CSV data",
                        "Monte Carlo rejection curve as CSV"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override the configured master seed");
    sub->add_option("--out", out, "output file (directory for simulate)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    RunConfig cfg = flr::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const std::optional<fs::path> out_path = out ? std::optional<fs::path>(*out) : std::nullopt;
    const std::string cmd = app.get_subcommands().front()->get_name();

    if (cmd == "quantiles") {
      flr::cli::cmd_quantiles(cfg, out_path, std::cout);
    } else if (cmd == "simulate") {
      flr::cli::cmd_simulate(cfg, out_path, std::cout);
    } else if (cmd == "test") {
      emit(flr::cli::cmd_test(cfg).dump(2) + "\n", out_path);
    } else if (cmd == "changepoint") {
      emit(flr::cli::cmd_changepoint(cfg).dump(2) + "\n", out_path);
    } else {
      std::ostringstream os;
      flr::cli::cmd_curve(cfg).write_csv(os);
      emit(os.str(), out_path);
    }
  } catch (const flr::Error& e) {
    std::cerr << "error: " << flr::error_class(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
