#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "config.hpp"
#include "flr/selfnorm.hpp"
#include "flr/simulate.hpp"

namespace flr::cli {

// Loads quantiles.table when it is set and exists, otherwise simulates a
// table from the quantiles section.
QuantileTable obtain_table(const RunConfig& cfg);

// Writes the table to `out` (or quantiles.table) and prints q_{1-alpha}.
void cmd_quantiles(const RunConfig& cfg, const std::optional<std::filesystem::path>& out, std::ostream& log);

// Writes x.csv, y.csv, slope.csv and null_slope.csv into the output
// directory (default: current directory).
void cmd_simulate(const RunConfig& cfg, const std::optional<std::filesystem::path>& out, std::ostream& log);

// One-sample relevant test on test.x / test.y against test.s0.
nlohmann::json cmd_test(const RunConfig& cfg);

// Change-point or two-sample test on test.x / test.y.
nlohmann::json cmd_changepoint(const RunConfig& cfg);

RejectionCurve cmd_curve(const RunConfig& cfg);

// Checks every input file the command will read.
void require_inputs(const RunConfig& cfg, bool need_s0);

}  // namespace flr::cli
