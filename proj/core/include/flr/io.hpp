#pragma once

// CSV exchange formats for gridded curves and kernels.
//
// Curves: the first row is the grid, every following row one observation.
// Kernels: the first row is the codomain grid, the second the domain grid,
// then one row of kernel values per codomain point.
// Grids read from CSV carry uniform weights 1/p.

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

#include "flr/measure_space.hpp"

namespace flr {

struct CurveTable {
  MeasureSpace space;
  Eigen::MatrixXd rows;  // one observation per row
};

CurveTable read_curves(std::istream& is);
CurveTable read_curves(const std::filesystem::path& path);
void write_curves(std::ostream& os, const MeasureSpace& space, const Eigen::MatrixXd& rows);
void write_curves(const std::filesystem::path& path, const MeasureSpace& space, const Eigen::MatrixXd& rows);

KernelOp read_kernel(std::istream& is);
KernelOp read_kernel(const std::filesystem::path& path);
void write_kernel(std::ostream& os, const KernelOp& op);
void write_kernel(const std::filesystem::path& path, const KernelOp& op);

// MeasureSpace with weights 1/p on the given points.
MeasureSpace uniform_space(std::vector<double> points);

}  // namespace flr
