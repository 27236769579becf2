#include "flr/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "flr/error.hpp"

namespace flr {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string cell = line.substr(start, end - start);
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cell = first == std::string::npos ? std::string() : cell.substr(first, last - first + 1);
    char* tail = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &tail);
    if (cell.empty() || tail != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
      std::ostringstream os;
      os << "line " << lineno << ": '" << cell << "' is not a finite number";
      throw Error(ErrorKind::Parse, os.str());
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

std::vector<std::vector<double>> parse_rows(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    rows.push_back(parse_row(line, lineno));
  }
  return rows;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return os;
}

void write_row(std::ostream& os, const double* v, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) os << ',';
    os << v[i];
  }
  os << '\n';
}

}  // namespace

MeasureSpace uniform_space(std::vector<double> points) {
  const std::size_t n = points.size();
  return MeasureSpace(std::move(points), std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n)));
}

CurveTable read_curves(std::istream& is) {
  auto rows = parse_rows(is);
  if (rows.empty()) throw Error(ErrorKind::Parse, "curve file has no grid row");
  const std::size_t p = rows.front().size();
  MeasureSpace space = uniform_space(rows.front());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(p));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != p) {
      std::ostringstream os;
      os << "observation " << r << " has " << rows[r].size() << " values, grid has " << p;
      throw Error(ErrorKind::Parse, os.str());
    }
    for (std::size_t j = 0; j < p; ++j) m(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(j)) = rows[r][j];
  }
  return CurveTable{std::move(space), std::move(m)};
}

CurveTable read_curves(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_curves(is);
}

void write_curves(std::ostream& os, const MeasureSpace& space, const Eigen::MatrixXd& rows) {
  if (static_cast<std::size_t>(rows.cols()) != space.size()) throw Error(ErrorKind::Dimension, "curves do not match grid");
  os << std::setprecision(17);
  write_row(os, space.points().data(), static_cast<Eigen::Index>(space.size()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = rows;
  for (Eigen::Index r = 0; r < rm.rows(); ++r) write_row(os, rm.row(r).data(), rm.cols());
}

void write_curves(const std::filesystem::path& path, const MeasureSpace& space, const Eigen::MatrixXd& rows) {
  auto os = open_out(path);
  write_curves(os, space, rows);
}

KernelOp read_kernel(std::istream& is) {
  auto rows = parse_rows(is);
  if (rows.size() < 2) throw Error(ErrorKind::Parse, "kernel file needs codomain and domain grid rows");
  MeasureSpace codomain = uniform_space(rows[0]);
  MeasureSpace domain = uniform_space(rows[1]);
  if (rows.size() - 2 != codomain.size()) {
    std::ostringstream os;
    os << "kernel has " << rows.size() - 2 << " rows, codomain grid has " << codomain.size();
    throw Error(ErrorKind::Parse, os.str());
  }
  Eigen::MatrixXd k(static_cast<Eigen::Index>(codomain.size()), static_cast<Eigen::Index>(domain.size()));
  for (std::size_t i = 0; i < codomain.size(); ++i) {
    if (rows[i + 2].size() != domain.size()) throw Error(ErrorKind::Parse, "kernel row length differs from domain grid");
    for (std::size_t j = 0; j < domain.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i + 2][j];
    }
  }
  return KernelOp(std::move(codomain), std::move(domain), std::move(k));
}

KernelOp read_kernel(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_kernel(is);
}

void write_kernel(std::ostream& os, const KernelOp& op) {
  os << std::setprecision(17);
  write_row(os, op.codomain().points().data(), static_cast<Eigen::Index>(op.codomain().size()));
  write_row(os, op.domain().points().data(), static_cast<Eigen::Index>(op.domain().size()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = op.kernel();
  for (Eigen::Index r = 0; r < rm.rows(); ++r) write_row(os, rm.row(r).data(), rm.cols());
}

void write_kernel(const std::filesystem::path& path, const KernelOp& op) {
  auto os = open_out(path);
  write_kernel(os, op);
}

}  // namespace flr
