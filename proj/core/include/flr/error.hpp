#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flr {

enum class ErrorKind {
  Dimension,
  InvalidArgument,
  InsufficientPrefix,
  RankDeficiency,
  NotSymmetric,
  NotPositiveSemidefinite,
  DegenerateNormalizer,
  UndefinedRatio,
  Parse,
  Io,
};

std::string_view error_class(ErrorKind kind) noexcept;

// All library failures are reported through this type; `kind()` is the
// machine-readable class printed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when the k-th empirical eigenvalue is too small to invert.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t k, std::size_t prefix, double lambda_k,
                      double lambda_1);

  std::size_t level() const noexcept { return level_; }
  std::size_t prefix_size() const noexcept { return prefix_; }

 private:
  std::size_t level_;
  std::size_t prefix_;
};

}  // namespace flr
