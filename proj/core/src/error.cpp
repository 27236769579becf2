#include "flr/error.hpp"

#include <sstream>

namespace flr {

std::string_view error_class(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::InsufficientPrefix: return "insufficient_prefix";
    case ErrorKind::RankDeficiency: return "rank_deficiency";
    case ErrorKind::NotSymmetric: return "not_symmetric";
    case ErrorKind::NotPositiveSemidefinite: return "not_psd";
    case ErrorKind::DegenerateNormalizer: return "degenerate_normalizer";
    case ErrorKind::UndefinedRatio: return "undefined_ratio";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

std::string rank_message(std::size_t k, std::size_t prefix, double lambda_k,
                         double lambda_1) {
  std::ostringstream os;
  os << "eigenvalue " << k << " is " << lambda_k << " (largest " << lambda_1
     << "); cut-off level k=" << k << " is too large for " << prefix
     << " observations";
  return os.str();
}

}  // namespace

RankDeficiencyError::RankDeficiencyError(std::size_t k, std::size_t prefix,
                                         double lambda_k, double lambda_1)
    : Error(ErrorKind::RankDeficiency,
            rank_message(k, prefix, lambda_k, lambda_1)),
      level_(k),
      prefix_(prefix) {}

}  // namespace flr
