#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lublock {

using Index = std::int64_t;

enum class ErrorKind {
  NonSquare,
  UnsupportedField,
  MalformedEntry,
  EmptyMatrix,
  IndexOutOfRange,
  BadParams,
  IoError,
  NotSymmetric,
  MissingDiagonal,
  DimensionMismatch,
  DegenerateMatrix,
  DegenerateCurve,
  ZeroPivot,
  SupportViolation,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the diagonal-block factorization; carries the failing location.
class ZeroPivotError : public Error {
 public:
  ZeroPivotError(Index block, Index local_column, double pivot)
      : Error(ErrorKind::ZeroPivot,
              "block " + std::to_string(block) + ", local column " +
                  std::to_string(local_column) + ", pivot " + std::to_string(pivot)),
        block_(block),
        local_column_(local_column) {}

  Index block() const noexcept { return block_; }
  Index local_column() const noexcept { return local_column_; }

 private:
  Index block_;
  Index local_column_;
};

}  // namespace lublock
