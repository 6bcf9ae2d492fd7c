#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rtmix {

enum class ErrorKind {
  Io,
  Format,
  Row,
  Domain,
  Numerical,
  Alignment,
  InfeasibleSplit,
  Initialization,
  Fold,
};

// Base of every error raised by the library. The C API maps kind() onto its
// status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::Format, what) {}
};

// A malformed data row; line() is 1-based and counts the header.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Row, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::Domain, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what,
                          std::optional<std::size_t> coordinate = std::nullopt)
      : Error(ErrorKind::Numerical,
              coordinate ? what + " (coordinate " +
                               std::to_string(*coordinate) + ")"
                         : what),
        coordinate_(coordinate) {}

  std::optional<std::size_t> coordinate() const noexcept {
    return coordinate_;
  }

 private:
  std::optional<std::size_t> coordinate_;
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what)
      : Error(ErrorKind::Alignment, what) {}
};

class InfeasibleSplitError : public Error {
 public:
  explicit InfeasibleSplitError(const std::string& what)
      : Error(ErrorKind::InfeasibleSplit, what) {}
};

class InitializationError : public Error {
 public:
  explicit InitializationError(const std::string& what)
      : Error(ErrorKind::Initialization, what) {}
};

// Failure while fitting one cross-validation fold; fold() is 1-based.
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : Error(ErrorKind::Fold,
              "fold " + std::to_string(fold) + ": " + what),
        fold_(fold) {}

  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

}  // namespace rtmix
