#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpkernel {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MeshError : public Error {
public:
  enum class Kind { NonMonotone, NonzeroOrigin, TooShort };

  MeshError(Kind kind, std::size_t index, const std::string& what)
      : Error(what), kind(kind), index(index) {}

  Kind kind;
  std::size_t index;  // first offending point (meaningful for NonMonotone)
};

class SizeMismatch : public Error {
public:
  SizeMismatch(std::size_t lhs, std::size_t rhs)
      : Error("size mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)),
        lhs(lhs), rhs(rhs) {}

  std::size_t lhs, rhs;
};

/// Inversion failed because |a_0^n| fell below the representable threshold.
class SingularDiagonal : public Error {
public:
  explicit SingularDiagonal(std::size_t row)
      : Error("singular diagonal entry at row " + std::to_string(row)), row(row) {}

  std::size_t row;
};

class SingularLeadingEntry : public Error {
public:
  SingularLeadingEntry() : Error("sequence kernel has (near-)zero leading entry") {}
};

class AlphaOutOfRange : public Error {
public:
  explicit AlphaOutOfRange(double alpha)
      : Error("fractional order alpha=" + std::to_string(alpha) + " outside (0,1)"),
        alpha(alpha) {}

  double alpha;
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

class AccuracyNotReached : public Error {
public:
  AccuracyNotReached(double requested, double achieved)
      : Error("requested accuracy " + std::to_string(requested) +
              " not certified (best bound " + std::to_string(achieved) + ")"),
        requested(requested), achieved(achieved) {}

  double requested;
  double achieved;
};

class NoConvergence : public Error {
public:
  explicit NoConvergence(int iterations)
      : Error("iteration budget exhausted after " + std::to_string(iterations) +
              " iterations"),
        iterations(iterations) {}

  int iterations;
};

/// The L1 kernel B = C (*) L^(-1) failed one of its sign conditions.  This
/// cannot happen in exact arithmetic, so it signals a construction bug or a
/// pathologically conditioned mesh.
class PropertyBViolated : public Error {
public:
  PropertyBViolated(std::size_t row, std::size_t col, double value)
      : Error("L1 kernel sign condition violated at row " + std::to_string(row) +
              ", column " + std::to_string(col) + " (value " + std::to_string(value) + ")"),
        row(row), col(col), value(value) {}

  std::size_t row, col;
  double value;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace cpkernel
