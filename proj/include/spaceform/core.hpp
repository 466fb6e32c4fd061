#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spaceform {

/// Largest ambient dimension the forward-mode jets can carry.
inline constexpr int kMaxDim = 6;

using Vec = std::vector<double>;

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// NumericalError (and subclasses) to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside (or within 1e-12 of the boundary of) its chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or an ill-posed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation's input does not satisfy its stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The mixed bilinear form is not positive definite on the discrete space.
class CoercivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Data contradicts a conclusion that must hold (e.g. a negative flux constant).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  Vec out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

inline Vec scaled(double alpha, std::span<const double> x) {
  Vec out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

inline Vec minus(std::span<const double> a, std::span<const double> b) {
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

inline Vec unit_vector(int dim, int axis) {
  Vec e(static_cast<std::size_t>(dim), 0.0);
  e[static_cast<std::size_t>(axis)] = 1.0;
  return e;
}

inline Vec normalized(std::span<const double> a) {
  const double n = norm(a);
  return scaled(1.0 / n, a);
}

}  // namespace spaceform
