#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nlsred {

using cdouble = std::complex<double>;

/// Row-major complex matrix. Rows are transverse modes (or quadrature nodes),
/// columns are axial Fourier modes (or axial grid points), so each row is a
/// contiguous axial line.
using CMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;

/// Error categories that callers (in particular the CLI) dispatch on.
enum class ErrorKind {
  InvalidArgument,
  Underresolved,
  ShapeMismatch,
  NonConvergence,
  ConstraintBreach,
  BlowUp,
  Io,
  VersionMismatch,
  Vacuous,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Warnings go to stderr unless silenced (the CLI's --quiet).
void set_quiet(bool quiet);
bool quiet();
void warn(const std::string& message);

/// Deterministic random source. Draws are derived from the raw mt19937_64
/// output (fully specified by the standard) rather than the
/// implementation-defined <random> distributions, so a seed reproduces the
/// same fields on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nlsred
