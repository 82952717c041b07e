#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace efcm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Right-hand-side callback g(t, u) (or a full f = g - Au for classical
/// Runge-Kutta kernels).  Must be pure: no shared mutable state.
using RhsFn = std::function<Vector(double, const Vector&)>;

enum class Errc {
  invalid_argument,
  exactness_violation,
  divergence,
  structure_absent,
  evaluation,
  budget_exceeded,
  io,
  internal,
};

/// Library-wide exception carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Stage iteration left the basin of attraction; remembers the step index
/// once the driver attaches it (-1 while unattributed).
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what, long step = -1)
      : Error(Errc::divergence, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(Errc::invalid_argument, msg);
}

}  // namespace efcm
