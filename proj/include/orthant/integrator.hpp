#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "orthant/core.hpp"
#include "orthant/pfaffian.hpp"

namespace orthant {

enum class Method { Rk4Fixed, Rkf45Adaptive };

struct IntegratorConfig {
  Method method = Method::Rkf45Adaptive;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// First trial step for rkf45; the fixed step (rounded so that 1/h is an
  /// integer) for rk4.
  double initial_step = 1e-3;
  std::size_t max_steps = 1'000'000;
  bool record_samples = false;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Trajectory {
  StateVector final_state;
  std::size_t steps_taken = 0;
  std::size_t rejected_steps = 0;
  std::size_t tangent_evaluations = 0;
  std::vector<std::pair<double, StateVector>> sample_points;
};

/// g_J at t = 0, where x is diagonal: prod_{j in J} sqrt(-pi / (4 x_jj)).
/// Throws NonNegativeDiagonal if some x_jj >= 0.
StateVector initial_state(const PathSpec& path);

/// Integrates dG/dt = tangent(t, G) from t = 0 to 1.
Trajectory integrate(const PathSpec& path, const IntegratorConfig& config = {});

}  // namespace orthant
