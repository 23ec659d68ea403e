#pragma once

#include <cstddef>
#include <vector>

#include "orthant/core.hpp"
#include "orthant/integrator.hpp"

namespace orthant {

struct OrthantResult {
  double probability = 0.0;
  double g_value = 0.0;
  /// log of (2 pi)^{-d/2} det(Sigma)^{-1/2} exp(-mu' Sigma^{-1} mu / 2).
  double log_prefactor = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t tangent_evaluations = 0;
  /// Normalized annihilator residual of the final state.
  double residual_norm = 0.0;
};

/// P(X_1 >= 0, ..., X_d >= 0) for X ~ N(mean, cov).
OrthantResult orthant_probability(const ProblemSpec& spec, const IntegratorConfig& config = {},
                                  std::size_t dimension_cap = kDefaultDimensionCap);

/// P(signs_i X_i >= 0 for all i), via the problem (D cov D, D mean) with
/// D = diag(signs). Each sign must be +1 or -1.
OrthantResult orthant_probability_signed(const ProblemSpec& spec, std::span<const int> signs,
                                         const IntegratorConfig& config = {},
                                         std::size_t dimension_cap = kDefaultDimensionCap);

inline constexpr std::size_t kSumCheckDimensionCap = 14;

struct SumCheckResult {
  double error = 0.0;  // |1 - sum of all signed orthant probabilities|
  /// Indexed by bitmask: bit i set means sign -1 on coordinate i.
  std::vector<double> probabilities;
};

/// Evaluates all 2^d signed orthants. Refuses d > 14.
SumCheckResult orthant_sum_check(const ProblemSpec& spec, const IntegratorConfig& config = {});

/// Sign vector for bitmask `mask` as used by SumCheckResult.
std::vector<int> signs_from_mask(std::size_t dim, std::size_t mask);

}  // namespace orthant
