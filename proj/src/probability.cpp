#include "orthant/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "orthant/error.hpp"

namespace orthant {

OrthantResult orthant_probability(const ProblemSpec& input, const IntegratorConfig& config,
                                  std::size_t dimension_cap) {
  const ProblemSpec spec = validate_problem(input, dimension_cap);
  const std::size_t d = spec.dim();

  const auto chol = Cholesky::factor(spec.cov);
  if (!chol) throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
  const std::vector<double> whitened = chol->solve_lower(spec.mean);
  double quad = 0.0;
  for (double v : whitened) quad += v * v;

  const NaturalParams params = natural_params(spec);
  const PathSpec path = build_path(params);
  const Trajectory traj = integrate(path, config);

  OrthantResult r;
  r.g_value = traj.final_state.full();
  r.log_prefactor = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                    0.5 * chol->log_det() - 0.5 * quad;
  r.probability = std::exp(r.log_prefactor) * r.g_value;
  r.steps = traj.steps_taken;
  r.rejected_steps = traj.rejected_steps;
  r.tangent_evaluations = traj.tangent_evaluations;
  r.residual_norm = normalized_residual(traj.final_state, params.x(), params.y());
  return r;
}

OrthantResult orthant_probability_signed(const ProblemSpec& spec, std::span<const int> signs,
                                         const IntegratorConfig& config,
                                         std::size_t dimension_cap) {
  const std::size_t d = spec.dim();
  if (signs.size() != d)
    throw Error(ErrorCode::InvalidArgument, "sign vector length " + std::to_string(signs.size()) +
                                                " does not match dimension " + std::to_string(d));
  for (int s : signs)
    if (s != 1 && s != -1) throw Error(ErrorCode::InvalidArgument, "signs must be +1 or -1");
  if (spec.cov.rows() != d || spec.cov.cols() != d)
    return orthant_probability(spec, config, dimension_cap);  // let validation report it

  ProblemSpec flipped = spec;
  for (std::size_t i = 0; i < d; ++i) {
    flipped.mean[i] *= signs[i];
    for (std::size_t j = 0; j < d; ++j) flipped.cov(i, j) *= signs[i] * signs[j];
  }
  return orthant_probability(flipped, config, dimension_cap);
}

std::vector<int> signs_from_mask(std::size_t dim, std::size_t mask) {
  std::vector<int> signs(dim);
  for (std::size_t i = 0; i < dim; ++i) signs[i] = ((mask >> i) & 1U) ? -1 : 1;
  return signs;
}

SumCheckResult orthant_sum_check(const ProblemSpec& spec, const IntegratorConfig& config) {
  const std::size_t d = spec.dim();
  if (d > kSumCheckDimensionCap)
    throw Error(ErrorCode::DimensionTooLarge,
                "sum check needs 2^d integrations; dimension " + std::to_string(d) +
                    " exceeds cap " + std::to_string(kSumCheckDimensionCap));
  const std::size_t cap = std::max(kDefaultDimensionCap, kSumCheckDimensionCap);
  SumCheckResult out;
  const std::size_t n = std::size_t{1} << d;
  out.probabilities.resize(n);
  double total = 0.0;
  for (std::size_t mask = 0; mask < n; ++mask) {
    const std::vector<int> signs = signs_from_mask(d, mask);
    out.probabilities[mask] = orthant_probability_signed(spec, signs, config, cap).probability;
    total += out.probabilities[mask];
  }
  out.error = std::abs(1.0 - total);
  return out;
}

}  // namespace orthant
