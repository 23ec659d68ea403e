#pragma once

// Reference computations that share no code path with the Pfaffian
// integrator. Used by tests, the acceptance suite and `compare`.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "orthant/core.hpp"
#include "orthant/linalg.hpp"

namespace orthant {

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  // sqrt(p (1 - p) / n)
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Fraction of draws mean + L z (L L' = cov, z standard normal) landing in
/// the positive orthant. Deterministic in (seed, samples); samples >= 1000.
McEstimate mc_orthant(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// Phi(mean / sqrt(variance)).
double univariate_reference(double mean, double variance);

/// 1/4 + asin(rho) / (2 pi), zero-mean unit-variance bivariate orthant.
double bivariate_reference(double rho);

/// Orthant probability of the unit-variance equicorrelated normal with
/// correlation rho in [0, 1):
///   int phi(s) prod_i Phi((sqrt(rho) s + mu_i) / sqrt(1 - rho)) ds.
/// Empty `means` means all zero.
double equicorrelated_reference(std::size_t dim, double rho, std::span<const double> means = {});

/// Common off-diagonal correlation if `cov` has unit diagonal and constant
/// off-diagonal entries (within `tol`); std::nullopt otherwise.
std::optional<double> equicorrelation_of(const Matrix& cov, double tol = 1e-12);

inline constexpr std::size_t kMaxDirectQuadratureDim = 3;

/// Direct adaptive quadrature of g_J(x, y) over the positive orthant,
/// |J| <= 3. Each coordinate is truncated at max(mu_j, 0) + 9.1 sqrt(sigma_jj),
/// where the Gaussian envelope has dropped below 1e-18 of its peak.
double direct_g_quadrature(const Matrix& x, std::span<const double> y, SubsetIndex subset);

/// Direct quadrature of the weighted integral int t^alpha exp(h_J) dt_J,
/// i.e. the y-derivative of g_J with multi-index `powers` (per element of J,
/// in increasing coordinate order).
double direct_moment_quadrature(const Matrix& x, std::span<const double> y, SubsetIndex subset,
                                std::span<const int> powers);

}  // namespace orthant
