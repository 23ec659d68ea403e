#include "orthant/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "orthant/error.hpp"

namespace orthant {

namespace {

using boost::math::quadrature::gauss_kronrod;

// ln(1e18) ~ 41.45; sqrt(2 * 41.45) ~ 9.1 standard deviations.
constexpr double kTruncationSigmas = 9.1;

double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol);
}

}  // namespace

McEstimate mc_orthant(const ProblemSpec& input, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw Error(ErrorCode::InvalidArgument, "mc_orthant needs >= 1000 samples");
  const ProblemSpec spec = validate_problem(input, kHardDimensionCeiling);
  const std::size_t d = spec.dim();
  const auto chol = Cholesky::factor(spec.cov);
  const Matrix& l = chol->lower();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> z(d);
  std::size_t hits = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    for (double& v : z) v = normal(rng);
    bool inside = true;
    for (std::size_t i = 0; i < d && inside; ++i) {
      double xi = spec.mean[i];
      for (std::size_t k = 0; k <= i; ++k) xi += l(i, k) * z[k];
      inside = xi >= 0.0;
    }
    hits += inside ? 1 : 0;
  }
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
  return est;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double univariate_reference(double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw Error(ErrorCode::InvalidVariance, "variance must be positive");
  return normal_cdf(mean / std::sqrt(variance));
}

double bivariate_reference(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw Error(ErrorCode::InvalidRho, "rho must lie in (-1, 1)");
  return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
}

double equicorrelated_reference(std::size_t dim, double rho, std::span<const double> means) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidRho, "rho must lie in [0, 1)");
  if (!means.empty() && means.size() != dim)
    throw Error(ErrorCode::InvalidArgument, "means length does not match dimension");
  auto mean_of = [&](std::size_t i) { return means.empty() ? 0.0 : means[i]; };
  if (rho == 0.0) {
    double p = 1.0;
    for (std::size_t i = 0; i < dim; ++i) p *= normal_cdf(mean_of(i));
    return p;
  }
  const double a = std::sqrt(rho);
  const double b = std::sqrt(1.0 - rho);
  auto integrand = [&](double s) {
    double p = std::exp(-0.5 * s * s) / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < dim; ++i) p *= normal_cdf((a * s + mean_of(i)) / b);
    return p;
  };
  // phi(s) < 1e-40 outside [-14, 14].
  return gauss_kronrod<double, 61>::integrate(integrand, -14.0, 14.0, 20, 1e-14);
}

std::optional<double> equicorrelation_of(const Matrix& cov, double tol) {
  const std::size_t d = cov.rows();
  if (!cov.square() || d == 0) return std::nullopt;
  for (std::size_t i = 0; i < d; ++i)
    if (std::abs(cov(i, i) - 1.0) > tol) return std::nullopt;
  if (d == 1) return 0.0;
  const double rho = cov(1, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j && std::abs(cov(i, j) - rho) > tol) return std::nullopt;
  return rho;
}

double direct_moment_quadrature(const Matrix& x, std::span<const double> y, SubsetIndex subset,
                                std::span<const int> powers) {
  const std::size_t s = subset.size();
  if (s > kMaxDirectQuadratureDim)
    throw Error(ErrorCode::TooHighDimension,
                "direct quadrature supports at most 3 coordinates, got " + std::to_string(s));
  if (powers.size() != s)
    throw Error(ErrorCode::InvalidArgument, "one power per subset element is required");
  if (s == 0) return 1.0;

  const std::vector<std::size_t> el = subset.elements();
  // Gaussian envelope of the integrand: covariance (-2 x_J)^{-1}, centre
  // (-2 x_J)^{-1} y_J.
  Matrix neg2x(s, s);
  std::vector<double> yj(s);
  for (std::size_t a = 0; a < s; ++a) {
    yj[a] = y[el[a]];
    for (std::size_t b = 0; b < s; ++b) neg2x(a, b) = -2.0 * x(el[a], el[b]);
  }
  const auto chol = Cholesky::factor(neg2x);
  if (!chol)
    throw Error(ErrorCode::NotPositiveDefinite, "-x restricted to the subset is not positive definite");
  const Matrix cov = chol->inverse();
  const std::vector<double> centre = chol->solve(yj);
  std::vector<double> upper(s);
  for (std::size_t a = 0; a < s; ++a)
    upper[a] = std::max(centre[a], 0.0) + kTruncationSigmas * std::sqrt(cov(a, a));

  std::vector<double> t(s, 0.0);
  auto exponent = [&]() {
    double e = 0.0;
    for (std::size_t a = 0; a < s; ++a) {
      e += yj[a] * t[a];
      for (std::size_t b = 0; b < s; ++b) e += x(el[a], el[b]) * t[a] * t[b];
    }
    return e;
  };
  auto weight = [&]() {
    double w = 1.0;
    for (std::size_t a = 0; a < s; ++a) w *= std::pow(t[a], powers[a]);
    return w;
  };

  std::function<double(std::size_t)> level = [&](std::size_t a) -> double {
    auto f = [&, a](double v) {
      t[a] = v;
      if (a + 1 == s) return weight() * std::exp(exponent());
      return level(a + 1);
    };
    return adaptive(f, 0.0, upper[a], 1e-13);
  };
  return level(0);
}

double direct_g_quadrature(const Matrix& x, std::span<const double> y, SubsetIndex subset) {
  if (subset.size() > kMaxDirectQuadratureDim)
    throw Error(ErrorCode::TooHighDimension, "direct quadrature supports at most 3 coordinates, got " +
                                                 std::to_string(subset.size()));
  const std::vector<int> zeros(subset.size(), 0);
  return direct_moment_quadrature(x, y, subset, zeros);
}

}  // namespace orthant
