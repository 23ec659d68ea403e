#include "orthant/core.hpp"

#include <cmath>
#include <string>

#include "orthant/error.hpp"

namespace orthant {

std::vector<std::size_t> SubsetIndex::elements() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::uint32_t m = mask_; m != 0; m &= m - 1)
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

ProblemSpec validate_problem(const ProblemSpec& spec, std::size_t dimension_cap) {
  const std::size_t d = spec.dim();
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  if (dimension_cap > kHardDimensionCeiling) dimension_cap = kHardDimensionCeiling;
  if (d > dimension_cap)
    throw Error(ErrorCode::DimensionTooLarge,
                "dimension " + std::to_string(d) + " exceeds cap " + std::to_string(dimension_cap));
  if (spec.cov.rows() != d || spec.cov.cols() != d)
    throw Error(ErrorCode::InvalidArgument,
                "covariance is " + std::to_string(spec.cov.rows()) + "x" +
                    std::to_string(spec.cov.cols()) + " but mean has length " + std::to_string(d));
  for (double m : spec.mean)
    if (!std::isfinite(m)) throw Error(ErrorCode::InvalidArgument, "mean has a non-finite entry");
  for (std::size_t i = 0; i < d; ++i)
    for (double v : spec.cov.row(i))
      if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "covariance has a non-finite entry");

  const double scale = spec.cov.max_abs();
  ProblemSpec out = spec;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double a = spec.cov(i, j), b = spec.cov(j, i);
      if (std::abs(a - b) > kSymmetryTolerance * scale)
        throw Error(ErrorCode::NotSymmetric, "covariance is not symmetric at (" +
                                                 std::to_string(i + 1) + "," +
                                                 std::to_string(j + 1) + ")");
      out.cov.set_symmetric(i, j, 0.5 * (a + b));
    }

  std::size_t minor = 0;
  if (!Cholesky::factor(out.cov, &minor))
    throw Error(ErrorCode::NotPositiveDefinite,
                "covariance is not positive definite (leading minor " + std::to_string(minor) +
                    " is not positive)");
  return out;
}

NaturalParams::NaturalParams(Matrix x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t d = y_.size();
  if (x_.rows() != d || x_.cols() != d)
    throw Error(ErrorCode::InvalidArgument, "natural parameters have mismatched shapes");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (x_(i, j) != x_(j, i))
        throw Error(ErrorCode::NotSymmetric, "x must be exactly symmetric");
  std::size_t minor = 0;
  if (!Cholesky::factor(-1.0 * x_, &minor))
    throw Error(ErrorCode::NotPositiveDefinite,
                "-x is not positive definite (leading minor " + std::to_string(minor) + ")");
}

NaturalParams natural_params(const ProblemSpec& spec) {
  const std::size_t d = spec.dim();
  std::size_t minor = 0;
  auto chol = Cholesky::factor(spec.cov, &minor);
  if (!chol)
    throw Error(ErrorCode::NotPositiveDefinite,
                "covariance is not positive definite (leading minor " + std::to_string(minor) +
                    " is not positive)");
  const Matrix inv = chol->inverse();
  Matrix x(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) x.set_symmetric(i, j, -0.5 * inv(i, j));
  return NaturalParams(std::move(x), chol->solve(spec.mean));
}

PathSpec::PathSpec(const NaturalParams& target)
    : x0_(target.dim(), target.dim()), x1_(target.x()), y1_(target.y()) {
  for (std::size_t i = 0; i < dim(); ++i) x0_(i, i) = x1_(i, i);
}

Matrix PathSpec::x_at(double t) const {
  const std::size_t d = dim();
  Matrix x(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    x(i, i) = x1_(i, i);
    for (std::size_t j = 0; j < i; ++j) x.set_symmetric(i, j, t * x1_(i, j));
  }
  return x;
}

std::vector<double> PathSpec::y_at(double t) const {
  std::vector<double> y(y1_);
  for (double& v : y) v *= t;
  return y;
}

bool PathSpec::is_constant() const {
  for (double v : y1_)
    if (v != 0.0) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (x1_(i, j) != 0.0) return false;
  return true;
}

PathSpec build_path(const NaturalParams& params) { return PathSpec(params); }

}  // namespace orthant
