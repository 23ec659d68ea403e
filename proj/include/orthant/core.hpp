#pragma once

// Domain types and the transform from (Sigma, mu) to the natural
// parameters x = -Sigma^{-1}/2, y = Sigma^{-1} mu of the orthant integral
//   g(x, y) = int_{t >= 0} exp(t' x t + y' t) dt.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "orthant/linalg.hpp"

namespace orthant {

inline constexpr std::size_t kDefaultDimensionCap = 12;
inline constexpr std::size_t kHardDimensionCeiling = 20;
inline constexpr double kSymmetryTolerance = 1e-12;

struct ProblemSpec {
  std::vector<double> mean;
  Matrix cov;

  std::size_t dim() const noexcept { return mean.size(); }
};

/// Subset J of {0, ..., d-1} as a bitmask; bit i set iff coordinate i is in J.
class SubsetIndex {
 public:
  constexpr SubsetIndex() = default;
  constexpr explicit SubsetIndex(std::uint32_t mask) : mask_(mask) {}

  static constexpr SubsetIndex full(std::size_t d) {
    return SubsetIndex(static_cast<std::uint32_t>((std::uint64_t{1} << d) - 1));
  }
  static constexpr SubsetIndex single(std::size_t i) {
    return SubsetIndex(std::uint32_t{1} << i);
  }

  constexpr std::uint32_t mask() const noexcept { return mask_; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr std::size_t size() const noexcept {
    return static_cast<std::size_t>(std::popcount(mask_));
  }
  constexpr bool contains(std::size_t i) const noexcept { return (mask_ >> i) & 1U; }
  constexpr SubsetIndex without(std::size_t i) const noexcept {
    return SubsetIndex(mask_ & ~(std::uint32_t{1} << i));
  }
  constexpr SubsetIndex with(std::size_t i) const noexcept {
    return SubsetIndex(mask_ | (std::uint32_t{1} << i));
  }

  /// Elements in increasing order.
  std::vector<std::size_t> elements() const;

  friend constexpr bool operator==(SubsetIndex, SubsetIndex) = default;
  friend constexpr auto operator<=>(SubsetIndex, SubsetIndex) = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Checks shape, dimension cap, symmetry and positive definiteness of
/// `spec`. An asymmetry within tolerance is removed by (S + S')/2.
ProblemSpec validate_problem(const ProblemSpec& spec,
                             std::size_t dimension_cap = kDefaultDimensionCap);

/// x is symmetric by construction and -x is positive definite.
class NaturalParams {
 public:
  /// Throws NotSymmetric if x is not exactly symmetric and
  /// NotPositiveDefinite if -x is not positive definite.
  NaturalParams(Matrix x, std::vector<double> y);

  std::size_t dim() const noexcept { return y_.size(); }
  const Matrix& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }

 private:
  Matrix x_;
  std::vector<double> y_;
};

NaturalParams natural_params(const ProblemSpec& spec);

/// Straight-line homotopy x(t) = (1-t) x0 + t x1, y(t) = t y1 on [0, 1],
/// where x0 is the diagonal part of x1.
class PathSpec {
 public:
  explicit PathSpec(const NaturalParams& target);

  std::size_t dim() const noexcept { return y1_.size(); }
  const Matrix& x0() const noexcept { return x0_; }
  const Matrix& x1() const noexcept { return x1_; }
  const std::vector<double>& y1() const noexcept { return y1_; }

  Matrix x_at(double t) const;
  std::vector<double> y_at(double t) const;

  /// dx_ij/dt; zero on the diagonal.
  double dx_dt(std::size_t i, std::size_t j) const { return i == j ? 0.0 : x1_(i, j); }
  double dy_dt(std::size_t i) const { return y1_[i]; }

  /// True when x1 is diagonal and y1 = 0, i.e. the path never moves.
  bool is_constant() const;

 private:
  Matrix x0_;
  Matrix x1_;
  std::vector<double> y1_;
};

PathSpec build_path(const NaturalParams& params);

}  // namespace orthant
