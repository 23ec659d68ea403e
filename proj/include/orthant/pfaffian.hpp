#pragma once

// Right-hand side of the Pfaffian system satisfied by the vector of subset
// integrals G = (g_J)_{J subset [d]}, where
//   g_J(x, y) = int_{t_J >= 0} exp(t_J' x_J t_J + y_J' t_J) dt_J,  g_{} = 1.
//
// With Sigma_J = -x_J^{-1}/2 and mu^J = Sigma_J y_J the first derivatives
// close over the state:
//   d/dy_i g_J = mu_i^J g_J + sum_{j in J} sigma_ij^J g_{J\j}     (i in J)
// and d/dx_ij g_J = (2 - delta_ij) d^2/dy_i dy_j g_J.

#include <cstddef>
#include <span>
#include <vector>

#include "orthant/core.hpp"
#include "orthant/linalg.hpp"

namespace orthant {

/// 2^d values indexed by subset bitmask. Entry 0 is g_{} = 1.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : dim_(dim), values_(std::size_t{1} << dim, 0.0) {
    values_[0] = 1.0;
  }
  StateVector(std::size_t dim, std::vector<double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](SubsetIndex j) const { return values_[j.mask()]; }
  double& operator[](SubsetIndex j) { return values_[j.mask()]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double full() const { return values_.back(); }

  /// g_{} == 1 and every entry finite and strictly positive.
  bool is_valid() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct SubsetMoments {
  SubsetIndex subset;
  std::vector<std::size_t> elements;  // sorted; local position a <-> coordinate elements[a]
  Matrix sigma;                       // -x_J^{-1} / 2
  std::vector<double> mu;             // sigma * y_J

  /// Local position of coordinate i within the subset; i must be in it.
  std::size_t position(std::size_t i) const;
};

/// Throws SingularSubmatrix if -x_J is not positive definite. J must be
/// nonempty.
SubsetMoments subset_moments(const Matrix& x, std::span<const double> y, SubsetIndex subset);

/// Moments of every nonempty subset at one (x, y).
class MomentTable {
 public:
  MomentTable(const Matrix& x, std::span<const double> y);

  std::size_t dim() const noexcept { return dim_; }
  const SubsetMoments& operator[](SubsetIndex j) const;

 private:
  std::size_t dim_;
  std::vector<SubsetMoments> moments_;  // index = mask - 1
};

/// d/dy_i g_J; zero when i is not in J.
double grad_y(const StateVector& state, const MomentTable& moments, std::size_t i, SubsetIndex j);
double grad_y(const StateVector& state, const Matrix& x, std::span<const double> y,
              std::size_t i, SubsetIndex j);

/// d^2/dy_i dy_k g_J for {i, k} in J. Differentiating the first-derivative
/// recurrence once more, with d mu_k^J / dy_i = sigma_ki^J:
///   sigma_ik^J g_J + mu_k^J d_i g_J + sum_{c in J} sigma_kc^J d_i g_{J\c}.
double hess_yy(const StateVector& state, const MomentTable& moments, std::size_t i,
               std::size_t k, SubsetIndex j);
double hess_yy(const StateVector& state, const Matrix& x, std::span<const double> y,
               std::size_t i, std::size_t k, SubsetIndex j);

/// dG/dt along `path` at time t. Matrix-free: one pass over subsets in
/// increasing mask order, O(2^d d^3). Entry 0 is exactly zero.
std::vector<double> tangent(double t, const StateVector& state, const PathSpec& path);

/// Same as above, writing into `out` (resized as needed).
void tangent(double t, const StateVector& state, const PathSpec& path, std::vector<double>& out);

/// Residuals of 2 sum_k x_ik d_i d_k g + y_i d_i g + g for i = 0..d-1 on the
/// full set. Each vanishes for an exact solution.
std::vector<double> annihilator_residual(const StateVector& state, const Matrix& x,
                                         std::span<const double> y);

/// The same operator built from x_J, y_J and applied to g_J; one residual
/// per element of J (debug use).
std::vector<double> annihilator_residual(const StateVector& state, const Matrix& x,
                                         std::span<const double> y, SubsetIndex j);

/// max_i |residual_i| / g_[d].
double normalized_residual(const StateVector& state, const Matrix& x, std::span<const double> y);

}  // namespace orthant
