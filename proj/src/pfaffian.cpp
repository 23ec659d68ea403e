#include "orthant/pfaffian.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "orthant/error.hpp"

namespace orthant {

namespace {

[[noreturn]] void throw_singular(SubsetIndex j) {
  throw Error(ErrorCode::SingularSubmatrix,
              "-x restricted to subset mask " + std::to_string(j.mask()) +
                  " is not positive definite");
}

// In-place inverse of the s x s SPD matrix in `a` (row-major, stride s) via
// Cholesky. `work` needs s*s doubles. Returns false if factorization fails.
bool spd_inverse_inplace(double* a, double* work, std::size_t s) {
  double* l = work;
  for (std::size_t j = 0; j < s; ++j) {
    double diag = a[j * s + j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j * s + k] * l[j * s + k];
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    l[j * s + j] = ljj;
    for (std::size_t i = j + 1; i < s; ++i) {
      double v = a[i * s + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * s + k] * l[j * s + k];
      l[i * s + j] = v / ljj;
    }
  }
  // a <- L^{-1} (lower triangle).
  for (std::size_t j = 0; j < s; ++j) {
    a[j * s + j] = 1.0 / l[j * s + j];
    for (std::size_t i = j + 1; i < s; ++i) {
      double v = 0.0;
      for (std::size_t k = j; k < i; ++k) v -= l[i * s + k] * a[k * s + j];
      a[i * s + j] = v / l[i * s + i];
    }
  }
  // work <- L^{-T} L^{-1}.
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t k = i; k < s; ++k) v += a[k * s + i] * a[k * s + j];
      work[i * s + j] = v;
      work[j * s + i] = v;
    }
  std::copy(work, work + s * s, a);
  return true;
}

// d/dy g_J for every element of J, from moments of J.
std::vector<double> subset_gradient(const StateVector& state, const SubsetMoments& m) {
  const std::size_t s = m.elements.size();
  const double gj = state[m.subset];
  std::vector<double> grad(s);
  for (std::size_t a = 0; a < s; ++a) {
    double v = m.mu[a] * gj;
    for (std::size_t b = 0; b < s; ++b) v += m.sigma(a, b) * state[m.subset.without(m.elements[b])];
    grad[a] = v;
  }
  return grad;
}

double subset_hessian(const StateVector& state, const MomentTable& table, std::size_t i,
                      std::size_t k, SubsetIndex j) {
  const SubsetMoments& m = table[j];
  const std::size_t a = m.position(i);
  const std::size_t b = m.position(k);
  double v = m.sigma(a, b) * state[j] + m.mu[b] * grad_y(state, table, i, j);
  for (std::size_t c = 0; c < m.elements.size(); ++c)
    v += m.sigma(b, c) * grad_y(state, table, i, j.without(m.elements[c]));
  return v;
}

}  // namespace

StateVector::StateVector(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (values_.size() != (std::size_t{1} << dim))
    throw Error(ErrorCode::InvalidArgument, "state vector must have 2^d entries");
}

bool StateVector::is_valid() const {
  if (values_.empty() || values_[0] != 1.0) return false;
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v) && v > 0.0; });
}

std::size_t SubsetMoments::position(std::size_t i) const {
  const auto it = std::lower_bound(elements.begin(), elements.end(), i);
  if (it == elements.end() || *it != i)
    throw Error(ErrorCode::InvalidArgument, "coordinate " + std::to_string(i) + " not in subset");
  return static_cast<std::size_t>(it - elements.begin());
}

SubsetMoments subset_moments(const Matrix& x, std::span<const double> y, SubsetIndex subset) {
  if (subset.empty()) throw Error(ErrorCode::InvalidArgument, "subset_moments: empty subset");
  SubsetMoments m;
  m.subset = subset;
  m.elements = subset.elements();
  const std::size_t s = m.elements.size();
  Matrix neg2x(s, s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) neg2x(a, b) = -2.0 * x(m.elements[a], m.elements[b]);
  auto chol = Cholesky::factor(neg2x);
  if (!chol) throw_singular(subset);
  m.sigma = chol->inverse();
  std::vector<double> yj(s);
  for (std::size_t a = 0; a < s; ++a) yj[a] = y[m.elements[a]];
  m.mu = m.sigma * std::span<const double>(yj);
#ifndef NDEBUG
  const Matrix check = neg2x * m.sigma;
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      assert(std::abs(check(a, b) - (a == b ? 1.0 : 0.0)) <
             1e-10 * std::max(1.0, neg2x.max_abs() * m.sigma.max_abs()));
#endif
  return m;
}

MomentTable::MomentTable(const Matrix& x, std::span<const double> y) : dim_(y.size()) {
  const std::size_t n = std::size_t{1} << dim_;
  moments_.reserve(n - 1);
  for (std::size_t mask = 1; mask < n; ++mask)
    moments_.push_back(subset_moments(x, y, SubsetIndex(static_cast<std::uint32_t>(mask))));
}

const SubsetMoments& MomentTable::operator[](SubsetIndex j) const {
  if (j.empty()) throw Error(ErrorCode::InvalidArgument, "no moments for the empty subset");
  return moments_.at(j.mask() - 1);
}

double grad_y(const StateVector& state, const MomentTable& table, std::size_t i, SubsetIndex j) {
  if (!j.contains(i)) return 0.0;
  const SubsetMoments& m = table[j];
  const std::size_t a = m.position(i);
  double v = m.mu[a] * state[j];
  for (std::size_t b = 0; b < m.elements.size(); ++b)
    v += m.sigma(a, b) * state[j.without(m.elements[b])];
  return v;
}

double grad_y(const StateVector& state, const Matrix& x, std::span<const double> y,
              std::size_t i, SubsetIndex j) {
  if (!j.contains(i)) return 0.0;
  const SubsetMoments m = subset_moments(x, y, j);
  return subset_gradient(state, m)[m.position(i)];
}

double hess_yy(const StateVector& state, const MomentTable& table, std::size_t i, std::size_t k,
               SubsetIndex j) {
  if (!j.contains(i) || !j.contains(k))
    throw Error(ErrorCode::InvalidArgument, "hess_yy: both coordinates must lie in the subset");
  return subset_hessian(state, table, i, k, j);
}

double hess_yy(const StateVector& state, const Matrix& x, std::span<const double> y,
               std::size_t i, std::size_t k, SubsetIndex j) {
  if (!j.contains(i) || !j.contains(k))
    throw Error(ErrorCode::InvalidArgument, "hess_yy: both coordinates must lie in the subset");
  const SubsetMoments m = subset_moments(x, y, j);
  const std::size_t a = m.position(i);
  const std::size_t b = m.position(k);
  const std::vector<double> grad = subset_gradient(state, m);
  double v = m.sigma(a, b) * state[j] + m.mu[b] * grad[a];
  for (std::size_t c = 0; c < m.elements.size(); ++c) {
    const SubsetIndex child = j.without(m.elements[c]);
    if (!child.contains(i)) continue;
    const SubsetMoments mc = subset_moments(x, y, child);
    v += m.sigma(b, c) * subset_gradient(state, mc)[mc.position(i)];
  }
  return v;
}

void tangent(double t, const StateVector& state, const PathSpec& path, std::vector<double>& out) {
  const std::size_t d = path.dim();
  if (state.dim() != d) throw Error(ErrorCode::InvalidArgument, "state/path dimension mismatch");
  const std::size_t n = std::size_t{1} << d;
  const Matrix& x1 = path.x1();
  const std::vector<double>& y1 = path.y1();
  const std::span<const double> g = state.values();

  out.assign(n, 0.0);
  // grad[mask * d + i] = d/dy_i g_mask, zero for i outside the mask.
  std::vector<double> grad(n * d, 0.0);

  std::vector<std::size_t> el(d);
  std::vector<double> sigma(d * d), work(d * d), w_sigma(d * d), mu(d), w_mu(d);

  for (std::size_t mask = 1; mask < n; ++mask) {
    std::size_t s = 0;
    for (std::size_t m = mask; m != 0; m &= m - 1)
      el[s++] = static_cast<std::size_t>(std::countr_zero(m));

    // sigma <- (-2 x_J(t))^{-1}
    for (std::size_t a = 0; a < s; ++a) {
      sigma[a * s + a] = -2.0 * x1(el[a], el[a]);
      for (std::size_t b = 0; b < a; ++b) {
        const double v = -2.0 * t * x1(el[a], el[b]);
        sigma[a * s + b] = v;
        sigma[b * s + a] = v;
      }
    }
    if (!spd_inverse_inplace(sigma.data(), work.data(), s))
      throw_singular(SubsetIndex(static_cast<std::uint32_t>(mask)));

    for (std::size_t a = 0; a < s; ++a) {
      double v = 0.0;
      for (std::size_t b = 0; b < s; ++b) v += sigma[a * s + b] * (t * y1[el[b]]);
      mu[a] = v;
    }

    const double gj = g[mask];
    double* gradj = grad.data() + mask * d;
    for (std::size_t a = 0; a < s; ++a) {
      double v = mu[a] * gj;
      for (std::size_t b = 0; b < s; ++b) v += sigma[a * s + b] * g[mask & ~(std::size_t{1} << el[b])];
      gradj[el[a]] = v;
    }

    // y-velocity part.
    double dg = 0.0;
    for (std::size_t a = 0; a < s; ++a) dg += y1[el[a]] * gradj[el[a]];

    // x-velocity part: sum_{a != b} W_ab H_ab with W the off-diagonal of x1_J
    // and H_ab = sigma_ab g_J + mu_b grad_a g_J + sum_c sigma_bc grad_a g_{J\c}.
    if (s >= 2) {
      double term_sigma = 0.0;
      for (std::size_t a = 0; a < s; ++a) {
        double wm = 0.0;
        for (std::size_t b = 0; b < s; ++b) {
          if (a == b) continue;
          const double w = x1(el[a], el[b]);
          term_sigma += w * sigma[a * s + b];
          wm += w * mu[b];
        }
        w_mu[a] = wm;
        for (std::size_t c = 0; c < s; ++c) {
          double v = 0.0;
          for (std::size_t b = 0; b < s; ++b)
            if (b != a) v += x1(el[a], el[b]) * sigma[b * s + c];
          w_sigma[a * s + c] = v;
        }
      }
      double acc = term_sigma * gj;
      for (std::size_t a = 0; a < s; ++a) {
        acc += w_mu[a] * gradj[el[a]];
        for (std::size_t c = 0; c < s; ++c) {
          if (c == a) continue;  // coordinate a is absent from J \ {a}
          const std::size_t child = mask & ~(std::size_t{1} << el[c]);
          acc += w_sigma[a * s + c] * grad[child * d + el[a]];
        }
      }
      dg += acc;
    }
    out[mask] = dg;
  }
}

std::vector<double> tangent(double t, const StateVector& state, const PathSpec& path) {
  std::vector<double> out;
  tangent(t, state, path, out);
  return out;
}

std::vector<double> annihilator_residual(const StateVector& state, const Matrix& x,
                                         std::span<const double> y, SubsetIndex j) {
  // Only the moments of J and its one-element-removed children are needed.
  const std::size_t d = y.size();
  if (j.empty()) return {};
  std::vector<SubsetMoments> cache(std::size_t{1} << d);
  auto moments = [&](SubsetIndex s) -> const SubsetMoments& {
    SubsetMoments& m = cache[s.mask()];
    if (m.elements.empty()) m = subset_moments(x, y, s);
    return m;
  };
  auto grad = [&](std::size_t i, SubsetIndex s) -> double {
    if (!s.contains(i)) return 0.0;
    const SubsetMoments& m = moments(s);
    return subset_gradient(state, m)[m.position(i)];
  };
  const SubsetMoments& mj = moments(j);
  const std::vector<double> gj_grad = subset_gradient(state, mj);
  const std::size_t s = mj.elements.size();
  std::vector<double> res(s);
  for (std::size_t a = 0; a < s; ++a) {
    const std::size_t i = mj.elements[a];
    double r = y[i] * gj_grad[a] + state[j];
    for (std::size_t b = 0; b < s; ++b) {
      const std::size_t k = mj.elements[b];
      double h = mj.sigma(a, b) * state[j] + mj.mu[b] * gj_grad[a];
      for (std::size_t c = 0; c < s; ++c) h += mj.sigma(b, c) * grad(i, j.without(mj.elements[c]));
      r += 2.0 * x(i, k) * h;
    }
    res[a] = r;
  }
  return res;
}

std::vector<double> annihilator_residual(const StateVector& state, const Matrix& x,
                                         std::span<const double> y) {
  return annihilator_residual(state, x, y, SubsetIndex::full(y.size()));
}

double normalized_residual(const StateVector& state, const Matrix& x, std::span<const double> y) {
  double worst = 0.0;
  for (double r : annihilator_residual(state, x, y)) worst = std::max(worst, std::abs(r));
  return worst / state.full();
}

}  // namespace orthant
