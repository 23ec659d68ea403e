#include "orthant/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "orthant/error.hpp"

namespace orthant {

namespace {

constexpr double kMinStep = 1e-14;
constexpr double kSafety = 0.9;
constexpr double kMinGrowth = 0.2;
constexpr double kMaxGrowth = 5.0;
// Error per unit step of the embedded fourth-order solution scales as h^4.
constexpr double kOrderExponent = 0.25;

// Runge-Kutta-Fehlberg 4(5) tableau.
constexpr std::array<double, 6> kC = {0.0, 1.0 / 4, 3.0 / 8, 12.0 / 13, 1.0, 1.0 / 2};
constexpr double kA[6][5] = {
    {},
    {1.0 / 4},
    {3.0 / 32, 9.0 / 32},
    {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197},
    {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104},
    {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40},
};
// Fifth-order weights (propagated) and fourth-order weights (error estimate).
constexpr std::array<double, 6> kB5 = {16.0 / 135, 0.0, 6656.0 / 12825, 28561.0 / 56430,
                                       -9.0 / 50, 2.0 / 55};
constexpr std::array<double, 6> kB4 = {25.0 / 216, 0.0, 1408.0 / 2565, 2197.0 / 4104,
                                       -1.0 / 5, 0.0};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

bool all_positive(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return a > 0.0; });
}

class Stepper {
 public:
  Stepper(const PathSpec& path, std::size_t n) : path_(path), n_(n) {
    for (auto& k : k_) k.resize(n);
    stage_.resize(n);
  }

  std::size_t evaluations() const { return evaluations_; }

  void eval(double t, std::span<const double> g, std::vector<double>& out) {
    scratch_state_ = StateVector(path_.dim(), std::vector<double>(g.begin(), g.end()));
    tangent(t, scratch_state_, path_, out);
    ++evaluations_;
  }

  // Classical RK4 step; result in `next`.
  void rk4(double t, double h, std::span<const double> g, std::vector<double>& next) {
    eval(t, g, k_[0]);
    axpy(g, 0.5 * h, k_[0]);
    eval(t + 0.5 * h, stage_, k_[1]);
    axpy(g, 0.5 * h, k_[1]);
    eval(t + 0.5 * h, stage_, k_[2]);
    axpy(g, h, k_[2]);
    eval(t + h, stage_, k_[3]);
    next.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      next[i] = g[i] + h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
  }

  // Fehlberg step propagating the fifth-order solution. Returns the mixed
  // error norm per unit step, max_i |err_i| / (h (atol + rtol max(|g_i|, |next_i|))),
  // so that the accumulated error over [0, 1] stays near the tolerance.
  double rkf45(double t, double h, std::span<const double> g, std::vector<double>& next,
               double rtol, double atol) {
    eval(t, g, k_[0]);
    for (std::size_t s = 1; s < 6; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        double v = g[i];
        for (std::size_t r = 0; r < s; ++r) v += h * kA[s][r] * k_[r][i];
        stage_[i] = v;
      }
      eval(t + kC[s] * h, stage_, k_[s]);
    }
    next.resize(n_);
    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double hi = 0.0, lo = 0.0;
      for (std::size_t s = 0; s < 6; ++s) {
        hi += kB5[s] * k_[s][i];
        lo += kB4[s] * k_[s][i];
      }
      next[i] = g[i] + h * hi;
      const double scale = atol + rtol * std::max(std::abs(g[i]), std::abs(next[i]));
      err = std::max(err, std::abs(hi - lo) / scale);
    }
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

 private:
  void axpy(std::span<const double> g, double h, const std::vector<double>& k) {
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = g[i] + h * k[i];
  }

  const PathSpec& path_;
  std::size_t n_;
  std::array<std::vector<double>, 6> k_;
  std::vector<double> stage_;
  StateVector scratch_state_;
  std::size_t evaluations_ = 0;
};

Trajectory integrate_rk4(const PathSpec& path, const IntegratorConfig& config) {
  StateVector state = initial_state(path);
  const std::size_t n = state.size();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / config.initial_step)));
  if (steps > config.max_steps)
    throw Error(ErrorCode::MaxStepsExceeded, "rk4: " + std::to_string(steps) +
                                                 " fixed steps exceed max_steps (t reached 0)");
  const double h = 1.0 / static_cast<double>(steps);
  Stepper stepper(path, n);
  Trajectory traj;
  std::vector<double> next;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    stepper.rk4(t, h, state.values(), next);
    next[0] = 1.0;
    if (!all_finite(next))
      throw Error(ErrorCode::NonFiniteState,
                  "state became non-finite at t=" + std::to_string(t + h) +
                      " (the integral is too large; the mean may be far from zero)");
    std::copy(next.begin(), next.end(), state.values().begin());
    ++traj.steps_taken;
    if (config.record_samples) traj.sample_points.emplace_back(t + h, state);
  }
  traj.final_state = std::move(state);
  traj.tangent_evaluations = stepper.evaluations();
  return traj;
}

Trajectory integrate_rkf45(const PathSpec& path, const IntegratorConfig& config) {
  StateVector state = initial_state(path);
  const std::size_t n = state.size();
  Stepper stepper(path, n);
  Trajectory traj;
  if (config.record_samples) traj.sample_points.emplace_back(0.0, state);

  double t = 0.0;
  // Constant path: the tangent vanishes identically, so one step covers [0, 1].
  double h = path.is_constant() ? 1.0 : std::min(config.initial_step, 1.0);
  std::vector<double> next;
  bool last_failure_nonfinite = false;

  while (t < 1.0) {
    if (traj.steps_taken + traj.rejected_steps >= config.max_steps)
      throw Error(ErrorCode::MaxStepsExceeded,
                  "max_steps " + std::to_string(config.max_steps) + " exhausted at t=" +
                      std::to_string(t));
    if (h < kMinStep) {
      if (last_failure_nonfinite)
        throw Error(ErrorCode::NonFiniteState,
                    "state became non-finite near t=" + std::to_string(t) +
                        " (the integral is too large; the mean may be far from zero)");
      throw Error(ErrorCode::StepUnderflow,
                  "step size fell below 1e-14 at t=" + std::to_string(t));
    }
    const double step = std::min(h, 1.0 - t);
    const double err = stepper.rkf45(t, step, state.values(), next, config.rtol, config.atol);
    next[0] = 1.0;

    const bool finite = all_finite(next) && std::isfinite(err);
    if (!finite || !all_positive(next)) {
      last_failure_nonfinite = !finite;
      ++traj.rejected_steps;
      h = 0.5 * step;
      continue;
    }
    if (err > 1.0) {
      last_failure_nonfinite = false;
      ++traj.rejected_steps;
      h = step * std::max(kMinGrowth, kSafety * std::pow(err, -kOrderExponent));
      continue;
    }

    t = (step == 1.0 - t) ? 1.0 : t + step;
    std::copy(next.begin(), next.end(), state.values().begin());
    ++traj.steps_taken;
    if (config.record_samples) traj.sample_points.emplace_back(t, state);
    const double growth =
        err == 0.0 ? kMaxGrowth : std::clamp(kSafety * std::pow(err, -kOrderExponent), kMinGrowth, kMaxGrowth);
    h = step * growth;
  }

  traj.final_state = std::move(state);
  traj.tangent_evaluations = stepper.evaluations();
  return traj;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0 && rtol < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rtol must lie in (0, 1)");
  if (!(atol > 0.0)) throw Error(ErrorCode::InvalidArgument, "atol must be positive");
  if (!(initial_step > 0.0 && initial_step <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "initial_step must lie in (0, 1]");
  if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be at least 1");
}

StateVector initial_state(const PathSpec& path) {
  const std::size_t d = path.dim();
  std::vector<double> single(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double xjj = path.x0()(j, j);
    if (!(xjj < 0.0))
      throw Error(ErrorCode::NonNegativeDiagonal,
                  "x_" + std::to_string(j + 1) + std::to_string(j + 1) + " is not negative");
    single[j] = std::sqrt(-std::numbers::pi / (4.0 * xjj));
  }
  StateVector g(d);
  const std::size_t n = g.size();
  for (std::size_t mask = 1; mask < n; ++mask) {
    // Peel off the lowest element; the remainder has a smaller mask.
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    const SubsetIndex j(static_cast<std::uint32_t>(mask));
    g[j] = g[j.without(low)] * single[low];
  }
  return g;
}

Trajectory integrate(const PathSpec& path, const IntegratorConfig& config) {
  config.validate();
  return config.method == Method::Rk4Fixed ? integrate_rk4(path, config)
                                           : integrate_rkf45(path, config);
}

}  // namespace orthant
