// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orthant/cli.hpp"
#include "orthant/oracles.hpp"
#include "orthant/pfaffian.hpp"
#include "orthant/probability.hpp"

using namespace orthant;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %-3s %-44s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

ProblemSpec equicorrelated(std::size_t d, double rho) {
  Matrix c(d, d, rho);
  for (std::size_t i = 0; i < d; ++i) c(i, i) = 1.0;
  return {std::vector<double>(d, 0.0), c};
}

ProblemSpec random_zero_mean(std::size_t d, std::uint64_t seed) {
  return {std::vector<double>(d, 0.0), cli::random_correlation(d, seed)};
}

Outcome table2_equicorrelated() {
  double worst = 0.0;
  bool spots = true;
  for (double rho : {0.0, 0.1, 0.25, 0.5}) {
    const double hgm = orthant_probability(equicorrelated(10, rho)).probability;
    worst = std::max(worst, std::abs(hgm - equicorrelated_reference(10, rho)));
    if (rho == 0.0) spots = spots && std::abs(hgm - 0.0009765625) < 1e-6;
    if (rho == 0.5) spots = spots && std::abs(hgm - 0.090909086078297) < 1e-6;
  }
  return {worst < 1e-6 && spots, "max |hgm - 1-d integral| = " + sci(worst) + " (< 1e-6)"};
}

Outcome sum_to_one(std::size_t max_dim, double bound, const IntegratorConfig& cfg, double per_dim_budget) {
  double worst = 0.0, slowest = 0.0;
  for (std::size_t d = 2; d <= max_dim; ++d) {
    const auto start = std::chrono::steady_clock::now();
    worst = std::max(worst, orthant_sum_check(random_zero_mean(d, 1000 + d), cfg).error);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return {worst < bound && slowest <= per_dim_budget,
          "d=2.." + std::to_string(max_dim) + " max error " + sci(worst) + " (< " + sci(bound) +
              "), slowest dim " + sci(slowest) + "s"};
}

Outcome small_d_oracles() {
  double worst1 = 0.0, worst2 = 0.0;
  for (double sigma : {0.5, 1.0, 2.0})
    for (int k = -6; k <= 6; ++k) {
      const double ratio = 0.5 * k;  // mu / sigma in {-3, -2.5, ..., 3}
      const ProblemSpec spec{{ratio * sigma}, Matrix{{sigma * sigma}}};
      worst1 = std::max(worst1, std::abs(orthant_probability(spec).probability -
                                         univariate_reference(spec.mean[0], sigma * sigma)));
    }
  for (int k = -9; k <= 9; ++k) {
    const double rho = 0.1 * k;
    const ProblemSpec spec{{0, 0}, Matrix{{1, rho}, {rho, 1}}};
    worst2 = std::max(worst2, std::abs(orthant_probability(spec).probability - bivariate_reference(rho)));
  }
  return {worst1 < 1e-9 && worst2 < 1e-8,
          "d=1 max " + sci(worst1) + " (< 1e-9), d=2 max " + sci(worst2) + " (< 1e-8)"};
}

Outcome hessian_gate() {
  double worst = 0.0;
  // d = 1 at x = -1/2, y = 0 against sqrt(pi/2).
  {
    const Matrix x{{-0.5}};
    const std::vector<double> y{0.0};
    StateVector g(1);
    g[SubsetIndex(1)] = direct_g_quadrature(x, y, SubsetIndex(1));
    const double oracle = direct_moment_quadrature(x, y, SubsetIndex(1), std::vector<int>{2});
    worst = std::max(worst, std::abs(oracle - std::sqrt(std::numbers::pi / 2)));
    worst = std::max(worst, std::abs(hess_yy(g, x, y, 0, 0, SubsetIndex(1)) - oracle));
  }
  // d = 2 diagonal cases, with and without a shift.
  for (const auto& y : {std::vector<double>{0, 0}, std::vector<double>{0.4, -0.3}}) {
    const Matrix x{{-0.5, 0}, {0, -1.5}};
    StateVector g(2);
    for (std::uint32_t m = 1; m < 4; ++m) g[SubsetIndex(m)] = direct_g_quadrature(x, y, SubsetIndex(m));
    const SubsetIndex full(3);
    for (const auto& [i, k] : {std::pair{0, 0}, {0, 1}, {1, 1}}) {
      std::vector<int> p{0, 0};
      ++p[i];
      ++p[k];
      worst = std::max(worst, std::abs(hess_yy(g, x, y, i, k, full) - direct_moment_quadrature(x, y, full, p)));
    }
  }
  return {worst < 1e-6, "max |hess - quadrature| = " + sci(worst) + " (< 1e-6)"};
}

Outcome annihilator() {
  double worst = 0.0;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  for (std::size_t d = 1; d <= 6; ++d)
    for (int trial = 0; trial < 2; ++trial) {
      ProblemSpec spec = random_zero_mean(d, 500 + 10 * d + trial);
      for (double& m : spec.mean) m = 0.5 * normal(rng);
      const PathSpec path = build_path(natural_params(spec));
      for (double t : {0.0, 0.5, 1.0}) {
        const NaturalParams at(path.x_at(t), path.y_at(t));
        const StateVector g = t == 0.0 ? initial_state(path) : integrate(build_path(at)).final_state;
        worst = std::max(worst, normalized_residual(g, at.x(), at.y()));
      }
    }
  return {worst < 1e-6, "max normalized residual " + sci(worst) + " (< 1e-6)"};
}

Outcome monte_carlo() {
  double worst_z = 0.0;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const ProblemSpec spec = random_zero_mean(5, 900 + k);
    const McEstimate est = mc_orthant(spec, 1'000'000, 42 + k);
    const double p = orthant_probability(spec).probability;
    worst_z = std::max(worst_z, std::abs(p - est.estimate) / est.std_error);
  }
  return {worst_z < 3.0, "3 problems, max |hgm - mc| / se = " + sci(worst_z) + " (< 3)"};
}

Outcome rk4_order() {
  const PathSpec path = build_path(natural_params(random_zero_mean(3, 77)));
  IntegratorConfig tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  const double reference = integrate(path, tight).final_state.full();
  auto error = [&](std::size_t steps) {
    IntegratorConfig c;
    c.method = Method::Rk4Fixed;
    c.initial_step = 1.0 / static_cast<double>(steps);
    return std::abs(integrate(path, c).final_state.full() - reference);
  };
  const double ratio = error(8) / error(16);
  return {ratio >= 10.0 && ratio <= 22.0, "error ratio N=8 vs 16: " + sci(ratio) + " (in [10, 22])"};
}

Outcome bench_scaling() {
  std::ostringstream out, err;
  const int code = cli::run({"bench", "--dims", "8..12", "--trials", "10", "--seed", "2024",
                             "--sum-check-max-dim", "0"},
                            out, err);
  if (code != 0) return {false, "bench exited with " + std::to_string(code)};
  const auto doc = nlohmann::json::parse(out.str());
  std::string detail = "growth 8->12:";
  bool ok = true;
  for (std::size_t i = 1; i < doc["rows"].size(); ++i) {
    if (doc["rows"][i]["failures"] != 0 || doc["rows"][i - 1]["failures"] != 0) ok = false;
    const double ratio = doc["rows"][i]["mean_seconds"].get<double>() /
                         doc["rows"][i - 1]["mean_seconds"].get<double>();
    ok = ok && ratio >= 2.0 && ratio <= 6.0;
    char buf[16];
    std::snprintf(buf, sizeof buf, " %.2f", ratio);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " (in [2, 6]); d=12 mean %.2fs",
                doc["rows"].back()["mean_seconds"].get<double>());
  return {ok, detail + buf};
}

}  // namespace

int main() {
  std::printf("orthant acceptance suite\n");
  criterion("1", "equicorrelated d=10 vs 1-d integral", table2_equicorrelated);
  criterion("2", "sum-to-one d=2..8", [] { return sum_to_one(8, 1e-6, {}, 60.0); });
  criterion("2s", "sum-to-one stretch d=2..6 at rtol 1e-12", [] {
    IntegratorConfig c;
    c.rtol = 1e-12;
    c.atol = 1e-14;
    return sum_to_one(6, 1e-8, c, 60.0);
  });
  criterion("3", "univariate and bivariate exact oracles", small_d_oracles);
  criterion("4", "hessian expansion gate", hessian_gate);
  criterion("5", "annihilator residual d<=6", annihilator);
  criterion("6", "Monte Carlo consistency d=5", monte_carlo);
  criterion("7", "rk4 fourth-order convergence", rk4_order);
  criterion("8", "bench time growth per dimension", bench_scaling);
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
