#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "orthant/oracles.hpp"
#include "orthant/probability.hpp"
#include "test_util.hpp"

using namespace orthant;

namespace {

ProblemSpec equicorrelated(std::size_t d, double rho) {
  Matrix c(d, d, rho);
  for (std::size_t i = 0; i < d; ++i) c(i, i) = 1.0;
  return {std::vector<double>(d, 0.0), c};
}

}  // namespace

TEST_CASE("orthant_probability examples") {
  CHECK(orthant_probability({{0.0}, Matrix{{1.0}}}).probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(orthant_probability({{0, 0}, Matrix{{1, 0.5}, {0.5, 1}}}).probability ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  const OrthantResult half = orthant_probability(equicorrelated(10, 0.5));
  CHECK(std::abs(half.probability - 1.0 / 11.0) < 1e-8);
  CHECK(std::abs(half.probability - 0.090909086078297) < 1e-6);
  CHECK(orthant_probability(equicorrelated(10, 0.0)).probability ==
        doctest::Approx(0.0009765625).epsilon(1e-12));
}

TEST_CASE("result fields are consistent") {
  std::mt19937_64 rng(31);
  const OrthantResult r = orthant_probability(testutil::random_problem(4, rng, 0.7));
  CHECK(r.probability > 0.0);
  CHECK(r.probability < 1.0);
  CHECK(std::abs(r.probability - std::exp(r.log_prefactor) * r.g_value) <= 1e-14 * r.probability);
  CHECK(r.steps > 0);
  CHECK(r.tangent_evaluations >= 6 * r.steps);
  CHECK(r.residual_norm < 1e-6);
}

TEST_CASE("signed orthants") {
  const ProblemSpec spec{{0.3, -0.2, 0.1}, Matrix{{1, 0.2, 0.1}, {0.2, 1, -0.3}, {0.1, -0.3, 1}}};
  const std::vector<int> plus{1, 1, 1};
  CHECK(orthant_probability_signed(spec, plus).probability == orthant_probability(spec).probability);

  const ProblemSpec one{{0.5}, Matrix{{1.0}}};
  const std::vector<int> minus{-1};
  CHECK(orthant_probability_signed(one, minus).probability ==
        doctest::Approx(0.3085375387259869).epsilon(1e-9));
  CHECK(orthant_probability_signed(one, minus).probability ==
        doctest::Approx(1.0 - orthant_probability(one).probability).epsilon(1e-9));

  const ProblemSpec iid{{0, 0}, Matrix::identity(2)};
  for (std::size_t mask = 0; mask < 4; ++mask)
    CHECK(orthant_probability_signed(iid, signs_from_mask(2, mask)).probability ==
          doctest::Approx(0.25).epsilon(1e-12));

  const std::vector<int> bad{1, 0, 1};
  const std::vector<int> short_signs{1, 1};
  CHECK(error_code_of([&] { orthant_probability_signed(spec, bad); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { orthant_probability_signed(spec, short_signs); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("orthant_sum_check") {
  SUBCASE("independent quarters") {
    const SumCheckResult r = orthant_sum_check({{0, 0}, Matrix::identity(2)});
    CHECK(r.error <= 1e-12);
    CHECK(r.probabilities.size() == 4);
  }
  SUBCASE("random d = 4") {
    std::mt19937_64 rng(41);
    ProblemSpec spec = testutil::random_problem(4, rng, 0.0);
    CHECK(orthant_sum_check(spec).error < 1e-6);
  }
  SUBCASE("refuses d > 14") {
    const ProblemSpec spec{std::vector<double>(15, 0.0), Matrix::identity(15)};
    CHECK(error_code_of([&] { orthant_sum_check(spec); }) == ErrorCode::DimensionTooLarge);
  }
}

TEST_CASE("property: permutation invariance") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 2 + rng() % 4;
    const ProblemSpec spec = testutil::random_problem(d, rng, 0.5);
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ProblemSpec p{std::vector<double>(d), Matrix(d, d)};
    for (std::size_t i = 0; i < d; ++i) {
      p.mean[i] = spec.mean[perm[i]];
      for (std::size_t j = 0; j < d; ++j) p.cov(i, j) = spec.cov(perm[i], perm[j]);
    }
    CHECK(orthant_probability(p).probability ==
          doctest::Approx(orthant_probability(spec).probability).epsilon(1e-9));
  }
}

TEST_CASE("property: scale invariance") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 2 + rng() % 4;
    const ProblemSpec spec = testutil::random_problem(d, rng, 0.5);
    std::vector<double> s(d);
    for (double& v : s) v = u(rng);
    ProblemSpec scaled = spec;
    for (std::size_t i = 0; i < d; ++i) {
      scaled.mean[i] *= s[i];
      for (std::size_t j = 0; j < d; ++j) scaled.cov(i, j) *= s[i] * s[j];
    }
    CHECK(orthant_probability(scaled).probability ==
          doctest::Approx(orthant_probability(spec).probability).epsilon(1e-9));
  }
}

TEST_CASE("property: block-diagonal covariance factorizes") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t d1 = 1 + rng() % 3, d2 = 1 + rng() % 3;
    const ProblemSpec a = testutil::random_problem(d1, rng, 0.5);
    const ProblemSpec b = testutil::random_problem(d2, rng, 0.5);
    ProblemSpec joint{a.mean, Matrix(d1 + d2, d1 + d2)};
    joint.mean.insert(joint.mean.end(), b.mean.begin(), b.mean.end());
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d1; ++j) joint.cov(i, j) = a.cov(i, j);
    for (std::size_t i = 0; i < d2; ++i)
      for (std::size_t j = 0; j < d2; ++j) joint.cov(d1 + i, d1 + j) = b.cov(i, j);
    CHECK(orthant_probability(joint).probability ==
          doctest::Approx(orthant_probability(a).probability * orthant_probability(b).probability)
              .epsilon(1e-9));
  }
}

TEST_CASE("property: complementary half-lines sum to one") {
  for (double mean : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    for (double var : {0.25, 1.0, 3.0}) {
      const ProblemSpec spec{{mean}, Matrix{{var}}};
      const double up = orthant_probability_signed(spec, std::vector<int>{1}).probability;
      const double down = orthant_probability_signed(spec, std::vector<int>{-1}).probability;
      CHECK(std::abs(up + down - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("property: probability is nondecreasing in each mean coordinate") {
  const Matrix cov{{1, 0.3, -0.2}, {0.3, 1.2, 0.4}, {-0.2, 0.4, 0.9}};
  for (std::size_t i = 0; i < 3; ++i) {
    double previous = 0.0;
    for (double m = -1.5; m <= 1.5 + 1e-12; m += 0.5) {
      std::vector<double> mean{0.1, -0.1, 0.2};
      mean[i] = m;
      const double p = orthant_probability({mean, cov}).probability;
      CHECK(p > previous);
      previous = p;
    }
  }
}

TEST_CASE("input errors propagate") {
  CHECK(error_code_of([] { orthant_probability({{0, 0}, Matrix{{1, 2}, {2, 1}}}); }) ==
        ErrorCode::NotPositiveDefinite);
  CHECK(error_code_of([] { orthant_probability({{0, 0}, Matrix{{1, 0.1}, {0.3, 1}}}); }) ==
        ErrorCode::NotSymmetric);
}
