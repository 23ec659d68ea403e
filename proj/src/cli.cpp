#include "orthant/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "orthant/oracles.hpp"

namespace orthant::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

// Flat JSON object writer that keeps insertion order and 17-digit numbers.
class ObjectWriter {
 public:
  ObjectWriter& num(std::string_view key, double v) { return raw(key, format_number(v)); }
  ObjectWriter& integer(std::string_view key, long long v) { return raw(key, std::to_string(v)); }
  ObjectWriter& str(std::string_view key, std::string_view v) { return raw(key, quote(v)); }
  ObjectWriter& boolean(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
  ObjectWriter& raw(std::string_view key, std::string_view v) {
    body_ += body_.empty() ? "" : ", ";
    body_ += quote(key);
    body_ += ": ";
    body_ += v;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

std::string int_array(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string_view method_name(Method m) { return m == Method::Rk4Fixed ? "rk4" : "rkf45"; }

std::string config_object(const RunConfig& c) {
  return ObjectWriter()
      .str("method", method_name(c.integrator.method))
      .num("rtol", c.integrator.rtol)
      .num("atol", c.integrator.atol)
      .num("initial_step", c.integrator.initial_step)
      .integer("max_steps", static_cast<long long>(c.integrator.max_steps))
      .integer("seed", static_cast<long long>(c.seed))
      .str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double read_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, where + " is not a number");
  return v.get<double>();
}

void add_integrator_flags(CLI::App& cmd, RunConfig& config, std::string& method) {
  cmd.add_option("--rtol", config.integrator.rtol, "relative tolerance");
  cmd.add_option("--atol", config.integrator.atol, "absolute tolerance");
  cmd.add_option("--method", method, "integration scheme")
      ->check(CLI::IsMember({"rk4", "rkf45"}));
  cmd.add_option("--max-steps", config.integrator.max_steps, "step budget");
  cmd.add_option("--initial-step", config.integrator.initial_step,
                 "first trial step (rkf45) or fixed step (rk4)");
  cmd.add_option("--max-dim", config.dimension_cap, "dimension cap (hard ceiling 20)");
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto d = static_cast<std::size_t>(std::stoul(text));
      return {d, d};
    }
    return {static_cast<std::size_t>(std::stoul(text.substr(0, dots))),
            static_cast<std::size_t>(std::stoul(text.substr(dots + 2)))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "--dims expects N or A..B, got '" + text + "'");
  }
}

int cmd_compute(const std::string& path, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  const ProblemFile file = load_problem(path);
  const ProblemSpec spec = file.signs ? apply_signs(file.spec, *file.signs) : file.spec;
  const auto start = Clock::now();
  const OrthantResult r = orthant_probability(spec, config.integrator, config.dimension_cap);
  const double elapsed = seconds_since(start);
  err << "compute: d=" << spec.dim() << " steps=" << r.steps << " rejected=" << r.rejected_steps
      << '\n';
  out << result_document(r, config, elapsed) << '\n';
  return kSuccess;
}

int cmd_sum_check(const std::string& path, const RunConfig& config, std::ostream& out,
                  std::ostream& err) {
  const ProblemFile file = load_problem(path);
  // Validate with the user's cap before running 2^d integrations.
  validate_problem(file.spec, std::max(config.dimension_cap, kSumCheckDimensionCap));
  const auto start = Clock::now();
  const SumCheckResult r = orthant_sum_check(file.spec, config.integrator);
  const double elapsed = seconds_since(start);
  const std::size_t d = file.spec.dim();

  std::string rows = "[";
  for (std::size_t mask = 0; mask < r.probabilities.size(); ++mask) {
    rows += mask ? ", " : "";
    rows += ObjectWriter()
                .raw("signs", int_array(signs_from_mask(d, mask)))
                .num("probability", r.probabilities[mask])
                .str();
  }
  rows += "]";
  err << "sum-check: d=" << d << " error=" << format_number(r.error) << '\n';
  out << ObjectWriter()
             .num("sum_error", r.error)
             .integer("dimension", static_cast<long long>(d))
             .raw("orthants", rows)
             .num("elapsed_seconds", elapsed)
             .raw("config", config_object(config))
             .str()
      << '\n';
  return kSuccess;
}

struct OracleValue {
  double value = 0.0;
  std::optional<double> std_error;
};

[[noreturn]] void inapplicable(const std::string& why) {
  throw Error(ErrorCode::OracleInapplicable, why);
}

bool zero_mean(const ProblemSpec& spec) {
  return std::all_of(spec.mean.begin(), spec.mean.end(), [](double m) { return m == 0.0; });
}

OracleValue evaluate_oracle(const std::string& oracle, const ProblemSpec& spec,
                            std::size_t samples, std::uint64_t seed) {
  const std::size_t d = spec.dim();
  if (oracle == "univariate") {
    if (d != 1) inapplicable("univariate oracle needs d = 1, got d = " + std::to_string(d));
    return {univariate_reference(spec.mean[0], spec.cov(0, 0)), std::nullopt};
  }
  if (oracle == "bivariate") {
    if (d != 2) inapplicable("bivariate oracle needs d = 2, got d = " + std::to_string(d));
    if (!zero_mean(spec)) inapplicable("bivariate oracle needs a zero mean");
    const double rho = spec.cov(0, 1) / std::sqrt(spec.cov(0, 0) * spec.cov(1, 1));
    return {bivariate_reference(rho), std::nullopt};
  }
  if (oracle == "equicorr") {
    const auto rho = equicorrelation_of(spec.cov);
    if (!rho)
      inapplicable("equicorr oracle needs unit variances and a constant off-diagonal correlation");
    if (*rho < 0.0) inapplicable("equicorr oracle needs a nonnegative correlation");
    return {equicorrelated_reference(d, *rho, spec.mean), std::nullopt};
  }
  if (oracle == "quadrature") {
    if (d > kMaxDirectQuadratureDim)
      inapplicable("quadrature oracle supports d <= 3, got d = " + std::to_string(d));
    const NaturalParams params = natural_params(spec);
    const auto chol = Cholesky::factor(spec.cov);
    const std::vector<double> w = chol->solve_lower(spec.mean);
    double quad = 0.0;
    for (double v : w) quad += v * v;
    const double log_prefactor = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                                 0.5 * chol->log_det() - 0.5 * quad;
    const double g = direct_g_quadrature(params.x(), params.y(), SubsetIndex::full(d));
    return {std::exp(log_prefactor) * g, std::nullopt};
  }
  if (oracle == "mc") {
    const McEstimate est = mc_orthant(spec, samples, seed);
    return {est.estimate, est.std_error};
  }
  inapplicable("unknown oracle '" + oracle + "'");
}

int cmd_compare(const std::string& path, const std::string& oracle, std::size_t samples,
                std::optional<double> tolerance, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  const ProblemFile file = load_problem(path);
  const ProblemSpec spec = validate_problem(
      file.signs ? apply_signs(file.spec, *file.signs) : file.spec, config.dimension_cap);
  // Applicability is checked before the (possibly long) integration.
  const OracleValue reference = evaluate_oracle(oracle, spec, samples, config.seed);
  const OrthantResult r = orthant_probability(spec, config.integrator, config.dimension_cap);
  const double diff = std::abs(r.probability - reference.value);
  // Monte Carlo is judged against three of its own standard errors unless a
  // tolerance is given explicitly.
  const double tol = tolerance ? *tolerance
                     : reference.std_error ? 3.0 * *reference.std_error
                                           : 1e-6;
  const bool pass = diff <= tol;

  ObjectWriter doc;
  doc.str("oracle", oracle)
      .num("hgm", r.probability)
      .num("oracle_value", reference.value)
      .num("abs_difference", diff)
      .num("tolerance", tol);
  if (reference.std_error) doc.num("std_error", *reference.std_error);
  doc.boolean("pass", pass).raw("config", config_object(config));
  out << doc.str() << '\n';
  err << "compare: " << oracle << " hgm=" << format_number(r.probability)
      << " oracle=" << format_number(reference.value) << (pass ? " ok" : " MISMATCH") << '\n';
  return pass ? kSuccess : kOracleMismatch;
}

int cmd_bench(const std::string& dims_text, std::size_t trials, std::size_t sum_check_max_dim,
              const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto [lo, hi] = parse_dims(dims_text);
  if (lo < 1 || hi < lo || hi > kHardDimensionCeiling)
    throw Error(ErrorCode::InvalidArgument, "--dims must satisfy 1 <= A <= B <= 20");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "--trials must be at least 1");

  std::string rows = "[";
  for (std::size_t d = lo; d <= hi; ++d) {
    double total = 0.0, best = INFINITY, worst = 0.0;
    std::size_t failures = 0, completed = 0;
    std::optional<double> sum_error;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      ProblemSpec spec{std::vector<double>(d, 0.0),
                       random_correlation(d, config.seed * 1'000'003ULL + d * 1'009ULL + trial)};
      try {
        const auto start = Clock::now();
        orthant_probability(spec, config.integrator, std::max(config.dimension_cap, hi));
        const double t = seconds_since(start);
        total += t;
        best = std::min(best, t);
        worst = std::max(worst, t);
        ++completed;
        if (trial == 0 && d <= sum_check_max_dim)
          sum_error = orthant_sum_check(spec, config.integrator).error;
      } catch (const Error& e) {
        ++failures;
        err << "bench: d=" << d << " trial=" << trial << " failed: " << to_string(e.code())
            << ": " << e.what() << '\n';
      }
    }
    const double mean = completed ? total / static_cast<double>(completed) : NAN;
    err << "bench: d=" << d << " mean=" << mean << "s min=" << best << "s max=" << worst << "s\n";
    rows += d == lo ? "" : ", ";
    rows += ObjectWriter()
                .integer("dim", static_cast<long long>(d))
                .integer("trials", static_cast<long long>(trials))
                .integer("failures", static_cast<long long>(failures))
                .num("mean_seconds", mean)
                .num("min_seconds", completed ? best : NAN)
                .num("max_seconds", completed ? worst : NAN)
                .raw("max_sum_error", sum_error ? format_number(*sum_error) : "null")
                .str();
  }
  rows += "]";
  out << ObjectWriter().raw("rows", rows).raw("config", config_object(config)).str() << '\n';
  return kSuccess;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::OracleInapplicable) return kOracleInapplicable;
  return is_numerical(code) ? kNumericalError : kInputError;
}

ProblemFile parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed problem file: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "problem file must be an object");
  if (!doc.contains("mean") || !doc["mean"].is_array())
    throw Error(ErrorCode::ParseError, "\"mean\" must be an array of numbers");
  if (!doc.contains("cov") || !doc["cov"].is_array())
    throw Error(ErrorCode::ParseError, "\"cov\" must be an array of rows");

  const json& mean = doc["mean"];
  const json& cov = doc["cov"];
  const std::size_t d = mean.size();
  if (d == 0) throw Error(ErrorCode::ParseError, "\"mean\" is empty");

  ProblemFile file;
  file.spec.mean.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    file.spec.mean[i] = read_number(mean[i], "mean[" + std::to_string(i + 1) + "]");

  if (cov.size() != d)
    throw Error(ErrorCode::ParseError, "\"cov\" has " + std::to_string(cov.size()) +
                                           " rows, expected " + std::to_string(d));
  file.spec.cov = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const json& row = cov[i];
    if (!row.is_array())
      throw Error(ErrorCode::ParseError, "cov row " + std::to_string(i + 1) + " is not an array");
    if (row.size() != d)
      throw Error(ErrorCode::ParseError, "cov row " + std::to_string(i + 1) + " has " +
                                             std::to_string(row.size()) + " columns, expected " +
                                             std::to_string(d));
    for (std::size_t j = 0; j < d; ++j)
      file.spec.cov(i, j) = read_number(
          row[j], "cov[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
  }

  if (doc.contains("signs")) {
    const json& signs = doc["signs"];
    if (!signs.is_array() || signs.size() != d)
      throw Error(ErrorCode::ParseError, "\"signs\" must be an array of length " + std::to_string(d));
    std::vector<int> s(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!signs[i].is_number_integer() || (signs[i] != 1 && signs[i] != -1))
        throw Error(ErrorCode::ParseError, "signs[" + std::to_string(i + 1) + "] must be +1 or -1");
      s[i] = signs[i].get<int>();
    }
    file.signs = std::move(s);
  }
  return file;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

ProblemSpec apply_signs(const ProblemSpec& spec, const std::vector<int>& signs) {
  const std::size_t d = spec.dim();
  if (signs.size() != d) throw Error(ErrorCode::InvalidArgument, "sign vector length mismatch");
  ProblemSpec out = spec;
  for (std::size_t i = 0; i < d; ++i) {
    out.mean[i] *= signs[i];
    for (std::size_t j = 0; j < d; ++j) out.cov(i, j) *= signs[i] * signs[j];
  }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string result_document(const OrthantResult& r, const RunConfig& config,
                            double elapsed_seconds) {
  return ObjectWriter()
      .num("probability", r.probability)
      .num("g_value", r.g_value)
      .num("log_prefactor", r.log_prefactor)
      .integer("steps", static_cast<long long>(r.steps))
      .integer("rejected_steps", static_cast<long long>(r.rejected_steps))
      .num("residual_norm", r.residual_norm)
      .num("elapsed_seconds", elapsed_seconds)
      .raw("config", config_object(config))
      .str();
}

std::string error_document(ErrorCode code, std::string_view message) {
  return ObjectWriter().str("error", to_string(code)).str("message", message).str();
}

Matrix random_correlation(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t width = dim + 2;
  std::vector<std::vector<double>> v(dim, std::vector<double>(width));
  for (auto& row : v) {
    double norm = 0.0;
    for (double& e : row) {
      e = normal(rng);
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : row) e /= norm;
  }
  Matrix c(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    c(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < width; ++k) s += v[i][k] * v[j][k];
      c.set_symmetric(i, j, s);
    }
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate normal orthant probabilities by the holonomic gradient method"};
  app.require_subcommand(1);

  RunConfig config;
  std::string method = "rkf45";
  std::string problem_path;

  auto* compute = app.add_subcommand("compute", "orthant probability of a problem file");
  compute->add_option("problem", problem_path, "problem file")->required();
  add_integrator_flags(*compute, config, method);

  auto* sum_check = app.add_subcommand("sum-check", "sum of all 2^d signed orthant probabilities");
  sum_check->add_option("problem", problem_path, "problem file")->required();
  add_integrator_flags(*sum_check, config, method);

  std::string oracle;
  std::size_t samples = 1'000'000;
  double tolerance = 1e-6;
  auto* compare = app.add_subcommand("compare", "compare against an independent oracle");
  compare->add_option("problem", problem_path, "problem file")->required();
  compare->add_option("--oracle", oracle, "reference method")
      ->required()
      ->check(CLI::IsMember({"mc", "equicorr", "bivariate", "univariate", "quadrature"}));
  compare->add_option("--samples", samples, "Monte Carlo sample count");
  compare->add_option("--seed", config.seed, "Monte Carlo seed");
  auto* tolerance_opt =
      compare->add_option("--tolerance", tolerance, "allowed absolute difference (default 1e-6; "
                                                    "3 standard errors for mc)");
  add_integrator_flags(*compare, config, method);

  std::string dims = "5..12";
  std::size_t trials = 10;
  std::size_t sum_check_max_dim = 8;
  auto* bench = app.add_subcommand("bench", "timing study on random zero-mean problems");
  bench->add_option("--dims", dims, "dimension range A..B");
  bench->add_option("--trials", trials, "problems per dimension");
  bench->add_option("--seed", config.seed, "generator seed");
  bench->add_option("--sum-check-max-dim", sum_check_max_dim,
                    "run the sum check on the first trial up to this dimension");
  add_integrator_flags(*bench, config, method);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    out << error_document(ErrorCode::ParseError, e.what()) << '\n';
    return kInputError;
  }
  config.integrator.method = method == "rk4" ? Method::Rk4Fixed : Method::Rkf45Adaptive;

  try {
    config.integrator.validate();
    if (*compute) return cmd_compute(problem_path, config, out, err);
    if (*sum_check) return cmd_sum_check(problem_path, config, out, err);
    if (*compare)
      return cmd_compare(problem_path, oracle, samples,
                         tolerance_opt->count() ? std::optional<double>(tolerance) : std::nullopt,
                         config, out, err);
    return cmd_bench(dims, trials, sum_check_max_dim, config, out, err);
  } catch (const Error& e) {
    err << to_string(e.code()) << ": " << e.what() << '\n';
    out << error_document(e.code(), e.what()) << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace orthant::cli
