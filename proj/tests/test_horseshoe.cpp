#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fastgauss/horseshoe.hpp"
#include "oracle.hpp"
#include "quadrature.hpp"

using namespace fastgauss;
using namespace fastgauss::horseshoe;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using quadrature::integrate;
using quadrature::ks_against_density;
using quadrature::rejection_draw;

/// Batch-means standard error of a correlated series.
double batch_means_se(const std::vector<double>& xs, int batches) {
  const std::size_t size = xs.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += xs[b * size + i];
    means.push_back(s / static_cast<double>(size));
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= batches;
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  return std::sqrt(ss / (batches - 1) / batches);
}

HorseshoeState make_state(VectorXd beta, VectorXd lambda, double tau, double sigma2) {
  HorseshoeState s;
  s.beta = std::move(beta);
  s.lambda = std::move(lambda);
  s.tau = tau;
  s.sigma2 = sigma2;
  return s;
}

}  // namespace

TEST_CASE("update_beta with a zero design draws from the prior") {
  const RegressionData data(MatrixXd::Zero(3, 4), VectorXd::Ones(3));
  const VectorXd lambda = (VectorXd(4) << 0.5, 1.0, 2.0, 3.0).finished();
  const auto state = make_state(VectorXd::Zero(4), lambda, 0.7, 2.25);
  RngStream rng(1, 0);
  RngStream stub = rng;
  const VectorXd z = draw_std_normal(stub, 4);
  const VectorXd beta = update_beta(state, data, rng);
  const VectorXd want = 1.5 * 0.7 * lambda.cwiseProduct(z);
  CHECK(oracle::rel_error(beta, want) < 1e-14);
}

TEST_CASE("update_beta scalar case with zero noise gives the conditional mean") {
  const RegressionData data(MatrixXd::Ones(2, 1), VectorXd::Ones(2));
  // Single-observation analogue via the conditional itself: X = [1], y = [1].
  const auto state = make_state(VectorXd::Zero(1), VectorXd::Ones(1), 1.0, 1.0);
  const StructuredGaussian<double> g(MatrixXd::Ones(1, 1),
                                     ScaleStructure<double>::diagonal(VectorXd::Ones(1)),
                                     VectorXd::Ones(1));
  CHECK(augment(g, VectorXd::Zero(1), VectorXd::Zero(1)).theta[0] == doctest::Approx(0.5));

  // Two observations of y = 1 on x = 1 with λ = τ = σ = 1: A = 2 + 1, mean 2/3.
  const auto cond = standardized_beta_conditional(state, data);
  CHECK(posterior_mean(cond)[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("update_beta matches the dense conditional in distribution") {
  RngStream inst(77, 0);
  MatrixXd x(5, 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = inst.normal();
  VectorXd y(5);
  for (auto& v : y) v = inst.normal();
  const RegressionData data(x, y);
  VectorXd lambda(8);
  for (auto& v : lambda) v = std::exp(0.5 * inst.normal());
  const auto state = make_state(VectorXd::Zero(8), lambda, 0.8, 1.7);

  // A = XᵀX + Λ*⁻¹, mean A⁻¹Xᵀy, covariance σ²A⁻¹.
  MatrixXd a = oracle::matmul(oracle::transpose(x), x);
  for (Eigen::Index j = 0; j < 8; ++j) a(j, j) += 1.0 / (0.64 * lambda[j] * lambda[j]);
  const MatrixXd a_inv = oracle::inverse(a);
  const VectorXd mean = oracle::matmul(a_inv, oracle::matmul(oracle::transpose(x), MatrixXd(y))).col(0);
  const MatrixXd cov = 1.7 * a_inv;

  RngStream rng(78, 0);
  oracle::Moments mom(8);
  const long draws = 100000;
  for (long i = 0; i < draws; ++i) mom.add(update_beta(state, data, rng));
  const VectorXd m = mom.mean();
  const MatrixXd c = mom.cov();
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(std::abs(m[i] - mean[i]) < 4.0 * std::sqrt(cov(i, i) / draws));
    for (Eigen::Index j = 0; j <= i; ++j) {
      CHECK(std::abs(c(i, j) - cov(i, j)) < 4.0 * oracle::cov_se(cov, i, j, draws));
    }
  }
}

TEST_CASE("local slice step closed-form cases") {
  // m = 0: uniform on (0, 1) at probability 0.5.
  const double eta0 = local_slice_step(0.0, 0.5, 0.5);
  CHECK(eta0 == doctest::Approx(0.5));
  CHECK(1.0 / std::sqrt(eta0) == doctest::Approx(1.41421356237));
  // m = 1, bound 1: −log(1 − 0.5(1 − e^{−1})).
  CHECK(local_slice_step(1.0, 0.5, 0.5) == doctest::Approx(0.3798854930417225).epsilon(1e-12));
  // Always inside the slice bound.
  for (double u : {1e-12, 0.3, 0.999999}) {
    CHECK(local_slice_step(50.0, 0.2, u) < 4.0);
    CHECK(local_slice_step(50.0, 0.2, u) > 0.0);
  }
}

TEST_CASE("update_lambda leaves its conditional invariant") {
  // m_j = β_j²/(2τ²σ²) = 1 with β = √2, τ = σ = 1; target ∝ e^{−η}/(1+η).
  const long states = 100000;
  RngStream init(90, 0);
  VectorXd lambda(states);
  for (long j = 0; j < states; ++j) lambda[j] = 1.0 / std::sqrt(rejection_draw(init, 1.0));
  const auto state = make_state(VectorXd::Constant(states, std::sqrt(2.0)), lambda, 1.0, 1.0);
  RngStream rng(91, 0);
  const VectorXd next = update_lambda(state, rng);
  std::vector<double> eta(states);
  for (long j = 0; j < states; ++j) eta[j] = 1.0 / (next[j] * next[j]);
  const double ks = ks_against_density(eta, [](double x) { return std::exp(-x) / (1.0 + x); });
  CHECK(ks < 0.01);
}

TEST_CASE("update_tau leaves its conditional invariant") {
  // p = 1, β = λ = σ = 1: target ∝ e^{−ξ/2}/(1+ξ).
  const long states = 100000;
  RngStream init(92, 0);
  RngStream rng(93, 0);
  std::vector<double> xi(states);
  for (long k = 0; k < states; ++k) {
    const double tau = 1.0 / std::sqrt(rejection_draw(init, 0.5));
    const auto state = make_state(VectorXd::Ones(1), VectorXd::Ones(1), tau, 1.0);
    const double next = update_tau(state, rng);
    xi[k] = 1.0 / (next * next);
  }
  const double ks = ks_against_density(xi, [](double x) { return std::exp(-0.5 * x) / (1.0 + x); });
  CHECK(ks < 0.01);
}

TEST_CASE("global slice step respects the slice bound") {
  // s = 0.5 with current ξ = 1 gives bound 1.
  RngStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = global_slice_step(3.0, 0.7, 0.5, rng.uniform());
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("truncated gamma fallbacks") {
  // Zero rate: density ∝ ξ^{a−1} on (0, b).
  CHECK(truncated_gamma_quantile(2.0, 0.0, 4.0, 0.25) == doctest::Approx(2.0));
  // Mass below the bound underflows 1e-12: power law.
  const double shape = 250.5;
  const double x = truncated_gamma_quantile(shape, 1.0, 1e-3, 0.5);
  CHECK(x == doctest::Approx(1e-3 * std::pow(0.5, 1.0 / shape)));
  // Regular path agrees with the numerically integrated truncated CDF.
  const double rate = 1.3, bound = 2.0, u = 0.4;
  const double q = truncated_gamma_quantile(2.5, rate, bound, u);
  const auto f = [&](double t) { return std::pow(t, 1.5) * std::exp(-rate * t); };
  CHECK(integrate(f, 0.0, q) / integrate(f, 0.0, bound) == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("update_tau long run matches the quadrature mean") {
  const VectorXd beta = (VectorXd(3) << 1.0, 0.5, -0.3).finished();
  const VectorXd lambda = (VectorXd(3) << 1.0, 2.0, 0.5).finished();
  const double s = (beta.array() / lambda.array()).square().sum();
  const double rate = s / 2.0;
  // ∝ ξ^{(p−1)/2} e^{−rate·ξ}/(1+ξ) with p = 3.
  const auto f = [&](double x) { return x * std::exp(-rate * x) / (1.0 + x); };
  const auto xf = [&](double x) { return x * f(x); };
  const double inf = std::numeric_limits<double>::infinity();
  const double want = integrate(xf, 0.0, inf) / integrate(f, 0.0, inf);

  auto state = make_state(beta, lambda, 1.0, 1.0);
  RngStream rng(94, 0);
  std::vector<double> xs;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    state.tau = update_tau(state, rng);
    xs.push_back(1.0 / (state.tau * state.tau));
  }
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= steps;
  CHECK(std::abs(mean - want) < 4.0 * batch_means_se(xs, 100));
}

TEST_CASE("update_sigma2 conjugate moments") {
  // n = p = 1, X = 0, y = 2, β = 0: 1/σ² ~ Gamma(1, rate 2).
  const RegressionData data(MatrixXd::Zero(2, 1), (VectorXd(2) << 2.0, 0.0).finished());
  // Two rows are required by RegressionData; the second contributes nothing to the
  // residual but one to the shape, so shape = (2 + 1)/2 and scale = 4/2.
  const auto state = make_state(VectorXd::Zero(1), VectorXd::Ones(1), 1.0, 1.0);
  RngStream rng(95, 0);
  const int draws = 200000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) s += 1.0 / update_sigma2(state, data, rng);
  const double shape = 1.5, scale = 2.0;
  const double want = shape / scale;
  CHECK(std::abs(s / draws - want) < 4.0 * std::sqrt(shape) / scale / std::sqrt(draws));
}

TEST_CASE("update_sigma2 is guarded when residual and beta vanish") {
  const RegressionData data(MatrixXd::Zero(2, 2), VectorXd::Zero(2));
  const auto state = make_state(VectorXd::Zero(2), VectorXd::Ones(2), 1.0, 1.0);
  RngStream rng(96, 0);
  for (int i = 0; i < 100; ++i) {
    const double v = update_sigma2(state, data, rng);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("summaries are ordered quantiles") {
  MatrixXd draws(5, 2);
  draws << 1, 10, 2, 20, 3, 30, 4, 40, 5, 50;
  const auto s = summarize(draws, 0.5);
  CHECK(s.mean[0] == doctest::Approx(3.0));
  CHECK(s.median[1] == doctest::Approx(30.0));
  CHECK(s.lower[0] == doctest::Approx(2.0));
  CHECK(s.upper[0] == doctest::Approx(4.0));

  RngStream rng(97, 0);
  MatrixXd random(101, 30);
  for (Eigen::Index i = 0; i < random.size(); ++i) random.data()[i] = rng.normal();
  const auto r = summarize(random, 0.95);
  CHECK((r.lower.array() <= r.median.array()).all());
  CHECK((r.median.array() <= r.upper.array()).all());
}

TEST_CASE("chain configuration is validated") {
  ChainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.n_iter == 6000);
  CHECK(cfg.burn_in == 1000);
  cfg.burn_in = cfg.n_iter;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ChainConfig{};
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ChainConfig{};
  cfg.fixed_sigma = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ChainConfig{};
  cfg.n_iter = 10;
  cfg.burn_in = 3;
  cfg.thin = 3;
  CHECK(cfg.kept_draws() == 2);
}

TEST_CASE("run_chain is deterministic and keeps the configured draws") {
  RngStream inst(98, 0);
  MatrixXd x(20, 30);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = inst.normal();
  VectorXd beta0 = VectorXd::Zero(30);
  beta0[3] = 2.0;
  const VectorXd y = x * beta0 + draw_std_normal(inst, 20);
  const RegressionData data(x, y);
  ChainConfig cfg;
  cfg.n_iter = 400;
  cfg.burn_in = 100;
  cfg.thin = 3;
  cfg.seed = 5;
  const auto a = run_chain(data, cfg);
  const auto b = run_chain(data, cfg);
  CHECK(a.draws.rows() == 100);
  CHECK(a.scale_draws.size() == 100);
  CHECK(a.draws == b.draws);
  CHECK(a.summary.mean == b.summary.mean);
  for (const auto& sd : a.scale_draws) {
    CHECK(sd.tau > 0.0);
    CHECK(sd.sigma2 > 0.0);
  }
}

TEST_CASE("fixed sigma holds the noise variance constant") {
  RngStream inst(99, 0);
  MatrixXd x(10, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = inst.normal();
  const RegressionData data(x, draw_std_normal(inst, 10));
  ChainConfig cfg;
  cfg.n_iter = 50;
  cfg.burn_in = 10;
  cfg.fixed_sigma = 1.5;
  const auto r = run_chain(data, cfg);
  for (const auto& sd : r.scale_draws) CHECK(sd.sigma2 == 2.25);
}

TEST_CASE("null data is shrunk to zero") {
  RngStream inst(100, 0);
  MatrixXd x(50, 100);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = inst.normal();
  const RegressionData data(x, VectorXd::Zero(50));
  ChainConfig cfg;
  cfg.seed = 1;
  const auto r = run_chain(data, cfg);
  CHECK(r.summary.mean.cwiseAbs().maxCoeff() < 0.1);
  CHECK((r.summary.lower.array() <= 0.0).all());
  CHECK((r.summary.upper.array() >= 0.0).all());
}
