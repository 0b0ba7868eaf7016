#include "fastgauss/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "fastgauss/errors.hpp"
#include "fastgauss/structured_gaussian.hpp"

namespace fastgauss::horseshoe {

namespace {

// Scales whose reciprocal squares leave the representable range are clamped.
constexpr double kMinInverseSquare = 1e-300;
constexpr double kMaxInverseSquare = 1e300;
constexpr double kMinScale = 1e-300;

double clamp_inverse_square(double x) {
  return std::clamp(x, kMinInverseSquare, kMaxInverseSquare);
}

double sample_variance(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

RegressionData::RegressionData(Eigen::MatrixXd x_in, Eigen::VectorXd y_in)
    : x(std::move(x_in)), y(std::move(y_in)) {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("RegressionData: X has " + std::to_string(x.rows()) +
                            " rows but y has length " + std::to_string(y.size()));
  }
  if (x.rows() < 2 || x.cols() < 1) {
    throw DimensionMismatch("RegressionData: need n >= 2 and p >= 1");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidParameter("RegressionData: non-finite entry");
  }
}

bool HorseshoeState::valid() const {
  return beta.allFinite() && lambda.allFinite() && (lambda.array() > 0.0).all() &&
         std::isfinite(tau) && tau > 0.0 && std::isfinite(sigma2) && sigma2 > 0.0;
}

void ChainConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be at least 1");
  if (burn_in < 0 || burn_in >= n_iter) throw ConfigError("burn_in must lie in [0, n_iter)");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (fixed_sigma && !(*fixed_sigma > 0.0 && std::isfinite(*fixed_sigma))) {
    throw ConfigError("fixed_sigma must be positive");
  }
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
}

HorseshoeState initial_state(const RegressionData& data) {
  HorseshoeState state;
  state.beta = Eigen::VectorXd::Zero(data.p());
  state.lambda = Eigen::VectorXd::Ones(data.p());
  state.tau = 1.0;
  const double var = sample_variance(data.y);
  state.sigma2 = var > 0.0 && std::isfinite(var) ? var : 1.0;
  return state;
}

StructuredGaussian<double> standardized_beta_conditional(const HorseshoeState& state,
                                                         const RegressionData& data) {
  const double sigma = std::sqrt(state.sigma2);
  Eigen::VectorXd d = (state.tau * state.tau) * state.lambda.array().square();
  return {data.x, ScaleStructure<double>::diagonal(std::move(d)), data.y / sigma};
}

Eigen::VectorXd update_beta(const HorseshoeState& state, const RegressionData& data,
                            RngStream& rng) {
  return std::sqrt(state.sigma2) * fast_sample(standardized_beta_conditional(state, data), rng).theta;
}

double truncated_exponential_quantile(double rate, double bound, double u) {
  if (rate <= 0.0) return u * bound;
  // F(x) = (1 − e^{−rate·x}) / (1 − e^{−rate·bound})
  const double mass = -std::expm1(-rate * bound);
  return std::min(-std::log1p(-u * mass) / rate, bound);
}

double truncated_gamma_quantile(double shape, double rate, double bound, double u) {
  if (rate <= 0.0) return bound * std::pow(u, 1.0 / shape);
  const double mass = boost::math::gamma_p(shape, rate * bound);
  if (mass < 1e-12) return bound * std::pow(u, 1.0 / shape);
  const double x = boost::math::gamma_p_inv(shape, u * mass) / rate;
  return std::min(x, bound);
}

double local_slice_step(double m, double slice, double u) {
  const double bound = (1.0 - slice) / slice;
  return truncated_exponential_quantile(m, bound, u);
}

double global_slice_step(double shape, double rate, double slice, double u) {
  const double bound = (1.0 - slice) / slice;
  return truncated_gamma_quantile(shape, rate, bound, u);
}

Eigen::VectorXd update_lambda(const HorseshoeState& state, RngStream& rng) {
  const double denom = 2.0 * state.tau * state.tau * state.sigma2;
  Eigen::VectorXd lambda(state.lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double eta = 1.0 / (state.lambda[j] * state.lambda[j]);
    const double m = state.beta[j] * state.beta[j] / denom;
    const double slice = rng.uniform() / (1.0 + eta);
    const double next = clamp_inverse_square(local_slice_step(m, slice, rng.uniform()));
    lambda[j] = 1.0 / std::sqrt(next);
  }
  return lambda;
}

double update_tau(const HorseshoeState& state, RngStream& rng) {
  const auto p = static_cast<double>(state.beta.size());
  const double s = (state.beta.array() / state.lambda.array()).square().sum();
  const double xi = 1.0 / (state.tau * state.tau);
  const double slice = rng.uniform() / (1.0 + xi);
  const double next = clamp_inverse_square(
      global_slice_step(0.5 * (p + 1.0), s / (2.0 * state.sigma2), slice, rng.uniform()));
  return 1.0 / std::sqrt(next);
}

double update_sigma2(const HorseshoeState& state, const RegressionData& data, RngStream& rng) {
  const double rss = (data.y - data.x * state.beta).squaredNorm();
  const double tau2 = state.tau * state.tau;
  const double prior = (state.beta.array().square() / (tau2 * state.lambda.array().square())).sum();
  const double shape = 0.5 * static_cast<double>(data.n() + data.p());
  const double scale = std::max(0.5 * (rss + prior), kMinScale);
  return 1.0 / draw_gamma(rng, shape, scale);
}

PosteriorSummary summarize(const Eigen::MatrixXd& draws, double level) {
  if (draws.rows() < 1) throw ConfigError("summarize: no draws");
  const double tail = 0.5 * (1.0 - level);
  const Eigen::Index p = draws.cols();
  PosteriorSummary out{Eigen::VectorXd(p), Eigen::VectorXd(p), Eigen::VectorXd(p),
                       Eigen::VectorXd(p)};
  std::vector<double> column(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd::Map(column.data(), draws.rows()) = draws.col(j);
    std::sort(column.begin(), column.end());
    out.mean[j] = draws.col(j).mean();
    out.median[j] = quantile_sorted(column, 0.5);
    out.lower[j] = quantile_sorted(column, tail);
    out.upper[j] = quantile_sorted(column, 1.0 - tail);
  }
  return out;
}

ChainResult run_chain(const RegressionData& data, const ChainConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed, cfg.stream_id);
  HorseshoeState state = initial_state(data);
  if (cfg.fixed_sigma) state.sigma2 = *cfg.fixed_sigma * *cfg.fixed_sigma;

  ChainResult result;
  result.draws.resize(cfg.kept_draws(), data.p());
  result.scale_draws.reserve(static_cast<std::size_t>(cfg.kept_draws()));
  Eigen::Index kept = 0;
  for (int iter = 0; iter < cfg.n_iter; ++iter) {
    state.beta = update_beta(state, data, rng);
    state.lambda = update_lambda(state, rng);
    state.tau = update_tau(state, rng);
    if (!cfg.fixed_sigma) state.sigma2 = update_sigma2(state, data, rng);
    if (!state.valid()) {
      throw Error("run_chain: state left the parameter space at iteration " +
                  std::to_string(iter));
    }
    if (iter >= cfg.burn_in && (iter - cfg.burn_in + 1) % cfg.thin == 0) {
      result.draws.row(kept++) = state.beta.transpose();
      result.scale_draws.push_back({state.tau, state.sigma2});
    }
  }
  result.summary = summarize(result.draws, cfg.level);
  return result;
}

}  // namespace fastgauss::horseshoe
