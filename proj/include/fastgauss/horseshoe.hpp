#pragma once

// Gibbs sampler for y = Xβ + ε, ε ~ N(0, σ²I), under the horseshoe prior
// β_j ~ N(0, λ_j²τ²σ²), λ_j ~ C⁺(0, 1), τ ~ C⁺(0, 1), p(σ²) ∝ 1/σ².
//
// Local and global scales are slice sampled in the inverse-square
// parameterizations η_j = λ_j⁻² and ξ = τ⁻², where the conditionals reduce to
// truncated exponential and truncated gamma draws.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fastgauss/rng.hpp"
#include "fastgauss/structured_gaussian.hpp"

namespace fastgauss::horseshoe {

struct RegressionData {
  RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y);

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }

  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

struct HorseshoeState {
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda;
  double tau = 1.0;
  double sigma2 = 1.0;

  /// Every scale strictly positive and every entry finite.
  bool valid() const;
};

struct ChainConfig {
  int n_iter = 6000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::optional<double> fixed_sigma;
  double level = 0.95;

  void validate() const;
  int kept_draws() const { return (n_iter - burn_in) / thin; }
};

struct ScaleDraw {
  double tau;
  double sigma2;
};

struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd median;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct ChainResult {
  Eigen::MatrixXd draws;  // kept iterations × p
  std::vector<ScaleDraw> scale_draws;
  PosteriorSummary summary;
};

/// Start point: β = 0, λ = 1, τ = 1, σ² = sample variance of y (1 if y is constant).
HorseshoeState initial_state(const RegressionData& data);

/// β/σ given the rest: Φ = X, D = τ²diag(λ²), α = y/σ. Scaling a draw by σ
/// gives N(A⁻¹Xᵀy, σ²A⁻¹) with A = XᵀX + Λ*⁻¹, the same law as the
/// Φ = X/σ, D = σ²Λ* form, but D stays away from underflow when σ² is tiny.
StructuredGaussian<double> standardized_beta_conditional(const HorseshoeState& state,
                                                         const RegressionData& data);

/// β | rest, one fast_sample draw of the standardized conditional times σ.
Eigen::VectorXd update_beta(const HorseshoeState& state, const RegressionData& data,
                            RngStream& rng);

/// Inverse CDF of Exponential(rate) truncated to (0, bound) at probability u.
/// rate = 0 gives the uniform on (0, bound).
double truncated_exponential_quantile(double rate, double bound, double u);

/// Inverse CDF of Gamma(shape, rate) truncated to (0, bound) at probability u.
/// Falls back to the small-bound power law bound·u^{1/shape} when the gamma
/// mass below the bound is under 1e-12 or the rate is zero.
double truncated_gamma_quantile(double shape, double rate, double bound, double u);

/// One slice transition for η ∝ e^{−mη}/(1+η): `slice` is the auxiliary level
/// s ∈ (0, 1/(1+η)) and `u` the inverse-CDF probability of the truncated draw.
double local_slice_step(double m, double slice, double u);

/// One slice transition for ξ ∝ ξ^{shape−1}e^{−rate·ξ}/(1+ξ).
double global_slice_step(double shape, double rate, double slice, double u);

Eigen::VectorXd update_lambda(const HorseshoeState& state, RngStream& rng);
double update_tau(const HorseshoeState& state, RngStream& rng);
/// σ² ~ InverseGamma((n+p)/2, {‖y − Xβ‖² + Σ β_j²/(τ²λ_j²)}/2).
double update_sigma2(const HorseshoeState& state, const RegressionData& data, RngStream& rng);

/// Per-coordinate mean, median and equal-tailed interval at `level`, using
/// linearly interpolated empirical quantiles.
PosteriorSummary summarize(const Eigen::MatrixXd& draws, double level);

/// Systematic scan β, λ, τ, σ² for cfg.n_iter sweeps, keeping every thin-th
/// draw after burn-in.
ChainResult run_chain(const RegressionData& data, const ChainConfig& cfg);

}  // namespace fastgauss::horseshoe
