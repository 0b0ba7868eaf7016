#pragma once

// Gaussians of the form N(μ, Σ) with Σ = (ΦᵀΦ + D⁻¹)⁻¹ and μ = ΣΦᵀα.
//
// The fast path never forms a p×p matrix. It draws u ~ N(0, D), δ ~ N(0, I_n),
// sets v = Φu + δ, solves (ΦDΦᵀ + I_n) w = α − v and returns θ = u + DΦᵀw.
// With diagonal D this costs O(n²p); a dense D costs O(np²) for DΦᵀ.

#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "fastgauss/linalg.hpp"
#include "fastgauss/rng.hpp"

namespace fastgauss {

/// Vector parameter that takes its scalar from another argument, so Eigen
/// expressions convert instead of failing deduction.
template <typename Scalar>
using VectorArg = std::type_identity_t<Vector<Scalar>>;

/// The prior covariance D, either diagonal or a dense SPD matrix with its factor.
template <typename Scalar>
class ScaleStructure {
 public:
  struct Diagonal {
    Vector<Scalar> d;
  };
  struct DenseSpd {
    Matrix<Scalar> d;
    SpdFactor<Scalar> factor;
  };

  static ScaleStructure diagonal(Vector<Scalar> d) {
    for (Index j = 0; j < d.size(); ++j) {
      if (!(d[j] > Scalar(0)) || !std::isfinite(d[j])) {
        throw InvalidParameter("ScaleStructure: diagonal entry " + std::to_string(j) +
                               " must be positive and finite");
      }
    }
    return ScaleStructure(Diagonal{std::move(d)});
  }

  static ScaleStructure dense(Matrix<Scalar> d) {
    SpdFactor<Scalar> factor = cholesky(d);
    return ScaleStructure(DenseSpd{std::move(d), std::move(factor)});
  }

  bool is_diagonal() const { return std::holds_alternative<Diagonal>(rep_); }

  Index dim() const {
    return std::visit([](const auto& r) { return Index(r.d.rows()); }, rep_);
  }

  /// D as a dense matrix.
  Matrix<Scalar> dense_matrix() const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) return diag->d.asDiagonal();
    return std::get<DenseSpd>(rep_).d;
  }

  /// D·M.
  template <typename Derived>
  Matrix<Scalar> multiply(const Eigen::MatrixBase<Derived>& m) const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) return diag->d.asDiagonal() * m;
    return std::get<DenseSpd>(rep_).d * m;
  }

  /// D⁻¹·M.
  template <typename Derived>
  Matrix<Scalar> solve(const Eigen::MatrixBase<Derived>& m) const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) {
      return diag->d.cwiseInverse().asDiagonal() * m;
    }
    return std::get<DenseSpd>(rep_).factor.solve(m);
  }

  /// q += D⁻¹.
  void add_inverse_to(Matrix<Scalar>& q) const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) {
      q.diagonal() += diag->d.cwiseInverse();
      return;
    }
    q += std::get<DenseSpd>(rep_).factor.solve(Matrix<Scalar>::Identity(dim(), dim()));
  }

  /// Maps a standard normal z to D^{1/2}z, a draw from N(0, D).
  Vector<Scalar> colour(const Vector<Scalar>& z) const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) {
      return diag->d.cwiseSqrt().cwiseProduct(z);
    }
    return std::get<DenseSpd>(rep_).factor.lower() * z;
  }

  /// xᵀD⁻¹x.
  Scalar inverse_quadratic(const Vector<Scalar>& x) const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) {
      return (x.array().square() / diag->d.array()).sum();
    }
    return std::get<DenseSpd>(rep_).factor.solve_lower(x).squaredNorm();
  }

  Scalar log_det() const {
    if (const auto* diag = std::get_if<Diagonal>(&rep_)) return diag->d.array().log().sum();
    return std::get<DenseSpd>(rep_).factor.log_det();
  }

 private:
  explicit ScaleStructure(std::variant<Diagonal, DenseSpd> rep) : rep_(std::move(rep)) {}

  std::variant<Diagonal, DenseSpd> rep_;
};

/// The triple (Φ, D, α).
template <typename Scalar>
class StructuredGaussian {
 public:
  StructuredGaussian(Matrix<Scalar> phi, ScaleStructure<Scalar> scale, Vector<Scalar> alpha)
      : phi_(std::move(phi)), scale_(std::move(scale)), alpha_(std::move(alpha)) {
    if (phi_.rows() < 1 || phi_.cols() < 1) {
      throw DimensionMismatch("StructuredGaussian: Phi must be at least 1x1");
    }
    if (phi_.cols() != scale_.dim()) {
      throw DimensionMismatch("StructuredGaussian: Phi has " + std::to_string(phi_.cols()) +
                              " columns but D has dimension " + std::to_string(scale_.dim()));
    }
    if (phi_.rows() != alpha_.size()) {
      throw DimensionMismatch("StructuredGaussian: Phi has " + std::to_string(phi_.rows()) +
                              " rows but alpha has length " + std::to_string(alpha_.size()));
    }
    if (!phi_.allFinite() || !alpha_.allFinite()) {
      throw InvalidParameter("StructuredGaussian: non-finite entry in Phi or alpha");
    }
  }

  Index n() const { return phi_.rows(); }
  Index p() const { return phi_.cols(); }
  const Matrix<Scalar>& phi() const { return phi_; }
  const ScaleStructure<Scalar>& scale() const { return scale_; }
  const Vector<Scalar>& alpha() const { return alpha_; }

 private:
  Matrix<Scalar> phi_;
  ScaleStructure<Scalar> scale_;
  Vector<Scalar> alpha_;
};

/// Every intermediate of one augmented draw.
template <typename Scalar>
struct AugmentedDraw {
  Vector<Scalar> u;
  Vector<Scalar> delta;
  Vector<Scalar> v;
  Vector<Scalar> w;
  Vector<Scalar> theta;
};

/// DΦᵀ (p×n) together with the Cholesky factor of P = ΦDΦᵀ + I_n.
template <typename Scalar>
struct WoodburySystem {
  Matrix<Scalar> d_phi_t;
  SpdFactor<Scalar> p_factor;
};

template <typename Scalar>
WoodburySystem<Scalar> woodbury_system(const StructuredGaussian<Scalar>& g) {
  Matrix<Scalar> d_phi_t = g.scale().multiply(g.phi().transpose());
  Matrix<Scalar> p = g.phi() * d_phi_t;
  p.diagonal().array() += Scalar(1);
  return {std::move(d_phi_t), cholesky(p)};
}

/// Deterministic core of the sampler: the draw produced by a given (u, δ).
template <typename Scalar>
AugmentedDraw<Scalar> augment(const StructuredGaussian<Scalar>& g,
                              const WoodburySystem<Scalar>& system, VectorArg<Scalar> u,
                              VectorArg<Scalar> delta) {
  if (u.size() != g.p() || delta.size() != g.n()) {
    throw DimensionMismatch("augment: expected u of length " + std::to_string(g.p()) +
                            " and delta of length " + std::to_string(g.n()));
  }
  AugmentedDraw<Scalar> draw;
  draw.v = g.phi() * u + delta;
  draw.w = system.p_factor.solve(g.alpha() - draw.v);
  draw.theta = u + system.d_phi_t * draw.w;
  draw.u = std::move(u);
  draw.delta = std::move(delta);
  return draw;
}

template <typename Scalar>
AugmentedDraw<Scalar> augment(const StructuredGaussian<Scalar>& g, VectorArg<Scalar> u,
                              VectorArg<Scalar> delta) {
  return augment(g, woodbury_system(g), std::move(u), std::move(delta));
}

/// One exact draw from N(μ, Σ). Consumes p standard normals for u, then n for δ.
template <typename Scalar>
AugmentedDraw<Scalar> fast_sample(const StructuredGaussian<Scalar>& g,
                                  const WoodburySystem<Scalar>& system, RngStream& rng) {
  Vector<Scalar> u = g.scale().colour(draw_std_normal(rng, g.p()).template cast<Scalar>());
  Vector<Scalar> delta = draw_std_normal(rng, g.n()).template cast<Scalar>();
  return augment(g, system, std::move(u), std::move(delta));
}

template <typename Scalar>
AugmentedDraw<Scalar> fast_sample(const StructuredGaussian<Scalar>& g, RngStream& rng) {
  return fast_sample(g, woodbury_system(g), rng);
}

/// μ = DΦᵀ(ΦDΦᵀ + I_n)⁻¹α, i.e. the sampler with u = 0 and δ = 0.
template <typename Scalar>
Vector<Scalar> posterior_mean(const StructuredGaussian<Scalar>& g,
                              const WoodburySystem<Scalar>& system) {
  return system.d_phi_t * system.p_factor.solve(g.alpha());
}

template <typename Scalar>
Vector<Scalar> posterior_mean(const StructuredGaussian<Scalar>& g) {
  return posterior_mean(g, woodbury_system(g));
}

/// Q = ΦᵀΦ + D⁻¹, formed explicitly. O(np² + p³) for dense D.
template <typename Scalar>
Matrix<Scalar> precision_matrix(const StructuredGaussian<Scalar>& g) {
  Matrix<Scalar> q = Matrix<Scalar>::Zero(g.p(), g.p());
  q.template selfadjointView<Eigen::Lower>().rankUpdate(g.phi().transpose());
  g.scale().add_inverse_to(q);
  return Matrix<Scalar>(q.template selfadjointView<Eigen::Lower>());
}

/// Cholesky-based reference sampler: factor Q = LLᵀ, then θ = Q⁻¹Φᵀα + L⁻ᵀz.
/// Q is refactored on every call.
template <typename Scalar>
Vector<Scalar> baseline_sample(const StructuredGaussian<Scalar>& g, const VectorArg<Scalar>& z) {
  if (z.size() != g.p()) {
    throw DimensionMismatch("baseline_sample: z must have length " + std::to_string(g.p()));
  }
  const SpdFactor<Scalar> factor = cholesky(precision_matrix(g));
  const Vector<Scalar> b = g.phi().transpose() * g.alpha();
  Vector<Scalar> theta = factor.solve(b);
  theta += factor.solve_upper(z);
  return theta;
}

template <typename Scalar>
Vector<Scalar> baseline_sample(const StructuredGaussian<Scalar>& g, RngStream& rng) {
  return baseline_sample(g, Vector<Scalar>(draw_std_normal(rng, g.p()).template cast<Scalar>()));
}

/// log|Σ⁻¹| = log|D⁻¹| + log|I_n + ΦDΦᵀ|, an n×n determinant in place of a p×p one.
template <typename Scalar>
Scalar log_det_precision(const StructuredGaussian<Scalar>& g,
                         const WoodburySystem<Scalar>& system) {
  return system.p_factor.log_det() - g.scale().log_det();
}

/// μᵀΣ⁻¹μ = αᵀ(ΦDΦᵀ + I_n)⁻¹ΦDΦᵀα = αᵀα − αᵀ(ΦDΦᵀ + I_n)⁻¹α, in O(n³).
template <typename Scalar>
Scalar mean_quadratic_form(const StructuredGaussian<Scalar>& g,
                           const WoodburySystem<Scalar>& system) {
  const Vector<Scalar> p_inv_alpha = system.p_factor.solve(g.alpha());
  return g.alpha().squaredNorm() - g.alpha().dot(p_inv_alpha);
}

/// log N(x; μ, Σ) without forming any p×p matrix.
template <typename Scalar>
Scalar log_density(const StructuredGaussian<Scalar>& g, const WoodburySystem<Scalar>& system,
                   const VectorArg<Scalar>& x) {
  if (x.size() != g.p()) {
    throw DimensionMismatch("log_density: x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(g.p()));
  }
  const Vector<Scalar> r = x - posterior_mean(g, system);
  // (x−μ)ᵀQ(x−μ) = ‖Φ(x−μ)‖² + (x−μ)ᵀD⁻¹(x−μ)
  const Scalar quad = (g.phi() * r).squaredNorm() + g.scale().inverse_quadratic(r);
  const Scalar log_two_pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  return -Scalar(0.5) * static_cast<Scalar>(g.p()) * log_two_pi +
         Scalar(0.5) * log_det_precision(g, system) - Scalar(0.5) * quad;
}

template <typename Scalar>
Scalar log_density(const StructuredGaussian<Scalar>& g, const VectorArg<Scalar>& x) {
  return log_density(g, woodbury_system(g), x);
}

}  // namespace fastgauss
