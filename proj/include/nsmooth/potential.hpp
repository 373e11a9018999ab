#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsmooth/prox.hpp"
#include "nsmooth/types.hpp"

namespace nsmooth {

/// g(y) on the dual set. Both experiments use the affine case <b, y>; other
/// convex costs plug in through value/gradient and fall back to iterative
/// inner solvers.
class DualCost {
 public:
  virtual ~DualCost() = default;
  virtual double value(ConstVecRef y) const = 0;
  virtual void gradient(ConstVecRef y, VecRef out) const = 0;
  /// Offset b when g(y) = <b, y>; nullptr otherwise.
  virtual const Vec* affine_offset() const { return nullptr; }
  /// Gradient-Lipschitz constant of g w.r.t. the dual norm.
  virtual double smoothness() const { return 0.0; }
};

class AffineDualCost final : public DualCost {
 public:
  explicit AffineDualCost(Vec offset) : offset_(std::move(offset)) {}
  double value(ConstVecRef y) const override { return offset_.dot(y); }
  void gradient(ConstVecRef, VecRef out) const override { out = offset_; }
  const Vec* affine_offset() const override { return &offset_; }

 private:
  Vec offset_;
};

/// Analytic (or estimated) regularity constants of a max-structure potential.
struct PotentialConstants {
  double smooth_lipschitz = 0.0;      // L_f
  double coupling_lipschitz = 0.0;    // lambda_h
  double coupling_smoothness = 0.0;   // L_h
  std::optional<double> strong_convexity;  // alpha, when f is strongly convex
  /// Names of constants that were estimated empirically rather than derived.
  std::vector<std::string> estimated;
};

/// s(x) = f(x) + max_{y in simplex} { <h(x), y> - g(y) }.
///
/// Subclasses supply f, grad f, h and products with the Jacobian of h. The
/// dual set is the probability simplex described by the prox-function; X
/// carries the Euclidean norm.
class MaxStructurePotential {
 public:
  MaxStructurePotential(std::size_t dim, std::shared_ptr<const ProxFunction> prox,
                        std::shared_ptr<const DualCost> cost, PotentialConstants constants);
  virtual ~MaxStructurePotential() = default;

  std::size_t dim() const { return dim_; }
  std::size_t dual_dim() const { return prox_->dual_dim(); }
  const ProxFunction& prox() const { return *prox_; }
  const DualCost& cost() const { return *cost_; }
  const PotentialConstants& constants() const { return constants_; }

  virtual double smooth_part(ConstVecRef x) const = 0;
  virtual void smooth_part_gradient(ConstVecRef x, VecRef out) const = 0;
  virtual void coupling(ConstVecRef x, VecRef out) const = 0;
  /// out = J_h(x)^T y
  virtual void coupling_transpose_apply(ConstVecRef x, ConstVecRef y, VecRef out) const = 0;
  virtual Mat coupling_jacobian(ConstVecRef x) const = 0;

  /// s(x). Exact vertex enumeration for affine g; Frank-Wolfe with a
  /// duality-gap certificate otherwise.
  double value(ConstVecRef x) const;
  /// max_{y in simplex} <hx, y> - g(y) for a precomputed h(x).
  double inner_max(ConstVecRef hx) const;

 protected:
  std::size_t dim_;
  std::shared_ptr<const ProxFunction> prox_;
  std::shared_ptr<const DualCost> cost_;
  PotentialConstants constants_;
};

/// Norm of J as a map from (R^d, |.|_2) into the dual of (Y, |.|_Y). For the
/// 1-norm on Y this is the largest row 2-norm.
double coupling_operator_norm(const Mat& jacobian);

/// Largest observed |J_h(x)|_{X,Y} over `trials` Gaussian points of scale 3.
double lipschitz_estimate(const MaxStructurePotential& potential, std::size_t trials,
                          std::uint64_t seed);

/// Spectral norm by power iteration on J^T J; used where Y is Euclidean.
double spectral_norm(const Mat& m, int max_iterations = 500, double tol = 1e-13);

void require_finite(ConstVecRef x, const char* what);

}  // namespace nsmooth
