#pragma once

#include <cstddef>

#include "nsmooth/types.hpp"

namespace nsmooth {

/// Strongly convex penalty on the dual set Y with minimum 0 at its center.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  virtual double value(ConstVecRef y) const = 0;
  virtual const Vec& center() const = 0;
  /// Strong-convexity modulus w.r.t. the dual-set norm.
  virtual double sigma() const = 0;
  /// D = max over Y of the prox value.
  virtual double diameter() const = 0;
  /// R = max over Y of the dual-set norm.
  virtual double radius() const = 0;
  /// Norm on Y used for sigma and R.
  virtual double norm(ConstVecRef y) const = 0;
  virtual std::size_t dual_dim() const = 0;
};

/// Entropy on the probability simplex: l(y) = log n + sum_j y_j log y_j,
/// 0 log 0 = 0. Strongly convex with sigma = 1 in the 1-norm; D = log n; R = 1.
class EntropicSimplexProx final : public ProxFunction {
 public:
  explicit EntropicSimplexProx(std::size_t n);

  double value(ConstVecRef y) const override;
  const Vec& center() const override { return center_; }
  double sigma() const override { return 1.0; }
  double diameter() const override;
  double radius() const override { return 1.0; }
  double norm(ConstVecRef y) const override { return y.lpNorm<1>(); }
  std::size_t dual_dim() const override { return static_cast<std::size_t>(center_.size()); }

 private:
  Vec center_;
};

}  // namespace nsmooth
