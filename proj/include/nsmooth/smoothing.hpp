#pragma once

#include <memory>

#include "nsmooth/potential.hpp"
#include "nsmooth/target.hpp"

namespace nsmooth {

enum class InnerSolver {
  Auto,          // closed form when available, mirror ascent otherwise
  ClosedForm,    // softmax; requires affine g on the entropic simplex
  MirrorAscent,  // entropic mirror ascent with a certified stopping rule
};

struct InnerOptions {
  InnerSolver solver = InnerSolver::Auto;
  /// Certified 1-norm distance of the returned dual point to the maximizer.
  double tolerance = 1e-10;
  int max_iterations = 10000;
  /// Mirror-ascent step is step_fraction / (beta * sigma + L_g).
  double step_fraction = 0.5;
};

struct InnerResult {
  Vec y;
  int iterations = 0;
  /// Upper bound on the 1-norm distance to the exact maximizer (0 for closed form).
  double certified_distance = 0.0;
};

/// L_f + R L_h + lambda_h^2 / (beta sigma).
double smoothness_constant(const PotentialConstants& constants, double radius, double sigma, double beta);

/// Nesterov-smoothed surrogate
///   s_beta(x) = f(x) + max_{y in Y} { <h(x), y> - g(y) - beta l(y) },
/// with gradient grad f(x) + J_h(x)^T y_beta(x). Immutable; the per-call
/// scratch is thread-local, so evaluation is reentrant across threads.
class SmoothedPotential final : public SmoothTarget {
 public:
  SmoothedPotential(std::shared_ptr<const MaxStructurePotential> base, double beta, InnerOptions options = {});

  const MaxStructurePotential& base() const { return *base_; }
  std::shared_ptr<const MaxStructurePotential> base_ptr() const { return base_; }
  double beta() const { return beta_; }
  const InnerOptions& options() const { return options_; }

  /// Cached L_{s_beta}.
  double smoothness_constant() const { return smoothness_; }
  std::optional<double> smoothness() const override { return smoothness_; }

  std::size_t dim() const override { return base_->dim(); }
  double value(ConstVecRef x) const override;
  void gradient(ConstVecRef x, VecRef out) const override;
  double value_and_gradient(ConstVecRef x, VecRef out) const;

  Vec inner_argmax(ConstVecRef x) const;
  InnerResult inner_solve(ConstVecRef x) const;

  /// Closed-form softmax maximizer for a given h(x); requires affine g.
  void softmax_argmax(ConstVecRef hx, VecRef y) const;
  InnerResult mirror_ascent(ConstVecRef hx) const;

 private:
  bool use_closed_form() const;
  double inner_value(ConstVecRef hx, ConstVecRef y) const;

  std::shared_ptr<const MaxStructurePotential> base_;
  double beta_;
  InnerOptions options_;
  double smoothness_;
};

/// Finite-difference checks are unreliable next to the kinks of s when beta
/// is tiny: true when beta <= 1e-3 and the two largest entries of y_beta(x)
/// lie within 1e-3 of each other.
bool near_kink(const SmoothedPotential& potential, ConstVecRef x);

}  // namespace nsmooth
