#pragma once

#include <cstdint>
#include <vector>

#include "nsmooth/dataset.hpp"
#include "nsmooth/potential.hpp"

namespace nsmooth {

double stable_sigmoid(double t);
/// log(1 + exp(t)) without overflow.
double softplus(double t);

/// Worst-case posterior potential for Bayesian logistic regression.
///
/// Parameter x = [w, log alpha] with prior w | alpha ~ N(0, alpha^{-1} I),
/// alpha ~ Gamma(shape 1, rate 0.01), including the log-alpha Jacobian. The
/// coupling h_i(x) is the negative log-likelihood of the i-th perturbed copy
/// of the training data (features plus noise_levels[i] times per-feature
/// standard deviation times Gaussian noise), g = 0 and Y is the simplex over
/// the copies. With one copy at zero noise this is the nominal posterior.
class RobustLogisticPotential final : public MaxStructurePotential {
 public:
  RobustLogisticPotential(const Dataset& data, std::vector<double> noise_levels,
                          std::uint64_t perturbation_seed);

  double smooth_part(ConstVecRef x) const override;
  void smooth_part_gradient(ConstVecRef x, VecRef out) const override;
  void coupling(ConstVecRef x, VecRef out) const override;
  void coupling_transpose_apply(ConstVecRef x, ConstVecRef y, VecRef out) const override;
  Mat coupling_jacobian(ConstVecRef x) const override;

  std::size_t weight_dim() const { return dim() - 1; }
  const std::vector<Mat>& perturbed_features() const { return perturbed_; }
  const Vec& labels() const { return labels_; }
  const std::vector<double>& noise_levels() const { return noise_levels_; }

 private:
  std::vector<double> noise_levels_;
  std::vector<Mat> perturbed_;
  Vec labels_;
};

/// Negative log-likelihood of labels given features and weights.
double logistic_nll(const Mat& features, const Vec& labels, ConstVecRef weights);

}  // namespace nsmooth
