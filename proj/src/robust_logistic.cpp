#include "nsmooth/robust_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsmooth/errors.hpp"
#include "nsmooth/rng.hpp"

namespace nsmooth {

namespace {

constexpr double kGammaRate = 0.01;  // Gamma(1, 0.01) prior on the precision

PotentialConstants logistic_constants(const std::vector<Mat>& perturbed) {
  PotentialConstants c;
  double lambda = 0.0;
  double smooth = 0.0;
  for (const Mat& z : perturbed) {
    // |grad h_i| <= sum_k |z_k| because every sigmoid factor lies in [0, 1];
    // the Hessian of h_i is bounded by Z^T Z / 4.
    lambda = std::max(lambda, z.rowwise().norm().sum());
    Eigen::SelfAdjointEigenSolver<Mat> eig(z.transpose() * z, Eigen::EigenvaluesOnly);
    smooth = std::max(smooth, 0.25 * eig.eigenvalues().maxCoeff());
  }
  c.coupling_lipschitz = lambda;
  c.coupling_smoothness = smooth;
  c.estimated.push_back("L_f");
  return c;
}

}  // namespace

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double logistic_nll(const Mat& features, const Vec& labels, ConstVecRef weights) {
  const Vec margins = labels.cwiseProduct(features * weights);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < margins.size(); ++k) acc += softplus(-margins[k]);
  return acc;
}

RobustLogisticPotential::RobustLogisticPotential(const Dataset& data,
                                                 std::vector<double> noise_levels,
                                                 std::uint64_t perturbation_seed)
    : MaxStructurePotential(static_cast<std::size_t>(data.feature_dim()) + 1,
                            std::make_shared<EntropicSimplexProx>(noise_levels.size()),
                            std::make_shared<AffineDualCost>(Vec::Zero(static_cast<Eigen::Index>(noise_levels.size()))),
                            PotentialConstants{}),
      noise_levels_(std::move(noise_levels)),
      labels_(data.labels) {
  if (data.size() == 0) throw InvalidInput("robust logistic potential needs data");
  for (double level : noise_levels_)
    if (!(level >= 0.0) || !std::isfinite(level)) throw InvalidInput("noise levels must be finite and >= 0");

  const Eigen::Index p = data.feature_dim();
  Vec sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = data.features.col(j).mean();
    const double var = (data.features.col(j).array() - mean).square().sum() /
                       std::max<double>(1.0, static_cast<double>(data.size() - 1));
    sd[j] = std::sqrt(var);
  }

  RandomStream rng(perturbation_seed, 0x9e27);
  Vec noise(p);
  for (std::size_t i = 0; i < noise_levels_.size(); ++i) {
    Mat z = data.features;
    if (noise_levels_[i] > 0.0) {
      for (Eigen::Index k = 0; k < z.rows(); ++k) {
        rng.seek((static_cast<std::uint64_t>(i) << 32) + static_cast<std::uint64_t>(k));
        rng.fill_normal(noise);
        z.row(k) += noise_levels_[i] * sd.cwiseProduct(noise).transpose();
      }
    }
    perturbed_.push_back(std::move(z));
  }

  PotentialConstants c = logistic_constants(perturbed_);
  // f is not globally smooth in log alpha; report the Hessian norm at the
  // prior-typical region |w| <= 3, |log alpha| <= 3.
  const double alpha_max = std::exp(3.0);
  c.smooth_lipschitz = alpha_max * (1.0 + 3.0 + 0.5 * 9.0) + kGammaRate * alpha_max;
  constants_ = std::move(c);
}

double RobustLogisticPotential::smooth_part(ConstVecRef x) const {
  require_finite(x, "x");
  const auto p = static_cast<Eigen::Index>(weight_dim());
  const double log_alpha = x[p];
  const double alpha = std::exp(log_alpha);
  const auto w = x.head(p);
  const double half_p = 0.5 * static_cast<double>(p);
  return 0.5 * alpha * w.squaredNorm() - half_p * log_alpha + half_p * std::log(2.0 * std::numbers::pi) +
         kGammaRate * alpha - std::log(kGammaRate) - log_alpha;
}

void RobustLogisticPotential::smooth_part_gradient(ConstVecRef x, VecRef out) const {
  const auto p = static_cast<Eigen::Index>(weight_dim());
  const double alpha = std::exp(x[p]);
  out.head(p) = alpha * x.head(p);
  out[p] = 0.5 * alpha * x.head(p).squaredNorm() - 0.5 * static_cast<double>(p) + kGammaRate * alpha - 1.0;
}

void RobustLogisticPotential::coupling(ConstVecRef x, VecRef out) const {
  const auto p = static_cast<Eigen::Index>(weight_dim());
  for (std::size_t i = 0; i < perturbed_.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = logistic_nll(perturbed_[i], labels_, x.head(p));
}

void RobustLogisticPotential::coupling_transpose_apply(ConstVecRef x, ConstVecRef y, VecRef out) const {
  const auto p = static_cast<Eigen::Index>(weight_dim());
  out.setZero();
  Vec residual(labels_.size());
  for (std::size_t i = 0; i < perturbed_.size(); ++i) {
    const double weight = y[static_cast<Eigen::Index>(i)];
    if (weight == 0.0) continue;
    const Vec margins = labels_.cwiseProduct(perturbed_[i] * x.head(p));
    for (Eigen::Index k = 0; k < margins.size(); ++k)
      residual[k] = -labels_[k] * stable_sigmoid(-margins[k]);
    out.head(p).noalias() += weight * (perturbed_[i].transpose() * residual);
  }
}

Mat RobustLogisticPotential::coupling_jacobian(ConstVecRef x) const {
  const Eigen::Index n = static_cast<Eigen::Index>(perturbed_.size());
  Mat jac = Mat::Zero(n, static_cast<Eigen::Index>(dim()));
  Vec e(n);
  Vec row(static_cast<Eigen::Index>(dim()));
  for (Eigen::Index i = 0; i < n; ++i) {
    e.setZero();
    e[i] = 1.0;
    coupling_transpose_apply(x, e, row);
    jac.row(i) = row.transpose();
  }
  return jac;
}

}  // namespace nsmooth
