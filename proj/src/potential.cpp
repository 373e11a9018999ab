#include "nsmooth/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsmooth/errors.hpp"
#include "nsmooth/rng.hpp"

namespace nsmooth {

void require_finite(ConstVecRef x, const char* what) {
  if (!x.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

MaxStructurePotential::MaxStructurePotential(std::size_t dim,
                                             std::shared_ptr<const ProxFunction> prox,
                                             std::shared_ptr<const DualCost> cost,
                                             PotentialConstants constants)
    : dim_(dim), prox_(std::move(prox)), cost_(std::move(cost)), constants_(std::move(constants)) {
  if (dim_ == 0) throw InvalidInput("potential dimension must be positive");
  if (!prox_ || !cost_) throw InvalidInput("potential needs a prox-function and a dual cost");
}

double MaxStructurePotential::inner_max(ConstVecRef hx) const {
  if (const Vec* b = cost_->affine_offset()) return (hx - *b).maxCoeff();

  // Frank-Wolfe over the simplex; the linear-minimization gap bounds the
  // suboptimality of a concave objective.
  const Eigen::Index n = hx.size();
  Vec y = prox_->center();
  Vec grad(n);
  constexpr int kMaxIterations = 100000;
  double gap = 0.0;
  for (int t = 0; t < kMaxIterations; ++t) {
    cost_->gradient(y, grad);
    grad = hx - grad;
    Eigen::Index best = 0;
    grad.maxCoeff(&best);
    gap = grad[best] - grad.dot(y);
    const double objective = hx.dot(y) - cost_->value(y);
    if (gap <= 1e-9 * std::max(1.0, std::abs(objective))) return objective;
    const double step = 2.0 / (t + 2.0);
    y *= (1.0 - step);
    y[best] += step;
  }
  throw SolverError("inner maximization did not converge", gap);
}

double MaxStructurePotential::value(ConstVecRef x) const {
  require_finite(x, "x");
  Vec hx(static_cast<Eigen::Index>(dual_dim()));
  coupling(x, hx);
  return smooth_part(x) + inner_max(hx);
}

double coupling_operator_norm(const Mat& jacobian) {
  if (jacobian.size() == 0) return 0.0;
  return jacobian.rowwise().norm().maxCoeff();
}

double spectral_norm(const Mat& m, int max_iterations, double tol) {
  if (m.size() == 0) return 0.0;
  Vec v = Vec::Ones(m.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vec w = m.transpose() * (m * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = std::sqrt(norm);
    if (std::abs(next - estimate) <= tol * std::max(1.0, next)) return next;
    estimate = next;
  }
  return estimate;
}

double lipschitz_estimate(const MaxStructurePotential& potential, std::size_t trials,
                          std::uint64_t seed) {
  if (trials == 0) throw InvalidInput("lipschitz_estimate needs at least one trial");
  RandomStream rng(seed, 0);
  Vec x(static_cast<Eigen::Index>(potential.dim()));
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    rng.seek(t);
    rng.fill_normal(x);
    x *= 3.0;
    worst = std::max(worst, coupling_operator_norm(potential.coupling_jacobian(x)));
  }
  return worst;
}

}  // namespace nsmooth
