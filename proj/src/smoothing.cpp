#include "nsmooth/smoothing.hpp"

#include <cmath>
#include <string>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

struct Scratch {
  Vec hx;
  Vec y;
  Vec tmp;
};

Scratch& scratch(Eigen::Index n, Eigen::Index d) {
  thread_local Scratch s;
  if (s.hx.size() != n) {
    s.hx.resize(n);
    s.y.resize(n);
  }
  if (s.tmp.size() != d) s.tmp.resize(d);
  return s;
}

bool is_entropic_simplex(const ProxFunction& prox) {
  return dynamic_cast<const EntropicSimplexProx*>(&prox) != nullptr;
}

}  // namespace

double smoothness_constant(const PotentialConstants& c, double radius, double sigma, double beta) {
  if (!(beta > 0.0)) throw InvalidInput("smoothing intensity beta must be positive");
  if (!(sigma > 0.0)) throw InvalidInput("prox strong-convexity sigma must be positive");
  return c.smooth_lipschitz + radius * c.coupling_smoothness +
         c.coupling_lipschitz * c.coupling_lipschitz / (beta * sigma);
}

SmoothedPotential::SmoothedPotential(std::shared_ptr<const MaxStructurePotential> base, double beta,
                                     InnerOptions options)
    : base_(std::move(base)), beta_(beta), options_(options) {
  if (!base_) throw InvalidInput("smoothed potential needs a base potential");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw InvalidInput("smoothing intensity beta must be positive");
  if (!is_entropic_simplex(base_->prox()))
    throw InvalidInput("inner solvers require the entropic prox on the simplex");
  if (options_.solver == InnerSolver::ClosedForm && base_->cost().affine_offset() == nullptr)
    throw InvalidInput("closed-form inner maximizer requires an affine dual cost");
  smoothness_ = nsmooth::smoothness_constant(base_->constants(), base_->prox().radius(),
                                             base_->prox().sigma(), beta_);
}

bool SmoothedPotential::use_closed_form() const {
  switch (options_.solver) {
    case InnerSolver::ClosedForm:
      return true;
    case InnerSolver::MirrorAscent:
      return false;
    case InnerSolver::Auto:
      break;
  }
  return base_->cost().affine_offset() != nullptr;
}

void SmoothedPotential::softmax_argmax(ConstVecRef hx, VecRef y) const {
  const Vec* b = base_->cost().affine_offset();
  if (b == nullptr) throw InvalidInput("closed-form inner maximizer requires an affine dual cost");
  y = (hx - *b) / beta_;
  y.array() = (y.array() - y.maxCoeff()).exp();
  y /= y.sum();
}

InnerResult SmoothedPotential::mirror_ascent(ConstVecRef hx) const {
  // Iterates in log space: log y <- log y + eta * grad, renormalized, with
  // grad = h - grad g(y) - beta (log y + 1). At an interior point the
  // 1-norm distance to the maximizer is at most spread(grad) / (2 beta sigma).
  const Eigen::Index n = hx.size();
  const double sigma = base_->prox().sigma();
  const double modulus = beta_ * sigma;
  const double eta = options_.step_fraction / (modulus + base_->cost().smoothness());

  InnerResult result;
  Vec log_y = Vec::Constant(n, -std::log(static_cast<double>(n)));
  Vec y = log_y.array().exp();
  Vec grad_g(n);
  Vec grad(n);
  double distance = 0.0;
  for (int it = 0; it <= options_.max_iterations; ++it) {
    base_->cost().gradient(y, grad_g);
    grad = hx - grad_g - beta_ * (log_y.array() + 1.0).matrix();
    distance = (grad.maxCoeff() - grad.minCoeff()) / (2.0 * modulus);
    if (distance <= options_.tolerance) {
      result.y = std::move(y);
      result.iterations = it;
      result.certified_distance = distance;
      return result;
    }
    log_y += eta * grad;
    const double top = log_y.maxCoeff();
    const double log_norm = top + std::log((log_y.array() - top).exp().sum());
    log_y.array() -= log_norm;
    y = log_y.array().exp();
  }
  throw SolverError("mirror ascent exceeded " + std::to_string(options_.max_iterations) +
                        " iterations; certified distance " + std::to_string(distance),
                    distance);
}

InnerResult SmoothedPotential::inner_solve(ConstVecRef x) const {
  require_finite(x, "x");
  Vec hx(static_cast<Eigen::Index>(base_->dual_dim()));
  base_->coupling(x, hx);
  if (use_closed_form()) {
    InnerResult r;
    r.y.resize(hx.size());
    softmax_argmax(hx, r.y);
    return r;
  }
  return mirror_ascent(hx);
}

Vec SmoothedPotential::inner_argmax(ConstVecRef x) const { return inner_solve(x).y; }

double SmoothedPotential::inner_value(ConstVecRef hx, ConstVecRef y) const {
  if (const Vec* b = base_->cost().affine_offset(); b != nullptr && use_closed_form()) {
    // max_y <c, y> - beta l(y) = max c + beta (log sum exp((c - max c)/beta) - log n);
    // written this way the envelope 0 <= s - s_beta <= beta log n holds to rounding.
    const Vec c = hx - *b;
    const double top = c.maxCoeff();
    const double sum = ((c.array() - top) / beta_).exp().sum();
    return top + beta_ * (std::log(sum) - std::log(static_cast<double>(c.size())));
  }
  return hx.dot(y) - base_->cost().value(y) - beta_ * base_->prox().value(y);
}

double SmoothedPotential::value_and_gradient(ConstVecRef x, VecRef out) const {
  const auto n = static_cast<Eigen::Index>(base_->dual_dim());
  Scratch& s = scratch(n, static_cast<Eigen::Index>(dim()));
  base_->coupling(x, s.hx);
  if (use_closed_form()) {
    softmax_argmax(s.hx, s.y);
  } else {
    s.y = mirror_ascent(s.hx).y;
  }
  base_->smooth_part_gradient(x, out);
  base_->coupling_transpose_apply(x, s.y, s.tmp);
  out += s.tmp;
  return base_->smooth_part(x) + inner_value(s.hx, s.y);
}

void SmoothedPotential::gradient(ConstVecRef x, VecRef out) const {
  const auto n = static_cast<Eigen::Index>(base_->dual_dim());
  Scratch& s = scratch(n, static_cast<Eigen::Index>(dim()));
  base_->coupling(x, s.hx);
  if (use_closed_form()) {
    softmax_argmax(s.hx, s.y);
  } else {
    s.y = mirror_ascent(s.hx).y;
  }
  base_->smooth_part_gradient(x, out);
  base_->coupling_transpose_apply(x, s.y, s.tmp);
  out += s.tmp;
}

double SmoothedPotential::value(ConstVecRef x) const {
  require_finite(x, "x");
  const auto n = static_cast<Eigen::Index>(base_->dual_dim());
  Scratch& s = scratch(n, static_cast<Eigen::Index>(dim()));
  base_->coupling(x, s.hx);
  if (use_closed_form()) {
    softmax_argmax(s.hx, s.y);
  } else {
    s.y = mirror_ascent(s.hx).y;
  }
  return base_->smooth_part(x) + inner_value(s.hx, s.y);
}

bool near_kink(const SmoothedPotential& potential, ConstVecRef x) {
  if (potential.beta() > 1e-3) return false;
  const Vec y = potential.inner_argmax(x);
  if (y.size() < 2) return false;
  double first = -1.0, second = -1.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] > first) {
      second = first;
      first = y[j];
    } else if (y[j] > second) {
      second = y[j];
    }
  }
  return first - second <= 1e-3;
}

}  // namespace nsmooth
