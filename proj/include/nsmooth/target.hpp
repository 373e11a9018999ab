#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "nsmooth/types.hpp"

namespace nsmooth {

/// Smooth potential V with target density exp(-V). Implementations must be
/// safe to call concurrently.
class SmoothTarget {
 public:
  virtual ~SmoothTarget() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(ConstVecRef x) const = 0;
  virtual void gradient(ConstVecRef x, VecRef out) const = 0;
  /// Gradient-Lipschitz constant when known.
  virtual std::optional<double> smoothness() const { return std::nullopt; }
};

/// V(x) = |x - mean|^2 / (2 variance).
class IsotropicGaussianTarget final : public SmoothTarget {
 public:
  IsotropicGaussianTarget(Vec mean, double variance);
  explicit IsotropicGaussianTarget(std::size_t dim, double variance = 1.0)
      : IsotropicGaussianTarget(Vec::Zero(static_cast<Eigen::Index>(dim)), variance) {}

  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
  double value(ConstVecRef x) const override { return 0.5 * (x - mean_).squaredNorm() / variance_; }
  void gradient(ConstVecRef x, VecRef out) const override { out = (x - mean_) / variance_; }
  std::optional<double> smoothness() const override { return 1.0 / variance_; }

 private:
  Vec mean_;
  double variance_;
};

inline IsotropicGaussianTarget::IsotropicGaussianTarget(Vec mean, double variance)
    : mean_(std::move(mean)), variance_(variance) {}

/// Forwards to another target and counts gradient calls.
class CountingTarget final : public SmoothTarget {
 public:
  explicit CountingTarget(const SmoothTarget& inner) : inner_(inner) {}

  std::size_t dim() const override { return inner_.dim(); }
  double value(ConstVecRef x) const override { return inner_.value(x); }
  void gradient(ConstVecRef x, VecRef out) const override {
    gradient_calls_.fetch_add(1, std::memory_order_relaxed);
    inner_.gradient(x, out);
  }
  std::optional<double> smoothness() const override { return inner_.smoothness(); }

  std::uint64_t gradient_calls() const { return gradient_calls_.load(); }

 private:
  const SmoothTarget& inner_;
  mutable std::atomic<std::uint64_t> gradient_calls_{0};
};

}  // namespace nsmooth
