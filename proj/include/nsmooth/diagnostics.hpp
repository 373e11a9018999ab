#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsmooth/ensemble.hpp"

namespace nsmooth {

/// Sample quantile with linear interpolation between order statistics
/// (position (n - 1) * level), the convention of numpy.quantile's default.
double sample_quantile(std::span<const double> values, double level);
std::vector<double> sample_quantiles(std::span<const double> values, std::span<const double> levels);

/// Mixing is declared at the first checkpoint where every level's sample
/// quantile of coordinate `coordinate` lies within `tolerance` of `reference`.
struct QuantileCriterion {
  std::vector<double> levels{0.25, 0.5, 0.75};
  Eigen::Index coordinate = 0;
  std::vector<double> reference;
  double tolerance = 0.02;
  /// Number of parallel chains whose states form each sample.
  std::size_t samples = 5000;

  void validate() const;
};

/// Quantiles pooled from a long ensemble run: `chains` chains run for
/// `steps` iterations, pooling coordinate values every `pool_every`
/// iterations over the second half of the run. Streams start at a fixed
/// offset so reference and test chains never share noise.
struct ReferenceRun {
  std::size_t chains = 200;
  std::uint64_t steps = 50000;
  std::uint64_t pool_every = 10;
};

std::vector<double> reference_quantiles(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                                        std::span<const double> levels, Eigen::Index coordinate,
                                        const ReferenceRun& run, Execution execution = Execution::Parallel);

struct MixingResult {
  bool converged = false;
  /// First checkpoint meeting the criterion, or the last checkpoint examined.
  std::uint64_t iterations = 0;
  /// |sample quantile - reference| per level at that checkpoint.
  std::vector<double> errors;
  std::uint64_t gradient_evaluations = 0;
};

/// Runs `criterion.samples` chains, checking at k = 0, check_every, ... up to max_iterations.
MixingResult quantile_mixing_time(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                                  const QuantileCriterion& criterion, std::uint64_t max_iterations,
                                  std::uint64_t check_every, Execution execution = Execution::Parallel);

/// Empirical mean and per-coordinate variance of a set of points.
struct Moments {
  Vec mean;
  Vec variance;
};
Moments sample_moments(std::span<const Vec> points);

}  // namespace nsmooth
