#include "nsmooth/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

constexpr std::uint64_t kReferenceStreamOffset = 1ull << 40;

std::vector<double> quantile_errors(std::span<const double> values, const QuantileCriterion& c) {
  const auto q = sample_quantiles(values, c.levels);
  std::vector<double> errors(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) errors[i] = std::abs(q[i] - c.reference[i]);
  return errors;
}

}  // namespace

double sample_quantile(std::span<const double> values, double level) {
  const double levels[] = {level};
  return sample_quantiles(values, levels).front();
}

std::vector<double> sample_quantiles(std::span<const double> values, std::span<const double> levels) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(levels.size());
  for (double level : levels) {
    if (!(level >= 0.0 && level <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return out;
}

void QuantileCriterion::validate() const {
  if (levels.empty()) throw InvalidInput("quantile criterion needs at least one level");
  for (double l : levels)
    if (!(l > 0.0 && l < 1.0)) throw InvalidInput("quantile levels must lie strictly inside (0, 1)");
  if (reference.size() != levels.size()) throw InvalidInput("reference quantiles do not match the levels");
  if (!(tolerance > 0.0)) throw InvalidInput("quantile tolerance must be positive");
  if (samples < 2) throw InvalidInput("quantile criterion needs at least two samples per check");
}

std::vector<double> reference_quantiles(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                                        std::span<const double> levels, Eigen::Index coordinate,
                                        const ReferenceRun& run, Execution execution) {
  if (run.chains == 0 || run.steps == 0 || run.pool_every == 0)
    throw InvalidInput("reference run needs chains, steps and a pooling stride");
  Ensemble ensemble(kind, target, cfg, run.chains, kReferenceStreamOffset);
  const std::uint64_t burn = run.steps / 2;
  ensemble.advance(burn, execution);
  std::vector<double> pooled;
  pooled.reserve(run.chains * static_cast<std::size_t>((run.steps - burn) / run.pool_every + 1));
  while (ensemble.step() < run.steps) {
    ensemble.advance(std::min(run.pool_every, run.steps - ensemble.step()), execution);
    const auto values = ensemble.coordinate(coordinate);
    pooled.insert(pooled.end(), values.begin(), values.end());
  }
  return sample_quantiles(pooled, levels);
}

MixingResult quantile_mixing_time(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                                  const QuantileCriterion& criterion, std::uint64_t max_iterations,
                                  std::uint64_t check_every, Execution execution) {
  criterion.validate();
  if (check_every == 0) throw InvalidInput("checkpoint stride must be positive");
  Ensemble ensemble(kind, target, cfg, criterion.samples);
  MixingResult result;
  while (true) {
    result.errors = quantile_errors(ensemble.coordinate(criterion.coordinate), criterion);
    result.iterations = ensemble.step();
    result.gradient_evaluations = ensemble.gradient_evaluations();
    const bool within = std::all_of(result.errors.begin(), result.errors.end(),
                                    [&](double e) { return e <= criterion.tolerance; });
    if (within) {
      result.converged = true;
      return result;
    }
    if (ensemble.step() >= max_iterations) return result;
    ensemble.advance(std::min(check_every, max_iterations - ensemble.step()), execution);
  }
}

Moments sample_moments(std::span<const Vec> points) {
  if (points.empty()) throw InvalidInput("moments of an empty sample");
  const Eigen::Index d = points.front().size();
  Moments m{Vec::Zero(d), Vec::Zero(d)};
  for (const Vec& p : points) m.mean += p;
  m.mean /= static_cast<double>(points.size());
  for (const Vec& p : points) m.variance.array() += (p - m.mean).array().square();
  m.variance /= static_cast<double>(std::max<std::size_t>(points.size() - 1, 1));
  return m;
}

}  // namespace nsmooth
