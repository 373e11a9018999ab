#pragma once

#include <cstdint>
#include <vector>

#include "nsmooth/samplers.hpp"

namespace nsmooth {

enum class Execution {
  Serial,    // reference loop, one chain after another
  Parallel,  // OpenMP loop over chains
};

/// Many independent chains of one sampler on one target. Chain i draws from
/// stream `first_stream + i` under the config seed, so the serial and parallel
/// kernels produce bit-identical states.
class Ensemble {
 public:
  Ensemble(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg, std::size_t chains,
           std::uint64_t first_stream = 0);

  /// Advances every chain by `steps` iterations. A DivergenceError from any
  /// chain is rethrown after the loop (the lowest chain index wins).
  void advance(std::uint64_t steps, Execution execution = Execution::Parallel);

  std::size_t size() const { return states_.size(); }
  std::uint64_t step() const { return states_.empty() ? 0 : states_.front().step; }
  const std::vector<ChainState>& states() const { return states_; }
  const KernelParams& params() const { return params_; }

  /// Coordinate `index` of every chain's current position.
  std::vector<double> coordinate(Eigen::Index index) const;
  std::uint64_t gradient_evaluations() const;

 private:
  const SmoothTarget& target_;
  SamplerConfig cfg_;
  KernelParams params_;
  std::uint64_t first_stream_;
  std::vector<ChainState> states_;
};

}  // namespace nsmooth
