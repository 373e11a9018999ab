#include "nsmooth/ensemble.hpp"

#include <exception>


namespace nsmooth {

Ensemble::Ensemble(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                   std::size_t chains, std::uint64_t first_stream)
    : target_(target), cfg_(cfg), params_(resolve_params(kind, cfg)), first_stream_(first_stream) {
  states_.reserve(chains);
  for (std::size_t i = 0; i < chains; ++i)
    states_.push_back(initial_state(target_, cfg_, params_, first_stream_ + i));
}

void Ensemble::advance(std::uint64_t steps, Execution execution) {
  const auto n = static_cast<std::ptrdiff_t>(states_.size());
  if (execution == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      RandomStream rng(cfg_.seed, first_stream_ + static_cast<std::uint64_t>(i));
      advance_chain(target_, params_, states_[static_cast<std::size_t>(i)], rng, steps);
    }
    return;
  }

  std::vector<std::exception_ptr> errors(states_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      RandomStream rng(cfg_.seed, first_stream_ + static_cast<std::uint64_t>(i));
      advance_chain(target_, params_, states_[static_cast<std::size_t>(i)], rng, steps);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> Ensemble::coordinate(Eigen::Index index) const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.x[index]);
  return out;
}

std::uint64_t Ensemble::gradient_evaluations() const {
  std::uint64_t total = 0;
  for (const auto& s : states_) total += s.gradient_evaluations;
  return total;
}

}  // namespace nsmooth
