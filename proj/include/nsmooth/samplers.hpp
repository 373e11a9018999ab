#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "nsmooth/rng.hpp"
#include "nsmooth/target.hpp"

namespace nsmooth {

enum class SamplerKind {
  Lmc,     // unadjusted Langevin Monte Carlo
  KlmcRm,  // kinetic Langevin with randomized-midpoint gradient evaluation
};

SamplerKind parse_sampler_kind(std::string_view name);
std::string to_string(SamplerKind kind);

enum class InitialDistribution { PointMass, StandardGaussian };

struct SamplerConfig {
  double step_size = 0.1;
  std::size_t iterations = 1000;
  /// KLMC friction; the randomized-midpoint weights are exact OU integrals for it.
  double friction = 2.0;
  /// KLMC velocity scale u (dv = -c v dt - u grad V dt + sqrt(2 c u) dB).
  /// 1 / L recovers the L-normalized dynamics, whose time step shrinks like
  /// h / sqrt(L) at a fixed step size.
  double velocity_scale = 1.0;
  std::uint64_t seed = 0;
  /// Starting point for PointMass; empty means the origin.
  Vec initial_point;
  InitialDistribution initial = InitialDistribution::PointMass;
  /// Draw v_0 from N(0, u I) instead of starting at rest.
  bool stationary_initial_velocity = false;
  /// Turns off all Gaussian increments (deterministic drift only).
  bool inject_noise = true;
  /// Record every thin-th iterate (k = 0, thin, 2 thin, ...) plus the last; 0 records x_0 and the last only.
  std::size_t thin = 1;
  double divergence_radius = 1e8;
};

/// Auto step size for smoothed targets: min(0.1, 1 / (2 L)).
double auto_step_size(const SmoothTarget& target);

/// Position/velocity of one chain. `step` counts completed iterations.
struct ChainState {
  Vec x;
  Vec v;
  std::uint64_t step = 0;
  std::uint64_t gradient_evaluations = 0;
};

struct Chain {
  std::vector<std::uint64_t> steps;
  std::vector<Vec> iterates;
  ChainState final_state;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// x - step * gradient + sqrt(2 step) * noise
Vec lmc_step(ConstVecRef x, double step, ConstVecRef gradient, ConstVecRef noise);

/// Integration weights of one randomized-midpoint step for midpoint fraction
/// `fraction`, plus the Cholesky factor of the covariance of the three
/// Brownian integrals
///   W1 = int_0^{a h} (1 - e^{-c (a h - s)}) dB,  W2 = int_0^h (1 - e^{-c (h - s)}) dB,
///   W3 = int_0^h e^{-c (h - s)} dB.
struct MidpointWeights {
  double x_from_v_mid = 0.0;      // (1 - e^{-c a h}) / c
  double x_from_grad_mid = 0.0;   // u (a h - (1 - e^{-c a h}) / c) / c
  double x_from_v = 0.0;          // (1 - e^{-c h}) / c
  double x_from_grad = 0.0;       // u h (1 - e^{-c (h - a h)}) / c
  double v_decay = 0.0;           // e^{-c h}
  double v_from_grad = 0.0;       // u h e^{-c (h - a h)}
  double position_noise = 0.0;    // sqrt(2 c u) / c
  double velocity_noise = 0.0;    // sqrt(2 c u)
  std::array<double, 9> covariance{};  // row-major Cov(W1, W2, W3)
  std::array<double, 9> cholesky{};    // lower triangular, row-major
};

MidpointWeights midpoint_weights(double step, double friction, double velocity_scale, double fraction);

/// Resolved per-run parameters shared by the serial and parallel kernels.
struct KernelParams {
  SamplerKind kind = SamplerKind::Lmc;
  double step = 0.1;
  double friction = 2.0;
  double velocity_scale = 1.0;
  bool inject_noise = true;
  double divergence_radius = 1e8;
};

KernelParams resolve_params(SamplerKind kind, const SamplerConfig& cfg);

/// Initial state for stream `stream_id` (draws from step block 0).
ChainState initial_state(const SmoothTarget& target, const SamplerConfig& cfg, const KernelParams& params,
                         std::uint64_t stream_id);

/// Advances one chain by `steps` iterations; step k uses counter block k of
/// `rng`'s stream. Throws DivergenceError.
void advance_chain(const SmoothTarget& target, const KernelParams& params, ChainState& state,
                   RandomStream& rng, std::uint64_t steps);

/// Single chain run; stream id `stream_id` selects an independent stream under cfg.seed.
Chain run_sampler(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                  std::uint64_t stream_id = 0);

/// CSV with header k,x1..xd and one row per recorded iterate.
void write_chain_csv(std::ostream& out, const Chain& chain);

}  // namespace nsmooth
