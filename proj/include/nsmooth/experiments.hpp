#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsmooth/robust_logistic.hpp"
#include "nsmooth/samplers.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth {

/// Quantile-mixing protocol for the synthetic scaling experiment.
struct ScalingOptions {
  double row_norm = 4.0;
  std::size_t chains = 5000;
  double quantile_tolerance = 0.05;
  std::size_t reference_chains = 200;
  std::uint64_t reference_steps = 50000;
  std::uint64_t pool_every = 10;
  std::uint64_t max_iterations = 5000;
  std::uint64_t check_every = 5;
  double initial_value = 0.0;  // x0 = initial_value * ones
};

struct LogisticOptions {
  /// CSV dataset; empty selects the seeded synthetic generator.
  std::string dataset;
  std::size_t synthetic_points = 400;
  std::size_t synthetic_features = 5;
  /// Noise scales of the perturbed training copies forming the worst-case set.
  std::vector<double> noise_levels{0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<double> test_noise_levels{0.0, 0.25, 0.5, 1.0, 2.0};
  std::size_t posterior_samples = 5000;
  std::size_t chains = 50;
  std::uint64_t burn_in = 2000;
  std::uint64_t thin = 10;
  double step_size = 0.01;
  double train_fraction = 0.8;
  std::uint64_t perturbation_seed = 7;
};

struct TraceOptions {
  std::size_t dim = 17;
  std::size_t runs = 10;
  std::uint64_t steps = 2000;
  double initial_value = 3.0;
};

struct BoundOptions {
  double strong_convexity = 2.0;
  /// W2(mu_0, pi_beta) estimate fed to the log-concave calculator.
  double initial_w2 = 1.0;
};

struct ExperimentConfig {
  std::vector<std::size_t> dims{2, 4, 8, 16, 32, 64};
  std::uint64_t seed = 0;
  std::size_t repeats = 5;
  double epsilon = 0.1;
  std::size_t dual_dim = 10;  // n = 2m rows of the stacked synthetic map
  double step_size = 0.1;
  SamplerKind sampler = SamplerKind::KlmcRm;
  double friction = 2.0;
  double velocity_scale = 1.0;
  ScalingOptions scaling;
  LogisticOptions logistic;
  TraceOptions trace;
  BoundOptions bounds;

  void validate() const;
  /// Seeds seed, seed + 1, ..., one per repeat.
  std::vector<std::uint64_t> seeds() const;
  SamplerConfig sampler_config(std::uint64_t run_seed) const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// One property check, serialized as {metric, value, bound, pass}.
struct Certificate {
  std::string metric;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};
nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(std::span<const Certificate> certificates);
bool all_pass(std::span<const Certificate> certificates);

/// Largest and smallest s - s_beta over `points` Gaussian points of scale 2;
/// passes when the gap lies in [0, beta D] up to 1e-10.
Certificate envelope_certificate(const SmoothedPotential& s, std::size_t points, std::uint64_t seed);

struct ScalingRecord {
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  bool censored = false;
  std::vector<double> quantile_errors;
  double beta = 0.0;
  double smoothness = 0.0;
  std::uint64_t gradient_evaluations = 0;
  bool range_ok = true;  // eps < 2 sqrt(d / alpha)
};

/// Least squares of log(iterations / log d) on log d.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> seed_slopes;
  std::size_t used = 0;
  std::size_t censored = 0;
  std::size_t excluded = 0;  // d < 2 or zero iterations
  bool valid = false;        // needs two distinct dimensions
};

ScalingFit fit_scaling_exponent(std::span<const ScalingRecord> records);

struct ScalingResult {
  std::vector<ScalingRecord> records;
  ScalingFit fit;
  std::vector<Certificate> certificates;
  std::vector<std::string> warnings;
};

ScalingResult run_synthetic_scaling(const ExperimentConfig& cfg);
void write_scaling_csv(std::ostream& out, std::span<const ScalingRecord> records, const std::string& hash);
nlohmann::json to_json(const ScalingFit& fit);

struct LogisticRecord {
  double noise_level = 0.0;
  std::string posterior;  // "nom" or "wc"
  double accuracy = 0.0;
  double loglik = 0.0;
  double accuracy_se = 0.0;  // batch-means over chains
  double loglik_se = 0.0;
  std::size_t draws = 0;
  std::size_t excluded = 0;  // non-finite draws
};

struct LogisticResult {
  std::vector<LogisticRecord> records;
  std::vector<Certificate> certificates;
  std::vector<std::string> warnings;
  double beta = 0.0;
};

/// Mean over draws x = [w, log alpha] of sigmoid(label <w, feature>).
double predictive_probability(std::span<const Vec> draws, ConstVecRef feature, double label);

LogisticResult run_robust_logistic(const ExperimentConfig& cfg);
void write_logistic_csv(std::ostream& out, std::span<const LogisticRecord> records, const std::string& hash);

struct TraceRecord {
  std::uint64_t k = 0;
  std::size_t run_id = 0;
  double x1 = 0.0;
  SamplerKind sampler = SamplerKind::Lmc;
};

struct TraceResult {
  std::vector<TraceRecord> records;
  std::vector<Certificate> certificates;
};

/// First-coordinate trajectories of both samplers on the synthetic
/// potential of dimension trace.dim.
TraceResult run_trace(const ExperimentConfig& cfg);
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records, const std::string& hash);

struct BoundResult {
  nlohmann::json report;
  std::vector<Certificate> certificates;
};

/// Calculator output for the synthetic potential at every configured d.
BoundResult emit_bound_report(const ExperimentConfig& cfg);

}  // namespace nsmooth
