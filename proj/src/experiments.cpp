#include "nsmooth/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "nsmooth/bounds.hpp"
#include "nsmooth/diagnostics.hpp"
#include "nsmooth/ensemble.hpp"
#include "nsmooth/errors.hpp"
#include "nsmooth/piecewise_affine.hpp"
#include "nsmooth/rng.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEnvelopeStream = 0xe7e1;
constexpr std::uint64_t kTestNoiseStream = 0x7e57;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Two-sided 97.5% Student t quantiles for df = 1..10; normal beyond.
double t_quantile(std::size_t df) {
  static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
  return df >= 1 && df <= 10 ? table[df - 1] : 1.96;
}

std::shared_ptr<PiecewiseAffinePotential> synthetic_potential(const ExperimentConfig& cfg, std::size_t d,
                                                              std::uint64_t seed) {
  return PiecewiseAffinePotential::random_normalized(d, cfg.dual_dim / 2, cfg.scaling.row_norm, seed);
}

double synthetic_beta(const ExperimentConfig& cfg) {
  return select_beta(BetaMode::W2StronglyConvex, cfg.epsilon, std::log(static_cast<double>(cfg.dual_dim)), 2.0);
}

void merge_checked(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw InvalidInput("config section '" + where + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    if (!base.contains(key)) throw InvalidInput("unknown config key '" + where + key + "'");
    if (base[key].is_object())
      merge_checked(base[key], value, where + key + ".");
    else
      base[key] = value;
  }
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (dims.empty()) throw InvalidInput("dimension list is empty");
  for (std::size_t d : dims)
    if (d < 1) throw InvalidInput("dimensions must be >= 1");
  if (repeats < 1) throw InvalidInput("repeats must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("epsilon must be positive");
  if (dual_dim < 2 || dual_dim % 2 != 0) throw InvalidInput("dual dimension must be even and >= 2");
  if (!(step_size > 0.0)) throw InvalidInput("step size must be positive");
  if (!(friction > 0.0) || !(velocity_scale > 0.0)) throw InvalidInput("friction and velocity scale must be positive");
  if (!(scaling.row_norm > 0.0)) throw InvalidInput("row norm must be positive");
  if (scaling.chains < 1000) throw InvalidInput("quantile criterion needs >= 1000 chains");
  if (!(scaling.quantile_tolerance > 0.0)) throw InvalidInput("quantile tolerance must be positive");
  if (scaling.check_every < 1 || scaling.pool_every < 1) throw InvalidInput("check and pool intervals must be >= 1");
  if (scaling.reference_steps < 10 * scaling.max_iterations)
    throw InvalidInput("reference run must be at least 10x the largest iteration count");
  const auto& lo = logistic;
  if (lo.noise_levels.empty()) throw InvalidInput("worst-case noise levels are empty");
  if (!std::is_sorted(lo.noise_levels.begin(), lo.noise_levels.end()) ||
      !std::is_sorted(lo.test_noise_levels.begin(), lo.test_noise_levels.end()))
    throw InvalidInput("noise levels must be nondecreasing");
  for (double v : lo.noise_levels)
    if (!(v >= 0.0)) throw InvalidInput("noise levels must be >= 0");
  for (double v : lo.test_noise_levels)
    if (!(v >= 0.0)) throw InvalidInput("test noise levels must be >= 0");
  if (lo.posterior_samples < 1 || lo.chains < 1 || lo.thin < 1) throw InvalidInput("posterior sampling sizes must be >= 1");
  if (!(lo.step_size > 0.0)) throw InvalidInput("logistic step size must be positive");
  if (!(lo.train_fraction > 0.0 && lo.train_fraction < 1.0)) throw InvalidInput("train fraction must lie in (0, 1)");
  if (trace.dim < 1 || trace.runs < 1) throw InvalidInput("trace dimension and runs must be >= 1");
  if (!(bounds.strong_convexity > 0.0) || !(bounds.initial_w2 > 0.0)) throw InvalidInput("bound inputs must be positive");
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out(repeats);
  for (std::size_t i = 0; i < repeats; ++i) out[i] = seed + i;
  return out;
}

SamplerConfig ExperimentConfig::sampler_config(std::uint64_t run_seed) const {
  SamplerConfig s;
  s.step_size = step_size;
  s.friction = friction;
  s.velocity_scale = velocity_scale;
  s.seed = run_seed;
  return s;
}

json to_json(const ExperimentConfig& c) {
  return json{
      {"dims", c.dims},
      {"seed", c.seed},
      {"repeats", c.repeats},
      {"epsilon", c.epsilon},
      {"dual_dim", c.dual_dim},
      {"step_size", c.step_size},
      {"sampler", to_string(c.sampler)},
      {"friction", c.friction},
      {"velocity_scale", c.velocity_scale},
      {"scaling",
       {{"row_norm", c.scaling.row_norm},
        {"chains", c.scaling.chains},
        {"quantile_tolerance", c.scaling.quantile_tolerance},
        {"reference_chains", c.scaling.reference_chains},
        {"reference_steps", c.scaling.reference_steps},
        {"pool_every", c.scaling.pool_every},
        {"max_iterations", c.scaling.max_iterations},
        {"check_every", c.scaling.check_every},
        {"initial_value", c.scaling.initial_value}}},
      {"logistic",
       {{"dataset", c.logistic.dataset},
        {"synthetic_points", c.logistic.synthetic_points},
        {"synthetic_features", c.logistic.synthetic_features},
        {"noise_levels", c.logistic.noise_levels},
        {"test_noise_levels", c.logistic.test_noise_levels},
        {"posterior_samples", c.logistic.posterior_samples},
        {"chains", c.logistic.chains},
        {"burn_in", c.logistic.burn_in},
        {"thin", c.logistic.thin},
        {"step_size", c.logistic.step_size},
        {"train_fraction", c.logistic.train_fraction},
        {"perturbation_seed", c.logistic.perturbation_seed}}},
      {"trace",
       {{"dim", c.trace.dim},
        {"runs", c.trace.runs},
        {"steps", c.trace.steps},
        {"initial_value", c.trace.initial_value}}},
      {"bounds", {{"strong_convexity", c.bounds.strong_convexity}, {"initial_w2", c.bounds.initial_w2}}},
  };
}

ExperimentConfig config_from_json(const json& patch) {
  json j = to_json(ExperimentConfig{});
  merge_checked(j, patch, "");
  ExperimentConfig c;
  try {
    j.at("dims").get_to(c.dims);
    j.at("seed").get_to(c.seed);
    j.at("repeats").get_to(c.repeats);
    j.at("epsilon").get_to(c.epsilon);
    j.at("dual_dim").get_to(c.dual_dim);
    j.at("step_size").get_to(c.step_size);
    c.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
    j.at("friction").get_to(c.friction);
    j.at("velocity_scale").get_to(c.velocity_scale);
    const json& s = j.at("scaling");
    s.at("row_norm").get_to(c.scaling.row_norm);
    s.at("chains").get_to(c.scaling.chains);
    s.at("quantile_tolerance").get_to(c.scaling.quantile_tolerance);
    s.at("reference_chains").get_to(c.scaling.reference_chains);
    s.at("reference_steps").get_to(c.scaling.reference_steps);
    s.at("pool_every").get_to(c.scaling.pool_every);
    s.at("max_iterations").get_to(c.scaling.max_iterations);
    s.at("check_every").get_to(c.scaling.check_every);
    s.at("initial_value").get_to(c.scaling.initial_value);
    const json& l = j.at("logistic");
    l.at("dataset").get_to(c.logistic.dataset);
    l.at("synthetic_points").get_to(c.logistic.synthetic_points);
    l.at("synthetic_features").get_to(c.logistic.synthetic_features);
    l.at("noise_levels").get_to(c.logistic.noise_levels);
    l.at("test_noise_levels").get_to(c.logistic.test_noise_levels);
    l.at("posterior_samples").get_to(c.logistic.posterior_samples);
    l.at("chains").get_to(c.logistic.chains);
    l.at("burn_in").get_to(c.logistic.burn_in);
    l.at("thin").get_to(c.logistic.thin);
    l.at("step_size").get_to(c.logistic.step_size);
    l.at("train_fraction").get_to(c.logistic.train_fraction);
    l.at("perturbation_seed").get_to(c.logistic.perturbation_seed);
    const json& t = j.at("trace");
    t.at("dim").get_to(c.trace.dim);
    t.at("runs").get_to(c.trace.runs);
    t.at("steps").get_to(c.trace.steps);
    t.at("initial_value").get_to(c.trace.initial_value);
    const json& b = j.at("bounds");
    b.at("strong_convexity").get_to(c.bounds.strong_convexity);
    b.at("initial_w2").get_to(c.bounds.initial_w2);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

// ---------------------------------------------------------- certificates

json to_json(const Certificate& c) {
  return json{{"metric", c.metric}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}};
}

json to_json(std::span<const Certificate> certificates) {
  json arr = json::array();
  for (const auto& c : certificates) arr.push_back(to_json(c));
  return arr;
}

bool all_pass(std::span<const Certificate> certificates) {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.pass; });
}

Certificate envelope_certificate(const SmoothedPotential& s, std::size_t points, std::uint64_t seed) {
  const auto& base = s.base();
  const double bound = s.beta() * base.prox().diameter();
  RandomStream rng(seed, kEnvelopeStream);
  Vec x(static_cast<Eigen::Index>(base.dim()));
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t t = 0; t < points; ++t) {
    rng.seek(t);
    rng.fill_normal(x);
    x *= 2.0;
    const double gap = base.value(x) - s.value(x);
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
  }
  Certificate c;
  c.metric = "envelope_gap_d" + std::to_string(base.dim());
  c.value = hi;
  c.bound = bound;
  c.pass = lo >= -1e-10 && hi <= bound + 1e-10;
  return c;
}

// --------------------------------------------------------------- scaling

ScalingFit fit_scaling_exponent(std::span<const ScalingRecord> records) {
  ScalingFit fit;
  std::vector<const ScalingRecord*> used;
  for (const auto& r : records) {
    if (r.censored) {
      ++fit.censored;
    } else if (r.d < 2 || r.iterations == 0) {
      ++fit.excluded;
    } else {
      used.push_back(&r);
    }
  }
  fit.used = used.size();

  auto regress = [](const std::vector<const ScalingRecord*>& pts, double& slope, double& intercept) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto* r : pts) {
      const double ld = std::log(static_cast<double>(r->d));
      const double x = ld;
      const double y = std::log(static_cast<double>(r->iterations) / ld);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (pts.size() < 2 || den <= 1e-12 * std::max(1.0, n * sxx)) return false;
    slope = (n * sxy - sx * sy) / den;
    intercept = (sy - slope * sx) / n;
    return true;
  };

  fit.valid = regress(used, fit.slope, fit.intercept);
  if (!fit.valid) return fit;

  std::vector<std::uint64_t> seeds;
  for (const auto* r : used)
    if (std::find(seeds.begin(), seeds.end(), r->seed) == seeds.end()) seeds.push_back(r->seed);
  for (std::uint64_t s : seeds) {
    std::vector<const ScalingRecord*> mine;
    for (const auto* r : used)
      if (r->seed == s) mine.push_back(r);
    double slope = 0, intercept = 0;
    if (regress(mine, slope, intercept)) fit.seed_slopes.push_back(slope);
  }
  fit.ci_low = fit.ci_high = fit.slope;
  const std::size_t k = fit.seed_slopes.size();
  if (k >= 2) {
    double mean = 0.0;
    for (double s : fit.seed_slopes) mean += s;
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (double s : fit.seed_slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(k - 1);
    const double half = t_quantile(k - 1) * std::sqrt(var / static_cast<double>(k));
    fit.ci_low = fit.slope - half;
    fit.ci_high = fit.slope + half;
  }
  return fit;
}

json to_json(const ScalingFit& f) {
  return json{{"slope", f.slope},       {"intercept", f.intercept},     {"ci_low", f.ci_low},
              {"ci_high", f.ci_high},   {"seed_slopes", f.seed_slopes}, {"used", f.used},
              {"censored", f.censored}, {"excluded", f.excluded},       {"valid", f.valid}};
}

ScalingResult run_synthetic_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  ScalingResult result;
  const double beta = synthetic_beta(cfg);
  const std::vector<double> levels{0.25, 0.5, 0.75};
  const auto& opt = cfg.scaling;

  for (std::size_t d : cfg.dims) {
    for (std::uint64_t seed : cfg.seeds()) {
      const auto potential = synthetic_potential(cfg, d, seed);
      const SmoothedPotential s(potential, beta);
      SamplerConfig sc = cfg.sampler_config(seed);
      sc.initial_point = Vec::Constant(static_cast<Eigen::Index>(d), opt.initial_value);

      ReferenceRun run;
      run.chains = opt.reference_chains;
      run.steps = opt.reference_steps;
      run.pool_every = opt.pool_every;
      QuantileCriterion crit;
      crit.levels = levels;
      crit.reference = reference_quantiles(cfg.sampler, s, sc, levels, 0, run);
      crit.tolerance = opt.quantile_tolerance;
      crit.samples = opt.chains;
      const MixingResult m =
          quantile_mixing_time(cfg.sampler, s, sc, crit, opt.max_iterations, opt.check_every);

      ScalingRecord r;
      r.d = d;
      r.seed = seed;
      r.iterations = m.iterations;
      r.censored = !m.converged;
      r.quantile_errors = m.errors;
      r.beta = beta;
      r.smoothness = s.smoothness_constant();
      r.gradient_evaluations = m.gradient_evaluations;
      r.range_ok = cfg.epsilon < 2.0 * std::sqrt(static_cast<double>(d) / 2.0);
      result.records.push_back(std::move(r));

      if (seed == cfg.seed) result.certificates.push_back(envelope_certificate(s, 1000, seed));
    }
  }

  result.fit = fit_scaling_exponent(result.records);
  if (result.fit.censored > 0)
    result.warnings.push_back(std::to_string(result.fit.censored) +
                              " censored run(s) excluded from the exponent fit");
  if (result.fit.excluded > 0)
    result.warnings.push_back(std::to_string(result.fit.excluded) +
                              " run(s) with d < 2 or zero iterations excluded from the log-log fit");
  if (!result.fit.valid) result.warnings.push_back("exponent fit needs at least two distinct dimensions");

  std::size_t range_bad = 0;
  for (const auto& r : result.records) range_bad += r.range_ok ? 0 : 1;
  result.certificates.push_back({"eps_range_violations", static_cast<double>(range_bad), 0.0, range_bad == 0});
  return result;
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRecord> records, const std::string& hash) {
  out << "d,seed,iters,censored,err_q25,err_q50,err_q75,beta,L_smooth,grad_evals,range_ok,config_hash\n";
  for (const auto& r : records) {
    out << r.d << ',' << r.seed << ',' << r.iterations << ',' << (r.censored ? 1 : 0);
    for (std::size_t i = 0; i < 3; ++i) out << ',' << (i < r.quantile_errors.size() ? fmt(r.quantile_errors[i]) : "");
    out << ',' << fmt(r.beta) << ',' << fmt(r.smoothness) << ',' << r.gradient_evaluations << ','
        << (r.range_ok ? 1 : 0) << ',' << hash << '\n';
  }
}

// -------------------------------------------------------------- logistic

double predictive_probability(std::span<const Vec> draws, ConstVecRef feature, double label) {
  if (draws.empty()) throw InvalidInput("no posterior draws");
  const Eigen::Index p = feature.size();
  double acc = 0.0;
  for (const Vec& x : draws) {
    if (x.size() != p + 1) throw InvalidInput("draw dimension does not match feature dimension + 1");
    acc += stable_sigmoid(label * x.head(p).dot(feature));
  }
  return acc / static_cast<double>(draws.size());
}

namespace {

struct Metrics {
  double accuracy = 0.0;
  double loglik = 0.0;
};

Metrics predictive_metrics(std::span<const Vec> draws, const Mat& features, const Vec& labels) {
  Metrics m;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double p = predictive_probability(draws, features.row(i).transpose(), labels[i]);
    m.accuracy += p > 0.5 ? 1.0 : 0.0;
    m.loglik += std::log(std::max(p, 1e-300));
  }
  const double n = static_cast<double>(features.rows());
  m.accuracy /= n;
  m.loglik /= n;
  return m;
}

struct Posterior {
  std::vector<std::vector<Vec>> by_chain;
  std::vector<Vec> pooled;
  std::size_t excluded = 0;
};

Posterior sample_posterior(const SmoothedPotential& s, const ExperimentConfig& cfg) {
  const auto& opt = cfg.logistic;
  SamplerConfig sc = cfg.sampler_config(cfg.seed);
  sc.step_size = opt.step_size;
  Ensemble e(cfg.sampler, s, sc, opt.chains);
  e.advance(opt.burn_in);
  Posterior post;
  post.by_chain.resize(opt.chains);
  const std::size_t rounds = (opt.posterior_samples + opt.chains - 1) / opt.chains;
  std::size_t taken = 0;
  for (std::size_t r = 0; r < rounds && taken < opt.posterior_samples; ++r) {
    e.advance(opt.thin);
    for (std::size_t c = 0; c < opt.chains && taken < opt.posterior_samples; ++c, ++taken) {
      const Vec& x = e.states()[c].x;
      if (!x.allFinite()) {
        ++post.excluded;
        continue;
      }
      post.by_chain[c].push_back(x);
      post.pooled.push_back(x);
    }
  }
  return post;
}

Mat perturb_test_features(const Mat& features, const Vec& sd, double level, std::size_t level_index,
                          std::uint64_t seed) {
  Mat z = features;
  if (level == 0.0) return z;
  RandomStream rng(seed, kTestNoiseStream);
  Vec noise(features.cols());
  for (Eigen::Index k = 0; k < z.rows(); ++k) {
    rng.seek((static_cast<std::uint64_t>(level_index) << 32) + static_cast<std::uint64_t>(k));
    rng.fill_normal(noise);
    z.row(k) += level * sd.cwiseProduct(noise).transpose();
  }
  return z;
}

}  // namespace

LogisticResult run_robust_logistic(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& opt = cfg.logistic;
  const Dataset data = opt.dataset.empty()
                           ? synthetic_separable_dataset(opt.synthetic_points, opt.synthetic_features, cfg.seed)
                           : load_dataset_csv(opt.dataset);
  const auto [train, test] = train_test_split(data, opt.train_fraction, cfg.seed);
  if (test.size() == 0) throw InvalidInput("test split is empty");

  LogisticResult result;
  auto nominal = std::make_shared<RobustLogisticPotential>(train, std::vector<double>{0.0}, opt.perturbation_seed);
  auto worst = std::make_shared<RobustLogisticPotential>(train, opt.noise_levels, opt.perturbation_seed);
  const double diameter = std::log(static_cast<double>(opt.noise_levels.size()));
  // a single copy has D = 0 and s_beta = s for every beta
  result.beta = diameter > 0.0 ? select_beta(BetaMode::TV, cfg.epsilon, diameter) : 1.0;
  const SmoothedPotential s_nom(nominal, 1.0);
  const SmoothedPotential s_wc(worst, result.beta);

  Vec sd(train.feature_dim());
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    const auto col = train.features.col(j).array();
    sd[j] = std::sqrt((col - col.mean()).square().sum() / std::max<double>(1.0, double(train.size() - 1)));
  }

  const std::pair<const char*, const SmoothedPotential*> posteriors[] = {{"nom", &s_nom}, {"wc", &s_wc}};
  std::vector<Posterior> samples;
  for (const auto& [name, s] : posteriors) {
    samples.push_back(sample_posterior(*s, cfg));
    if (samples.back().excluded > 0)
      result.warnings.push_back(std::to_string(samples.back().excluded) + " non-finite " + name + " draws excluded");
  }

  for (std::size_t li = 0; li < opt.test_noise_levels.size(); ++li) {
    const double level = opt.test_noise_levels[li];
    const Mat z = perturb_test_features(test.features, sd, level, li, opt.perturbation_seed);
    for (std::size_t pi = 0; pi < 2; ++pi) {
      const Posterior& post = samples[pi];
      LogisticRecord r;
      r.noise_level = level;
      r.posterior = posteriors[pi].first;
      r.draws = post.pooled.size();
      r.excluded = post.excluded;
      if (post.pooled.empty()) throw SolverError("no finite posterior draws", 0.0);
      const Metrics all = predictive_metrics(post.pooled, z, test.labels);
      r.accuracy = all.accuracy;
      r.loglik = all.loglik;
      std::vector<Metrics> batches;
      for (const auto& chain : post.by_chain)
        if (!chain.empty()) batches.push_back(predictive_metrics(chain, z, test.labels));
      if (batches.size() >= 2) {
        double ma = 0, ml = 0;
        for (const auto& b : batches) {
          ma += b.accuracy;
          ml += b.loglik;
        }
        const double k = static_cast<double>(batches.size());
        ma /= k;
        ml /= k;
        double va = 0, vl = 0;
        for (const auto& b : batches) {
          va += (b.accuracy - ma) * (b.accuracy - ma);
          vl += (b.loglik - ml) * (b.loglik - ml);
        }
        r.accuracy_se = std::sqrt(va / (k - 1) / k);
        r.loglik_se = std::sqrt(vl / (k - 1) / k);
      }
      result.records.push_back(std::move(r));
    }
  }

  bool in_range = true, finite = true;
  for (const auto& r : result.records) {
    in_range = in_range && r.accuracy >= 0.0 && r.accuracy <= 1.0;
    finite = finite && std::isfinite(r.loglik);
  }
  result.certificates.push_back({"accuracy_in_unit_interval", 0.0, 0.0, in_range});
  result.certificates.push_back({"loglik_finite", 0.0, 0.0, finite});
  Certificate env = envelope_certificate(s_wc, 200, cfg.seed);
  env.metric = "envelope_gap_wc";
  result.certificates.push_back(env);
  return result;
}

void write_logistic_csv(std::ostream& out, std::span<const LogisticRecord> records, const std::string& hash) {
  out << "noise_level,posterior,accuracy,loglik,accuracy_se,loglik_se,draws,excluded,config_hash\n";
  for (const auto& r : records)
    out << fmt(r.noise_level) << ',' << r.posterior << ',' << fmt(r.accuracy) << ',' << fmt(r.loglik) << ','
        << fmt(r.accuracy_se) << ',' << fmt(r.loglik_se) << ',' << r.draws << ',' << r.excluded << ',' << hash
        << '\n';
}

// ----------------------------------------------------------------- trace

TraceResult run_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  TraceResult result;
  const auto potential = synthetic_potential(cfg, cfg.trace.dim, cfg.seed);
  const SmoothedPotential s(potential, synthetic_beta(cfg));
  for (SamplerKind kind : {SamplerKind::Lmc, SamplerKind::KlmcRm}) {
    for (std::size_t run = 0; run < cfg.trace.runs; ++run) {
      SamplerConfig sc = cfg.sampler_config(cfg.seed + run);
      sc.iterations = cfg.trace.steps;
      sc.initial_point = Vec::Constant(static_cast<Eigen::Index>(cfg.trace.dim), cfg.trace.initial_value);
      const Chain c = run_sampler(kind, s, sc);
      for (std::size_t i = 0; i < c.iterates.size(); ++i)
        result.records.push_back({c.steps[i], run, c.iterates[i][0], kind});
    }
  }
  result.certificates.push_back(envelope_certificate(s, 1000, cfg.seed));
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records, const std::string& hash) {
  out << "k,run_id,x1,sampler,config_hash\n";
  for (const auto& r : records)
    out << r.k << ',' << r.run_id << ',' << fmt(r.x1) << ',' << to_string(r.sampler) << ',' << hash << '\n';
}

// ---------------------------------------------------------------- bounds

BoundResult emit_bound_report(const ExperimentConfig& cfg) {
  cfg.validate();
  BoundResult result;
  const double alpha = cfg.bounds.strong_convexity;
  json per_dim = json::array();
  for (std::size_t d : cfg.dims) {
    BoundInputs in;
    in.epsilon = cfg.epsilon;
    in.dim = d;
    in.diameter = std::log(static_cast<double>(cfg.dual_dim));
    in.smooth_lipschitz = 2.0;
    in.coupling_lipschitz = cfg.scaling.row_norm;
    in.coupling_smoothness = 0.0;
    in.strong_convexity = alpha;
    in.lsi_constant = 1.0 / alpha;
    in.initial_w2 = cfg.bounds.initial_w2;
    json cases = json::array();
    for (int k = 1; k <= 3; ++k) {
      const std::string tag = "d" + std::to_string(d) + "_case" + std::to_string(k);
      try {
        const BoundReport r = iteration_bound(k, in);
        cases.push_back(to_json(r));
        result.certificates.push_back(
            {"smoothing_error_" + tag, r.smoothing_error, cfg.epsilon / 2.0, r.smoothing_error <= cfg.epsilon / 2.0 * (1 + 1e-12)});
      } catch (const RangeError& e) {
        cases.push_back(json{{"case", k}, {"error", e.what()}});
        result.certificates.push_back({"range_" + tag, cfg.epsilon, 0.0, false});
      }
    }
    per_dim.push_back(json{{"d", d}, {"cases", cases}});
  }
  result.report = json{{"config_hash", config_hash(cfg)}, {"reports", per_dim}};
  return result;
}

}  // namespace nsmooth
