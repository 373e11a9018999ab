#include "nsmooth/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

// 1 - e^{-x}
inline double one_minus_exp(double x) { return -std::expm1(-x); }

// int_0^x (1 - e^{-r})^2 dr
double squared_ou_integral(double x) {
  if (x < 1e-2) {
    const double x3 = x * x * x;
    return x3 / 3.0 - x3 * x / 4.0 + 7.0 * x3 * x * x / 60.0 - x3 * x3 / 24.0;
  }
  return x - 2.0 * one_minus_exp(x) + 0.5 * one_minus_exp(2.0 * x);
}

void check_state(const ChainState& s, std::uint64_t step, double radius) {
  const double norm = s.x.norm();
  if (!s.x.allFinite() || !(norm <= radius)) throw DivergenceError(step, norm);
}

}  // namespace

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "lmc") return SamplerKind::Lmc;
  if (name == "klmc-rm" || name == "klmc_rm") return SamplerKind::KlmcRm;
  throw InvalidInput("unknown sampler kind '" + std::string(name) + "' (expected lmc or klmc-rm)");
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Lmc:
      return "lmc";
    case SamplerKind::KlmcRm:
      return "klmc-rm";
  }
  return "unknown";
}

double auto_step_size(const SmoothTarget& target) {
  const auto l = target.smoothness();
  if (!l || !(*l > 0.0)) return 0.1;
  return std::min(0.1, 0.5 / *l);
}

Vec lmc_step(ConstVecRef x, double step, ConstVecRef gradient, ConstVecRef noise) {
  if (!(step > 0.0)) throw InvalidInput("step size must be positive");
  return x - step * gradient + std::sqrt(2.0 * step) * noise;
}

MidpointWeights midpoint_weights(double h, double c, double u, double fraction) {
  MidpointWeights w;
  const double a = fraction * h;
  const double ca = c * a;
  const double ch = c * h;
  const double rest = c * (h - a);

  w.x_from_v_mid = one_minus_exp(ca) / c;
  w.x_from_grad_mid = u * (ca - one_minus_exp(ca)) / (c * c);
  w.x_from_v = one_minus_exp(ch) / c;
  w.x_from_grad = u * h * one_minus_exp(rest) / c;
  w.v_decay = std::exp(-ch);
  w.v_from_grad = u * h * std::exp(-rest);
  w.velocity_noise = std::sqrt(2.0 * c * u);
  w.position_noise = w.velocity_noise / c;

  const double var1 = squared_ou_integral(ca) / c;
  const double var2 = squared_ou_integral(ch) / c;
  const double var3 = one_minus_exp(2.0 * ch) / (2.0 * c);
  const double e_rest = std::exp(-rest);           // e^{-c(h-a)}
  const double e_h = std::exp(-ch);                // e^{-c h}
  const double e_sum = std::exp(-c * (h + a));     // e^{-c(h+a)}
  const double cov13 = (e_rest - e_h) / c - (e_rest - e_sum) / (2.0 * c);
  const double cov12 = a - one_minus_exp(ca) / c - cov13;
  const double cov23 = one_minus_exp(ch) / c - one_minus_exp(2.0 * ch) / (2.0 * c);
  w.covariance = {var1, cov12, cov13, cov12, var2, cov23, cov13, cov23, var3};

  // Cholesky with clamping: W1 degenerates as the midpoint fraction -> 0.
  auto& l = w.cholesky;
  l.fill(0.0);
  const bool w1_degenerate = var1 <= 1e-14 * var2;
  l[0] = w1_degenerate ? 0.0 : std::sqrt(var1);
  l[3] = w1_degenerate ? 0.0 : cov12 / l[0];
  l[6] = w1_degenerate ? 0.0 : cov13 / l[0];
  l[4] = std::sqrt(std::max(var2 - l[3] * l[3], 0.0));
  l[7] = l[4] > 0.0 ? (cov23 - l[6] * l[3]) / l[4] : 0.0;
  l[8] = std::sqrt(std::max(var3 - l[6] * l[6] - l[7] * l[7], 0.0));
  return w;
}

KernelParams resolve_params(SamplerKind kind, const SamplerConfig& cfg) {
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size)) throw InvalidInput("step size must be positive");
  if (!(cfg.friction > 0.0)) throw InvalidInput("friction must be positive");
  KernelParams p;
  p.kind = kind;
  p.step = cfg.step_size;
  p.friction = cfg.friction;
  p.inject_noise = cfg.inject_noise;
  p.divergence_radius = cfg.divergence_radius;
  p.velocity_scale = cfg.velocity_scale;
  if (!(p.velocity_scale > 0.0)) throw InvalidInput("velocity scale must be positive");
  return p;
}

ChainState initial_state(const SmoothTarget& target, const SamplerConfig& cfg, const KernelParams& params,
                         std::uint64_t stream_id) {
  const auto d = static_cast<Eigen::Index>(target.dim());
  ChainState s;
  s.v = Vec::Zero(d);
  RandomStream rng(cfg.seed, stream_id);
  rng.seek(0);
  if (cfg.initial == InitialDistribution::StandardGaussian) {
    s.x.resize(d);
    rng.fill_normal(s.x);
  } else if (cfg.initial_point.size() == 0) {
    s.x = Vec::Zero(d);
  } else {
    if (cfg.initial_point.size() != d) throw InvalidInput("initial point has the wrong dimension");
    s.x = cfg.initial_point;
  }
  if (params.kind == SamplerKind::KlmcRm && cfg.stationary_initial_velocity) {
    rng.fill_normal(s.v);
    s.v *= std::sqrt(params.velocity_scale);
  }
  if (!s.x.allFinite()) throw InvalidInput("initial point has non-finite entries");
  return s;
}

void advance_chain(const SmoothTarget& target, const KernelParams& p, ChainState& s, RandomStream& rng,
                   std::uint64_t steps) {
  const auto d = static_cast<Eigen::Index>(target.dim());
  Vec grad(d);
  Vec noise(d);
  if (p.kind == SamplerKind::Lmc) {
    const double scale = std::sqrt(2.0 * p.step);
    for (std::uint64_t i = 0; i < steps; ++i) {
      const std::uint64_t k = s.step + 1;
      target.gradient(s.x, grad);
      ++s.gradient_evaluations;
      if (!grad.allFinite()) throw DivergenceError(k, s.x.norm());
      s.x -= p.step * grad;
      if (p.inject_noise) {
        rng.seek(k);
        rng.fill_normal(noise);
        s.x += scale * noise;
      }
      s.step = k;
      check_state(s, k, p.divergence_radius);
    }
    return;
  }

  Vec x_mid(d);
  Vec w1(d), w2(d), w3(d);
  for (std::uint64_t i = 0; i < steps; ++i) {
    const std::uint64_t k = s.step + 1;
    rng.seek(k);
    const double fraction = rng.uniform();
    const MidpointWeights w = midpoint_weights(p.step, p.friction, p.velocity_scale, fraction);
    if (p.inject_noise) {
      const auto& l = w.cholesky;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double z3 = rng.normal();
        w1[j] = l[0] * z1;
        w2[j] = l[3] * z1 + l[4] * z2;
        w3[j] = l[6] * z1 + l[7] * z2 + l[8] * z3;
      }
    } else {
      w1.setZero();
      w2.setZero();
      w3.setZero();
    }

    target.gradient(s.x, grad);
    ++s.gradient_evaluations;
    if (!grad.allFinite()) throw DivergenceError(k, s.x.norm());
    x_mid = s.x + w.x_from_v_mid * s.v - w.x_from_grad_mid * grad + w.position_noise * w1;

    target.gradient(x_mid, grad);
    ++s.gradient_evaluations;
    if (!grad.allFinite()) throw DivergenceError(k, x_mid.norm());
    s.x += w.x_from_v * s.v - w.x_from_grad * grad + w.position_noise * w2;
    s.v = w.v_decay * s.v - w.v_from_grad * grad + w.velocity_noise * w3;
    s.step = k;
    check_state(s, k, p.divergence_radius);
  }
}

Chain run_sampler(SamplerKind kind, const SmoothTarget& target, const SamplerConfig& cfg,
                  std::uint64_t stream_id) {
  const KernelParams params = resolve_params(kind, cfg);
  Chain chain;
  chain.seed = cfg.seed;
  chain.stream_id = stream_id;
  ChainState state = initial_state(target, cfg, params, stream_id);
  RandomStream rng(cfg.seed, stream_id);

  chain.steps.push_back(0);
  chain.iterates.push_back(state.x);
  const std::uint64_t total = cfg.iterations;
  const std::uint64_t stride = cfg.thin == 0 ? std::max<std::uint64_t>(total, 1) : cfg.thin;
  while (state.step < total) {
    const std::uint64_t next = std::min<std::uint64_t>(total, state.step + stride);
    advance_chain(target, params, state, rng, next - state.step);
    chain.steps.push_back(state.step);
    chain.iterates.push_back(state.x);
  }
  chain.final_state = std::move(state);
  return chain;
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
  const Eigen::Index d = chain.iterates.empty() ? 0 : chain.iterates.front().size();
  out << "k";
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << (j + 1);
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < chain.iterates.size(); ++i) {
    out << chain.steps[i];
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << chain.iterates[i][j];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace nsmooth
