#include <doctest.h>

#include <cmath>

#include "nsmooth/ensemble.hpp"
#include "nsmooth/errors.hpp"
#include "nsmooth/samplers.hpp"

using namespace nsmooth;

namespace {

class ZeroTarget final : public SmoothTarget {
 public:
  explicit ZeroTarget(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  double value(ConstVecRef) const override { return 0.0; }
  void gradient(ConstVecRef, VecRef out) const override { out.setZero(); }

 private:
  std::size_t d_;
};

class NanTarget final : public SmoothTarget {
 public:
  std::size_t dim() const override { return 1; }
  double value(ConstVecRef) const override { return 0.0; }
  void gradient(ConstVecRef, VecRef out) const override { out.setConstant(NAN); }
};

// Stationary variance of x' = (1 - g) x + sqrt(2 g) z by iterating the
// variance recurrence v' = (1 - g)^2 v + 2 g to its fixed point.
double ar1_stationary_variance(double g) {
  double v = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double next = (1.0 - g) * (1.0 - g) * v + 2.0 * g;
    if (std::abs(next - v) < 1e-15) return next;
    v = next;
  }
  return v;
}

// Simpson's rule with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("lmc step examples") {
  Vec x = Vec::Constant(1, 1.0);
  Vec grad = x;  // V = x^2 / 2
  const Vec next = lmc_step(x, 0.01, grad, Vec::Zero(1));
  CHECK(next[0] == doctest::Approx(0.99).epsilon(1e-15));
  CHECK_THROWS_AS(lmc_step(x, 0.0, grad, Vec::Zero(1)), InvalidInput);
}

TEST_CASE("pure diffusion increments have variance 2 gamma") {
  ZeroTarget zero(1);
  SamplerConfig cfg;
  cfg.step_size = 0.5;
  cfg.iterations = 100000;
  cfg.seed = 3;
  const Chain c = run_sampler(SamplerKind::Lmc, zero, cfg);
  REQUIRE(c.iterates.size() == 100001);
  double s = 0.0, s2 = 0.0;
  const double n = 100000.0;
  for (std::size_t k = 1; k < c.iterates.size(); ++k) {
    const double inc = c.iterates[k][0] - c.iterates[k - 1][0];
    s += inc;
    s2 += inc * inc;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("lmc on a standard Gaussian matches the AR(1) stationary covariance") {
  const double gamma = 0.05;
  const double oracle = ar1_stationary_variance(gamma);
  CHECK(oracle == doctest::Approx(1.0 / (1.0 - gamma / 2.0)).epsilon(1e-12));

  IsotropicGaussianTarget target(2);
  SamplerConfig cfg;
  cfg.step_size = gamma;
  cfg.iterations = 200000;
  cfg.seed = 19;
  const Chain c = run_sampler(SamplerKind::Lmc, target, cfg);
  Mat cov = Mat::Zero(2, 2);
  Vec mean = Vec::Zero(2);
  const std::size_t burn = 1000;
  const double n = static_cast<double>(c.iterates.size() - burn);
  for (std::size_t k = burn; k < c.iterates.size(); ++k) mean += c.iterates[k];
  mean /= n;
  for (std::size_t k = burn; k < c.iterates.size(); ++k) {
    const Vec d = c.iterates[k] - mean;
    cov += d * d.transpose();
  }
  cov /= n;
  CHECK(std::abs(cov(0, 0) / oracle - 1.0) <= 0.05);
  CHECK(std::abs(cov(1, 1) / oracle - 1.0) <= 0.05);
  CHECK(std::abs(cov(0, 1)) <= 0.05 * oracle);
}

TEST_CASE("randomized-midpoint Brownian covariances match quadrature") {
  for (double fraction : {0.05, 0.37, 0.81}) {
    for (double h : {0.1, 0.7}) {
      const double c = 2.0;
      const MidpointWeights w = midpoint_weights(h, c, 0.3, fraction);
      const double a = fraction * h;
      auto k1 = [&](double s) { return s <= a ? 1.0 - std::exp(-c * (a - s)) : 0.0; };
      auto k2 = [&](double s) { return 1.0 - std::exp(-c * (h - s)); };
      auto k3 = [&](double s) { return std::exp(-c * (h - s)); };
      auto on_a = [&](auto f) { return simpson(f, 0.0, a); };
      auto on_h = [&](auto f) { return simpson(f, 0.0, h); };
      const double v1 = on_a([&](double s) { return k1(s) * k1(s); });
      const double v2 = on_h([&](double s) { return k2(s) * k2(s); });
      const double v3 = on_h([&](double s) { return k3(s) * k3(s); });
      const double c12 = on_a([&](double s) { return k1(s) * k2(s); });
      const double c13 = on_a([&](double s) { return k1(s) * k3(s); });
      const double c23 = on_h([&](double s) { return k2(s) * k3(s); });
      const double expect[9] = {v1, c12, c13, c12, v2, c23, c13, c23, v3};
      for (int i = 0; i < 9; ++i) CHECK(w.covariance[i] == doctest::Approx(expect[i]).epsilon(1e-9).scale(1e-12));
      // Cholesky factor reproduces the covariance
      const auto& l = w.cholesky;
      CHECK(l[0] * l[0] == doctest::Approx(v1).epsilon(1e-12));
      CHECK(l[6] * l[6] + l[7] * l[7] + l[8] * l[8] == doctest::Approx(v3).epsilon(1e-12));
      CHECK(l[3] * l[6] + l[4] * l[7] == doctest::Approx(c23).epsilon(1e-10));
    }
  }
  // midpoint fraction -> 0 keeps the factor finite
  const MidpointWeights tiny = midpoint_weights(0.1, 2.0, 1.0, 1e-12);
  for (double v : tiny.cholesky) CHECK(std::isfinite(v));
}

TEST_CASE("klmc with zero field and no noise stays put") {
  ZeroTarget zero(3);
  SamplerConfig cfg;
  cfg.iterations = 50;
  cfg.inject_noise = false;
  cfg.initial_point = Vec::Constant(3, 0.7);
  const Chain c = run_sampler(SamplerKind::KlmcRm, zero, cfg);
  for (const Vec& x : c.iterates) CHECK((x - cfg.initial_point).norm() == 0.0);
  CHECK(c.final_state.v.norm() == 0.0);
}

TEST_CASE("both samplers reproduce standard Gaussian moments") {
  IsotropicGaussianTarget target(2);
  constexpr std::size_t chains = 10000;
  SamplerConfig cfg;
  cfg.seed = 5;
  cfg.initial = InitialDistribution::StandardGaussian;

  SUBCASE("klmc-rm at a small step has unit variance") {
    cfg.step_size = 0.1;
    Ensemble e(SamplerKind::KlmcRm, target, cfg, chains);
    e.advance(200);
    for (Eigen::Index j = 0; j < 2; ++j) {
      const auto v = e.coordinate(j);
      double m = 0.0, m2 = 0.0;
      for (double x : v) m += x;
      m /= chains;
      for (double x : v) m2 += (x - m) * (x - m);
      m2 /= (chains - 1);
      CHECK(std::abs(m) <= 3.0 / std::sqrt(static_cast<double>(chains)));
      CHECK(std::abs(m2 - 1.0) <= 0.05);
    }
  }
  SUBCASE("lmc has the discretization-biased variance") {
    cfg.step_size = 0.2;
    const double oracle = ar1_stationary_variance(0.2);
    Ensemble e(SamplerKind::Lmc, target, cfg, chains);
    e.advance(200);
    for (Eigen::Index j = 0; j < 2; ++j) {
      const auto v = e.coordinate(j);
      double m = 0.0, m2 = 0.0;
      for (double x : v) m += x;
      m /= chains;
      for (double x : v) m2 += (x - m) * (x - m);
      m2 /= (chains - 1);
      CHECK(std::abs(m) <= 3.0 * std::sqrt(oracle / chains));
      CHECK(std::abs(m2 / oracle - 1.0) <= 0.05);
    }
  }
}

TEST_CASE("chains are deterministic in (seed, config, target)") {
  IsotropicGaussianTarget target(4);
  SamplerConfig cfg;
  cfg.iterations = 300;
  cfg.seed = 99;
  for (SamplerKind kind : {SamplerKind::Lmc, SamplerKind::KlmcRm}) {
    const Chain a = run_sampler(kind, target, cfg);
    const Chain b = run_sampler(kind, target, cfg);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (std::size_t k = 0; k < a.iterates.size(); ++k) CHECK(a.iterates[k] == b.iterates[k]);
    SamplerConfig other = cfg;
    other.seed = 100;
    CHECK(run_sampler(kind, target, other).final_state.x != a.final_state.x);
  }
}

TEST_CASE("lmc is equivariant under translation") {
  Vec shift(3);
  shift << 1.5, -2.0, 0.25;
  IsotropicGaussianTarget centred(3, 0.7);
  IsotropicGaussianTarget shifted(shift, 0.7);
  SamplerConfig cfg;
  cfg.iterations = 200;
  cfg.step_size = 0.05;
  cfg.seed = 12;
  cfg.initial_point = Vec::Constant(3, 0.3);
  const Chain a = run_sampler(SamplerKind::Lmc, centred, cfg);
  cfg.initial_point += shift;
  const Chain b = run_sampler(SamplerKind::Lmc, shifted, cfg);
  for (std::size_t k = 0; k < a.iterates.size(); ++k)
    CHECK((a.iterates[k] + shift - b.iterates[k]).norm() <= 1e-12);
}

TEST_CASE("gradient accounting") {
  IsotropicGaussianTarget inner(2);
  CountingTarget counted(inner);
  SamplerConfig cfg;
  cfg.iterations = 37;
  const Chain lmc = run_sampler(SamplerKind::Lmc, counted, cfg);
  CHECK(counted.gradient_calls() == 37);
  CHECK(lmc.final_state.gradient_evaluations == 37);
  CountingTarget counted2(inner);
  const Chain klmc = run_sampler(SamplerKind::KlmcRm, counted2, cfg);
  CHECK(counted2.gradient_calls() == 74);
  CHECK(klmc.final_state.gradient_evaluations == 74);
}

TEST_CASE("dispatch matches a hand-written lmc loop") {
  IsotropicGaussianTarget target(3);
  SamplerConfig cfg;
  cfg.iterations = 25;
  cfg.step_size = 0.1;
  cfg.seed = 4;
  const Chain c = run_sampler(SamplerKind::Lmc, target, cfg);
  RandomStream rng(cfg.seed, 0);
  Vec x = Vec::Zero(3), g(3), z(3);
  for (std::uint64_t k = 1; k <= cfg.iterations; ++k) {
    target.gradient(x, g);
    rng.seek(k);
    rng.fill_normal(z);
    x = lmc_step(x, cfg.step_size, g, z);
    CHECK(x == c.iterates[k]);
  }
}

TEST_CASE("empty run and thinning") {
  IsotropicGaussianTarget target(2);
  SamplerConfig cfg;
  cfg.iterations = 0;
  cfg.initial_point = Vec::Constant(2, 0.5);
  const Chain empty = run_sampler(SamplerKind::KlmcRm, target, cfg);
  REQUIRE(empty.iterates.size() == 1);
  CHECK(empty.iterates.front() == cfg.initial_point);

  cfg.iterations = 10;
  cfg.thin = 4;
  const Chain thinned = run_sampler(SamplerKind::Lmc, target, cfg);
  CHECK(thinned.steps == std::vector<std::uint64_t>{0, 4, 8, 10});
}

TEST_CASE("serial and OpenMP ensemble kernels agree bit for bit") {
  IsotropicGaussianTarget target(5);
  SamplerConfig cfg;
  cfg.seed = 8;
  cfg.initial = InitialDistribution::StandardGaussian;
  for (SamplerKind kind : {SamplerKind::Lmc, SamplerKind::KlmcRm}) {
    Ensemble serial(kind, target, cfg, 64);
    Ensemble parallel(kind, target, cfg, 64);
    serial.advance(40, Execution::Serial);
    parallel.advance(40, Execution::Parallel);
    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(serial.states()[i].x == parallel.states()[i].x);
      CHECK(serial.states()[i].v == parallel.states()[i].v);
    }
    // an ensemble chain equals the single-chain run on the same stream
    SamplerConfig single = cfg;
    single.iterations = 40;
    CHECK(run_sampler(kind, target, single, 17).final_state.x == serial.states()[17].x);
  }
}

TEST_CASE("divergence is reported with the step") {
  IsotropicGaussianTarget target(1);
  SamplerConfig cfg;
  cfg.step_size = 3.0;  // |1 - gamma| = 2 per step
  cfg.iterations = 100;
  cfg.inject_noise = false;
  cfg.initial_point = Vec::Constant(1, 1.0);
  try {
    (void)run_sampler(SamplerKind::Lmc, target, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 27);
    CHECK(e.norm() > 1e8);
  }
  NanTarget nan;
  cfg.step_size = 0.1;
  CHECK_THROWS_AS(run_sampler(SamplerKind::KlmcRm, nan, cfg), DivergenceError);
  Ensemble e(SamplerKind::Lmc, nan, cfg, 4);
  CHECK_THROWS_AS(e.advance(1), DivergenceError);
}

TEST_CASE("sampler kind names") {
  CHECK(parse_sampler_kind("lmc") == SamplerKind::Lmc);
  CHECK(parse_sampler_kind("klmc-rm") == SamplerKind::KlmcRm);
  CHECK(to_string(SamplerKind::KlmcRm) == "klmc-rm");
  CHECK_THROWS_AS(parse_sampler_kind("hmc"), InvalidInput);
}

TEST_CASE("auto step size") {
  IsotropicGaussianTarget stiff(2, 1e-3);
  CHECK(auto_step_size(stiff) == doctest::Approx(0.5e-3));
  IsotropicGaussianTarget flat(2, 100.0);
  CHECK(auto_step_size(flat) == 0.1);
}
