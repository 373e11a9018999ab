#include "nsmooth/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsmooth/errors.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw InvalidInput(std::string(name) + " must be positive and finite");
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double select_beta(BetaMode mode, double epsilon, double diameter, std::optional<double> strong_convexity) {
  require_positive(epsilon, "epsilon");
  require_positive(diameter, "D");
  if (mode == BetaMode::TV) return epsilon / diameter;
  if (!strong_convexity) throw InvalidInput("W2 mode needs the strong-convexity constant alpha");
  require_positive(*strong_convexity, "alpha");
  return std::sqrt(*strong_convexity) * epsilon / (2.0 * diameter);
}

double tv_smoothing_error(double beta, double diameter) { return 0.5 * beta * diameter; }

double w2_smoothing_error(double beta, double diameter, double lsi_constant) {
  return std::sqrt(lsi_constant) * beta * diameter;
}

double pinsker_tv(double kl) { return std::sqrt(0.5 * std::max(kl, 0.0)); }

double talagrand_w2(double kl, double lsi_constant) {
  return std::sqrt(2.0 * lsi_constant * std::max(kl, 0.0));
}

double smoothed_lsi_constant(double lsi_constant, double beta, double diameter) {
  return lsi_constant * std::exp(4.0 * beta * diameter);
}

BoundReport iteration_bound(int bound_case, const BoundInputs& in) {
  require_positive(in.epsilon, "epsilon");
  require_positive(in.diameter, "D");
  if (in.dim == 0) throw InvalidInput("dimension must be positive");

  BoundReport r;
  r.bound_case = bound_case;
  r.epsilon = in.epsilon;
  const double eps = in.epsilon;
  const double d = static_cast<double>(in.dim);
  const double lambda2 = in.coupling_lipschitz * in.coupling_lipschitz;
  const double base_smooth = in.smooth_lipschitz + in.radius * in.coupling_smoothness;
  r.log_factor = std::max(1.0, std::log(1.0 / eps)) * std::max(1.0, std::log(d));
  r.assumptions.push_back("leading constants set to 1; log factor log(1/eps) log(d), each floored at 1");
  for (const auto& name : in.estimated_constants)
    r.assumptions.push_back("constant " + name + " estimated empirically");

  PotentialConstants constants;
  constants.smooth_lipschitz = in.smooth_lipschitz;
  constants.coupling_lipschitz = in.coupling_lipschitz;
  constants.coupling_smoothness = in.coupling_smoothness;

  switch (bound_case) {
    case 1: {
      if (!in.strong_convexity) throw InvalidInput("case 1 needs the strong-convexity constant alpha");
      const double alpha = *in.strong_convexity;
      require_positive(alpha, "alpha");
      const double limit = 2.0 * std::sqrt(d / alpha);
      if (!(eps < limit))
        throw RangeError("case 1 requires eps < 2 sqrt(d / alpha) = " + format(limit));
      r.error_metric = "W2";
      r.beta = select_beta(BetaMode::W2StronglyConvex, eps, in.diameter, alpha);
      r.smoothness = smoothness_constant(constants, in.radius, in.sigma, r.beta);
      r.smoothing_error = w2_smoothing_error(r.beta, in.diameter, 1.0 / alpha);
      const double kappa = r.smoothness / alpha;
      const double scale = (2.0 / eps) * std::sqrt(d / alpha);
      r.leading_term = std::pow(kappa, 7.0 / 6.0) * std::cbrt(scale) + kappa * std::pow(scale, 2.0 / 3.0);
      r.simplified_leading_term =
          lambda2 * in.diameter * std::cbrt(d) / (std::pow(alpha, 11.0 / 6.0) * std::pow(eps, 5.0 / 3.0)) +
          std::pow(in.coupling_lipschitz, 7.0 / 3.0) * std::pow(in.diameter, 7.0 / 6.0) * std::pow(d, 1.0 / 6.0) /
              (std::pow(alpha, 23.0 / 12.0) * std::pow(eps, 1.5));
      r.assumptions.push_back("eps < 2 sqrt(d / alpha) = " + format(limit) + " holds");
      if (base_smooth * eps <= lambda2 * in.diameter)
        r.assumptions.push_back("small-eps regime (L_f + R L_h) eps <= lambda_h^2 D holds; simplified form valid");
      else
        r.assumptions.push_back("small-eps regime (L_f + R L_h) eps <= lambda_h^2 D violated; simplified form not valid");
      break;
    }
    case 2:
    case 3: {
      // Admissible range with the unspecified O(.) constant taken as 1.
      if (!(base_smooth * eps <= lambda2 * in.diameter))
        throw RangeError("cases 2-3 require (L_f + R L_h) eps <= lambda_h^2 D (O-constant taken as 1)");
      r.assumptions.push_back("(L_f + R L_h) eps <= lambda_h^2 D holds (O-constant taken as 1)");
      r.error_metric = "TV";
      r.beta = select_beta(BetaMode::TV, eps, in.diameter);
      r.smoothness = smoothness_constant(constants, in.radius, in.sigma, r.beta);
      r.smoothing_error = tv_smoothing_error(r.beta, in.diameter);
      if (bound_case == 2) {
        if (!in.initial_w2) throw InvalidInput("case 2 needs an estimate of W2(mu_0, pi_beta)");
        const double w0 = *in.initial_w2;
        r.leading_term = lambda2 * in.diameter * std::sqrt(d) * w0 * w0 / (eps * eps * eps);
        r.assumptions.push_back("W2(mu_0, pi_beta) = " + format(w0) + " supplied by user");
      } else {
        if (!in.lsi_constant) throw InvalidInput("case 3 needs the LSI constant C_pi");
        require_positive(*in.lsi_constant, "C_pi");
        const double c_beta = smoothed_lsi_constant(*in.lsi_constant, r.beta, in.diameter);
        r.smoothed_lsi_constant = c_beta;
        r.leading_term = lambda2 * in.diameter * c_beta * std::sqrt(d) / eps;
        r.assumptions.push_back("LSI constant of pi_beta is C_pi exp(4 beta D) = " + format(c_beta));
      }
      break;
    }
    default:
      throw InvalidInput("bound case must be 1, 2 or 3");
  }
  r.iterations = r.leading_term * r.log_factor;
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["epsilon"] = r.epsilon;
  j["beta"] = r.beta;
  j["L_smooth"] = r.smoothness;
  j["K"] = r.iterations;
  j["case"] = r.bound_case;
  j["error_metric"] = r.error_metric;
  j["assumptions"] = r.assumptions;
  j["smoothing_error"] = r.smoothing_error;
  j["K_leading"] = r.leading_term;
  j["log_factor"] = r.log_factor;
  j["label"] = r.label;
  if (r.simplified_leading_term) j["K_leading_simplified"] = *r.simplified_leading_term;
  if (r.smoothed_lsi_constant) j["C_beta"] = *r.smoothed_lsi_constant;
  return j;
}

}  // namespace nsmooth
