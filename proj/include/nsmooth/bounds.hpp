#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace nsmooth {

enum class BetaMode {
  W2StronglyConvex,  // beta = sqrt(alpha) eps / (2 D)
  TV,                // beta = eps / D
};

double select_beta(BetaMode mode, double epsilon, double diameter,
                   std::optional<double> strong_convexity = std::nullopt);

/// Smoothing-error certificates for pi vs pi_beta.
double tv_smoothing_error(double beta, double diameter);                   // beta D / 2
double w2_smoothing_error(double beta, double diameter, double lsi_constant);  // sqrt(C) beta D
/// Pinsker: TV <= sqrt(KL / 2).
double pinsker_tv(double kl);
/// Talagrand: W2 <= sqrt(2 C KL).
double talagrand_w2(double kl, double lsi_constant);
/// LSI constant of pi_beta given that of pi: C exp(4 beta D).
double smoothed_lsi_constant(double lsi_constant, double beta, double diameter);

/// Inputs to the iteration-count calculators. Unknown quantities stay empty
/// and are reported as missing assumptions.
struct BoundInputs {
  double epsilon = 0.1;
  std::size_t dim = 1;
  double diameter = 0.0;              // D
  double radius = 1.0;                // R
  double sigma = 1.0;
  double smooth_lipschitz = 0.0;      // L_f
  double coupling_lipschitz = 0.0;    // lambda_h
  double coupling_smoothness = 0.0;   // L_h
  std::optional<double> strong_convexity;  // alpha (case 1)
  std::optional<double> lsi_constant;      // C_pi (case 3)
  std::optional<double> initial_w2;        // W2(mu_0, pi_beta) estimate (case 2)
  std::vector<std::string> estimated_constants;
};

/// Order-level iteration guarantee with every intermediate quantity.
struct BoundReport {
  int bound_case = 1;
  std::string error_metric;  // "W2" or "TV"
  double epsilon = 0.0;
  double beta = 0.0;
  double smoothness = 0.0;          // L_{s_beta}
  double smoothing_error = 0.0;     // certified distance pi -> pi_beta
  double leading_term = 0.0;        // K without log factors, unit constants
  double log_factor = 1.0;
  double iterations = 0.0;          // leading_term * log_factor
  std::optional<double> simplified_leading_term;  // case 1 small-eps form
  std::optional<double> smoothed_lsi_constant;    // C_beta
  std::vector<std::string> assumptions;
  std::string label = "order-level guarantee";
};

/// Iteration bounds for the three regimes: (1) strongly log-concave target
/// with randomized-midpoint KLMC, W2 error; (2) log-concave target with the
/// proximal sampler, TV error; (3) LSI target with the proximal sampler, TV
/// error. Throws RangeError when eps is outside the admissible range.
BoundReport iteration_bound(int bound_case, const BoundInputs& inputs);

nlohmann::json to_json(const BoundReport& report);

}  // namespace nsmooth
