#pragma once

#include <string>

#include "catglm/errors.hpp"

namespace catglm {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before any log or
// division in likelihood code. This is the single definition of the clamp.
inline constexpr double kProbClamp = 1e-12;

inline double clamp_probability(double p) {
  if (p < kProbClamp) return kProbClamp;
  if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return p;
}

enum class CdfFamily {
  logistic,
  normal,
  laplace,
  cauchy,
  student,
  gumbel_min,
  gumbel_max,
  exponential,
  pareto,
};

// A continuous, strictly increasing cdf used as the F component of a link.
// Location/scale are carried with defaults (0,1); they exist so that fits
// under linearly related cdfs can be compared, not as a user-facing
// reparametrization.
struct CdfSpec {
  CdfFamily family = CdfFamily::logistic;
  int df = 1;          // Student only, nu >= 1
  double shape = 1.0;  // Pareto only, a >= 1
  double location = 0.0;
  double scale = 1.0;
};

void validate(const CdfSpec& spec);

// True for the families symmetric about their location.
bool is_symmetric(CdfFamily family);
inline bool is_symmetric(const CdfSpec& spec) { return is_symmetric(spec.family); }

// Exponential and Pareto live on a half line; everything else is on R.
bool has_restricted_support(CdfFamily family);
inline bool has_restricted_support(const CdfSpec& spec) {
  return has_restricted_support(spec.family);
}

// Open lower bound of the support in predictor units (-inf for full-line
// families, location for exponential, location + scale for Pareto).
double support_lower_bound(const CdfSpec& spec);

inline bool in_support(const CdfSpec& spec, double w) {
  return w > support_lower_bound(spec);
}

double cdf_eval(const CdfSpec& spec, double w);
double pdf_eval(const CdfSpec& spec, double w);
double quantile(const CdfSpec& spec, double p);

// cdf_eval with the result clamped away from {0,1}; support errors still
// propagate.
inline double clamped_cdf_eval(const CdfSpec& spec, double w) {
  return clamp_probability(cdf_eval(spec, w));
}

// The symmetric counterpart F~(w) = 1 - F(-w). Gumbel min and max swap,
// symmetric families map to themselves (location negated). Exponential and
// Pareto have no representable reflection and raise UnsupportedReflection.
CdfSpec reflect(const CdfSpec& spec);

// Config-string names: "logistic", "normal", "laplace", "cauchy",
// "student:<nu>", "gumbelmin", "gumbelmax", "exponential", "pareto:<a>".
std::string to_string(const CdfSpec& spec);
CdfSpec parse_cdf(const std::string& name);

bool operator==(const CdfSpec& a, const CdfSpec& b);

}  // namespace catglm
