#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "catglm/dataset.hpp"
#include "catglm/model.hpp"

namespace catglm {

struct FitControls {
  int max_iter = 100;
  // Convergence needs both: score norm <= tol * n_effective and relative
  // log-likelihood change <= loglik_rel_tol.
  double tol = 1e-8;
  double loglik_rel_tol = 1e-10;
  double ridge = 0.0;  // 0 = none; a singular information falls back to
                       // 1e-8 * trace automatically
  int max_halvings = 30;
};

struct FittedModel {
  ModelSpec spec;
  Eigen::VectorXd beta;
  double log_lik = 0.0;
  int iterations = 0;
  bool converged = false;
  double aic = 0.0;
  double bic = 0.0;
  double n_effective = 0.0;
  Eigen::MatrixXd fisher_information;
  // From the inverse information at beta-hat; NaN on non-identifiable
  // directions.
  Eigen::VectorXd std_errors;
  std::vector<double> loglik_trace;  // accepted iterates, non-decreasing
  std::string diagnostic;
};

// Fisher scoring with step halving. The start point puts the ratio-transform
// of the empirical marginal frequencies on the intercepts (slopes at zero),
// which is feasible for every ratio/cdf combination. Raises ModelUndefined
// when no feasible step exists (the divergence case of permuted cumulative
// models); plain non-convergence is reported through `converged` and
// `diagnostic`.
FittedModel fisher_scoring(const ModelSpec& spec, const Dataset& data,
                           const FitControls& controls = {});
FittedModel fisher_scoring(const ModelSpec& spec,
                           std::span<const Observation> obs,
                           const FitControls& controls = {});

// Predicted truncated probabilities at x, in label order (the label at index
// J-1 is the truncated one). Raises ConstraintViolation where the model is
// undefined at this x.
ProbabilityVector predict_probabilities(const FittedModel& fitted,
                                        const Eigen::VectorXd& x);
// All J probabilities in label order.
Eigen::VectorXd predict_full(const FittedModel& fitted,
                             const Eigen::VectorXd& x);

// Argmax category; ties break toward the smaller label index.
int classify_index(const FittedModel& fitted, const Eigen::VectorXd& x);
std::string classify(const FittedModel& fitted, const Eigen::VectorXd& x);

}  // namespace catglm
