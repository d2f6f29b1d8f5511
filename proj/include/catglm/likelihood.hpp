#pragma once

#include <Eigen/Dense>
#include <span>

#include "catglm/model.hpp"
#include "catglm/ratios.hpp"

namespace catglm {

// One observation: covariates, the observed category (0-based label index,
// J-1 being the last category), and a positive weight for grouped counts.
struct Observation {
  Eigen::VectorXd x;
  int category = 0;
  double weight = 1.0;

  // Truncated indicator vector of length J-1 (all zeros for the last
  // category).
  Eigen::VectorXd indicator(int J) const;
  static Observation from_indicator(const Eigen::VectorXd& y,
                                    Eigen::VectorXd x, double weight = 1.0);
};

// Log-density of the truncated multinomial: sum_j y_j ln pi_j +
// (1 - sum_j y_j) ln pi_J. Probabilities are clamped before the log.
double log_likelihood(const ProbabilityVector& pi, const Eigen::VectorXd& y);

// diag(pi) - pi pi^t, the covariance of the truncated indicator vector.
Eigen::MatrixXd covariance(const ProbabilityVector& pi);

// Model mean in *model-internal* slot order: rho = r^{-1}(F(Z(x) beta)),
// truncated. Raises ConstraintViolation when eta leaves the cdf support or
// breaks the cumulative ordering at this x.
ProbabilityVector internal_probabilities(const ModelSpec& spec,
                                         const Eigen::VectorXd& beta,
                                         const Eigen::VectorXd& x);

// Full length-J probabilities in label order (category_order applied).
Eigen::VectorXd model_probabilities(const ModelSpec& spec,
                                    const Eigen::VectorXd& beta,
                                    const Eigen::VectorXd& x);

// Same expansion but from an already-computed linear predictor; used by
// eta-level transform verification.
Eigen::VectorXd probabilities_from_eta(const ModelSpec& spec,
                                       const Eigen::VectorXd& eta);

struct ScoreInfo {
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
};

// Score vector and Fisher information of the weighted sample, assembled per
// observation as Z^t (dF/deta) (dpi/dr) Cov^{-1} (y - pi) and
// Z^t (dF/deta)(dpi/dr) Cov^{-1} (dpi/dr)^t (dF/deta)^t Z. Cov^{-1} is
// applied by Cholesky solves. Constraint failures are collected across all
// observations and raised as one ConstraintViolation listing the offenders.
ScoreInfo score_and_information(const ModelSpec& spec,
                                const Eigen::VectorXd& beta,
                                std::span<const Observation> obs);

// Weighted total log-likelihood; same error behaviour as
// score_and_information.
double total_log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& beta,
                            std::span<const Observation> obs);

}  // namespace catglm
