#pragma once

#include <Eigen/Dense>
#include <string>

#include "catglm/distributions.hpp"
#include "catglm/errors.hpp"

namespace catglm {

// Truncated probability vector (pi_1, ..., pi_{J-1}): the mean parameter of a
// J-category response with the last category's probability implied.
struct ProbabilityVector {
  Eigen::VectorXd values;

  explicit ProbabilityVector(Eigen::VectorXd v);

  int J() const { return static_cast<int>(values.size()) + 1; }
  // Implied probability of the last category.
  double last() const { return 1.0 - values.sum(); }
  // Expansion to all J probabilities.
  Eigen::VectorXd full() const;
};

// The four probability-ratio structures. All are diffeomorphisms from the
// truncated simplex onto an open subset of (0,1)^{J-1}; cumulative is the
// only one whose image is order-constrained (r_1 < ... < r_{J-1}).
enum class RatioKind { reference, adjacent, cumulative, sequential };

Eigen::VectorXd ratio_apply(RatioKind kind, const ProbabilityVector& pi);

// Inverse map. For cumulative the input must be strictly increasing;
// violations raise InvalidRatio (the step-halving signal in the fitter).
ProbabilityVector ratio_invert(RatioKind kind, const Eigen::VectorXd& p);

// Jacobian of the inverse map. Entry (i, j) is d pi_j / d r_i.
// The reference/adjacent scalings 1/[F(eta_i)(1-F(eta_i))] are computed from
// the linear predictor via the cdf, with the caller guaranteeing p = F(eta)
// componentwise; pi and the cumulative gamma_i are recovered from p.
Eigen::MatrixXd ratio_jacobian(RatioKind kind, const Eigen::VectorXd& p,
                               const Eigen::VectorXd& eta, const CdfSpec& cdf);

std::string to_string(RatioKind kind);
RatioKind parse_ratio(const std::string& name);

}  // namespace catglm
