#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "catglm/likelihood.hpp"
#include "catglm/transforms.hpp"

namespace catglm {

// Finite-difference cross-checks of the closed-form Jacobians and score.
// These never feed the fitter; they back the jac-check command and the test
// suites.

// A random ratio vector valid for the kind, kept away from the boundary so
// central differences are well conditioned.
Eigen::VectorXd sample_ratio_vector(RatioKind kind, int J,
                                    std::mt19937_64& rng);

struct JacobianCheckResult {
  double max_abs_error = 0.0;
  int trials = 0;
};

// Compares ratio_jacobian against central finite differences of ratio_invert
// (step `h`) on `trials` random valid inputs.
JacobianCheckResult jacobian_fd_check(RatioKind kind, int J, int trials,
                                      std::uint64_t seed, double h = 1e-6);

// Max-norm relative disagreement between the analytic score and central
// finite differences of the total log-likelihood in beta.
double score_fd_relative_error(const ModelSpec& spec,
                               const Eigen::VectorXd& beta,
                               std::span<const Observation> obs,
                               double h = 1e-5);

// A sampled verification case for one transform plan: base spec, aux, a beta
// drawn from the plan's feasible region, and an x grid inside the support.
// The samplers keep cumulative predictors ordered with a wide margin and
// exponential/Pareto predictors inside the support across the whole grid.
struct PlanCase {
  ModelSpec base;
  PlanAux aux;
  Eigen::VectorXd beta;
  std::vector<Eigen::VectorXd> x_grid;
};

PlanCase sample_plan_case(PlanName name, int J, std::mt19937_64& rng,
                          int grid_points = 50);

}  // namespace catglm
