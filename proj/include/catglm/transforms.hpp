#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "catglm/model.hpp"

namespace catglm {

// The named model equalities and invariances realized constructively.
enum class PlanName {
  laara_gumbel,                  // (sequential, Gumbel min, proportional) ->
                                 // (cumulative, Gumbel min, proportional)
  pareto_z0,                     // (cumulative, Pareto, Z0) ->
                                 // (sequential, Pareto, Z0), eta level
  cum_seq_exponential,           // (cumulative, exponential, Z) ->
                                 // (sequential, exponential, A Z), same beta
  ref_adj_logistic,              // (reference, logistic, Z) ->
                                 // (adjacent, logistic, A^t Z), same beta
  reference_permutation,         // (reference, F, Z)_sigmaJ ->
                                 // (reference, F, P_sigmaJ Z)
  canonical_transposition,       // (reference, logistic, Z)_tau ->
                                 // (reference, logistic, B_tau Z)
  reversal,                      // (adjacent|cumulative, F, Z)_reverse ->
                                 // (r, F~, -P~ Z)
  sequential_last_transposition  // (sequential, F sym, Z)_tau~ ->
                                 // (sequential, F, A_tau~ Z)
};

// A verified realization of one proposition: the transformed model, the
// eta-level map, and the beta map where one exists. Applying the maps must
// reproduce the source distribution pointwise; that is the testable content.
struct TransformPlan {
  PlanName name;
  ModelSpec source;
  ModelSpec target;
  // eta' = eta_matrix * eta for the linear plans; empty for the nonlinear
  // ones (laara_gumbel, pareto_z0).
  Eigen::MatrixXd eta_matrix;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eta_map;
  // "identity": target uses the same beta. "closed-form": explicit
  // bijection. "eta-level-only": verified through eta_map alone.
  std::string beta_map_kind;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> beta_map;  // may be null
};

// Aux argument: the transposed category for canonical_transposition (0-based
// tau(J) < J-1), or the full permutation fixing J-1 for
// reference_permutation. Other plans take no aux.
using PlanAux = std::variant<std::monostate, int, std::vector<int>>;

// Builds the plan from a base spec with identity category order; plans over
// permuted models compose the permutation themselves. Hypothesis violations
// raise HypothesisError naming the unmet condition.
TransformPlan make_plan(PlanName name, const ModelSpec& base,
                        const PlanAux& aux = {});

struct EqualityReport {
  double max_deviation = 0.0;
  int points_checked = 0;
  std::vector<std::pair<int, std::string>> point_errors;  // (grid index, what)
};

// Max over the grid and all J categories of |pi_source - pi_target| where the
// target uses the mapped beta (or the mapped eta for the nonlinear plans).
EqualityReport verify_pointwise_equality(
    const TransformPlan& plan, const Eigen::VectorXd& beta,
    const std::vector<Eigen::VectorXd>& x_grid);

// The sigma-permuted model: the returned order maps slot j to label
// sigma[order[j]]. Fitting the permuted model equals fitting the original on
// relabeled data.
ModelSpec permute_model(const ModelSpec& spec, const std::vector<int>& sigma);

std::vector<int> reverse_permutation_of(int J);
std::vector<int> last_two_transposition(int J);

std::string to_string(PlanName name);
PlanName parse_plan(const std::string& name);

}  // namespace catglm
