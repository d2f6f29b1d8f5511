#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catglm/fit.hpp"
#include "catglm/transforms.hpp"

namespace catglm {

// Draws a dataset from a fully specified model: one category per row of X,
// sampled from pi(x; beta). Labels come from the spec.
Dataset simulate_dataset(const ModelSpec& spec, const Eigen::VectorXd& beta,
                         const Eigen::MatrixXd& X, std::uint64_t seed);

struct PermScanEntry {
  std::vector<int> sigma;
  double log_lik = 0.0;
  bool converged = false;
  bool diverged = false;  // fit threw (model undefined / numerical)
  std::string note;
};

struct Plateau {
  double log_lik = 0.0;            // best member log-likelihood
  std::vector<int> entry_indices;  // members, indices into entries
};

struct PermScanResult {
  std::vector<PermScanEntry> entries;
  // Guaranteed-equal orbit per entry (from the invariance results that apply
  // to the spec), then plateaus formed by merging orbits whose log-lik agree
  // within plateau_tol. Diverged or non-converged entries get id -1 and stay
  // out of every plateau.
  std::vector<int> orbit_id;
  std::vector<int> plateau_id;
  std::vector<Plateau> plateaus;  // sorted by descending log-likelihood
  int n_plateaus = 0;
  double plateau_tol = 1e-6;
};

// Fits the sigma-permuted model for every permutation in `perms`. Fit
// failures are recorded per entry, never fatal.
PermScanResult permutation_scan(const ModelSpec& spec, const Dataset& data,
                                const std::vector<std::vector<int>>& perms,
                                const FitControls& controls = {});
// All J! permutations; guarded to J <= 6.
PermScanResult permutation_scan_all(const ModelSpec& spec, const Dataset& data,
                                    const FitControls& controls = {});

std::vector<std::vector<int>> all_permutations(int J);

// All linear extensions of the partial order given by `less` pairs on
// {0..n-1}, in lexicographic order. Cyclic constraints raise DomainError.
std::vector<std::vector<int>> linear_extensions(
    int n, const std::vector<std::pair<int, int>>& less);

// Label-level wrapper: constraints as (smaller label, larger label).
std::vector<std::vector<int>> hasse_consistent_permutations(
    const std::vector<std::string>& labels,
    const std::vector<std::pair<std::string, std::string>>& constraints);

struct OrderingSearchRow {
  std::vector<int> sigma;
  double log_lik = 0.0;
  bool converged = false;
  bool diverged = false;
};

struct OrderingSearchResult {
  std::vector<CdfSpec> cdfs;
  // Per cdf, rows sorted by descending log-lik (diverged entries last).
  std::vector<std::vector<OrderingSearchRow>> ranked;
  // Per cdf, pairs of ranked-row indices tied within tol that differ by the
  // last-two transposition (the indistinguishable pairs under symmetric cdfs).
  std::vector<std::vector<std::pair<int, int>>> tied_pairs;
  double tie_tol = 1e-6;
};

// Sequential-ratio ordering recovery: fit (sequential, F, design)_sigma for
// every Hasse-consistent permutation and rank by log-likelihood.
OrderingSearchResult ordering_search(
    const Dataset& data,
    const std::vector<std::pair<std::string, std::string>>& constraints,
    const std::vector<CdfSpec>& cdfs,
    const DesignSpec& design = {DesignKind::complete, {}, {}},
    const FitControls& controls = {});

struct CvEntry {
  ModelSpec spec;
  double mean_error = 0.0;
  std::vector<double> fold_errors;  // NaN for failed folds
  int failed_folds = 0;
};

struct CvResult {
  std::vector<CvEntry> entries;
  int k = 0;
  std::uint64_t seed = 0;
  int best_index = -1;
};

// k-fold cross-validated misclassification, the same stratified folds for
// every classifier. Pre-assigned folds (e.g. published partitions) are used
// when the dataset carries fold ids.
CvResult kfold_cv(const std::vector<ModelSpec>& classifiers,
                  const Dataset& data, int k, std::uint64_t seed,
                  const FitControls& controls = {});

// The classifier grids: reference models with a complete design over
// {normal, laplace, gumbelmin, gumbelmax, student 1..6}; the extended grid
// adds every choice of reference category (10 * J classifiers).
std::vector<ModelSpec> classifier_grid_cstar(int J, int p);
std::vector<ModelSpec> classifier_grid_c(int J, int p);

// Synthetic stand-in for an axillary-production study: 5 categories
// l,u,U,s,S with partial order l<u<U and l<s<S, generated from a planted
// sequential model in the true order (l,u,U,s,S) with one continuous
// covariate.
struct PearTreeConfig {
  int n = 600;
  std::uint64_t seed = 0;
};
Dataset synthetic_pear_tree(const PearTreeConfig& config);
// The constraints and planted order matching synthetic_pear_tree.
std::vector<std::pair<std::string, std::string>> pear_tree_constraints();
std::vector<int> pear_tree_true_order();

}  // namespace catglm
