#include "catglm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace catglm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool plain_kind(const DesignSpec& d, DesignKind kind) {
  return d.kind == kind && !d.has_pre();
}

bool complete_or_proportional(const DesignSpec& d) {
  return plain_kind(d, DesignKind::complete) ||
         plain_kind(d, DesignKind::proportional);
}

bool standard_logistic(const CdfSpec& cdf) {
  return cdf.family == CdfFamily::logistic && cdf.location == 0.0;
}

bool standard_symmetric(const CdfSpec& cdf) {
  return is_symmetric(cdf) && cdf.location == 0.0;
}

// Canonical key of the guaranteed-equal orbit of sigma under the invariance
// results applying to this spec.
std::vector<int> orbit_key(const ModelSpec& spec, const std::vector<int>& sigma) {
  const int J = spec.J;
  switch (spec.ratio) {
    case RatioKind::reference: {
      if (standard_logistic(spec.cdf) && plain_kind(spec.design, DesignKind::complete))
        return {};  // invariant under all permutations
      if (complete_or_proportional(spec.design))
        return {sigma[J - 1]};  // orbit = permutations sharing the reference
      break;
    }
    case RatioKind::adjacent:
      if (standard_logistic(spec.cdf) && plain_kind(spec.design, DesignKind::complete))
        return {};  // equal to the canonical reference model
      [[fallthrough]];
    case RatioKind::cumulative: {
      if (standard_symmetric(spec.cdf) && complete_or_proportional(spec.design)) {
        std::vector<int> rev(sigma.rbegin(), sigma.rend());
        return std::min(sigma, rev);  // orbit = {sigma, reversed sigma}
      }
      break;
    }
    case RatioKind::sequential: {
      if (standard_symmetric(spec.cdf) && plain_kind(spec.design, DesignKind::complete)) {
        std::vector<int> key = sigma;
        if (key[J - 1] < key[J - 2]) std::swap(key[J - 1], key[J - 2]);
        return key;  // orbit = {sigma, last-two transposed sigma}
      }
      break;
    }
  }
  return sigma;  // singleton
}

std::vector<std::vector<int>> stratified_folds(const Dataset& data, int k,
                                               std::uint64_t seed) {
  std::vector<std::vector<int>> folds(k);
  if (!data.fold_ids.empty()) {
    std::set<int> ids(data.fold_ids.begin(), data.fold_ids.end());
    if (static_cast<int>(ids.size()) != k)
      throw DomainError("dataset fold ids do not form k folds");
    std::map<int, int> remap;
    int next = 0;
    for (int id : ids) remap[id] = next++;
    for (int i = 0; i < data.n(); ++i)
      folds[remap[data.fold_ids[i]]].push_back(i);
    return folds;
  }
  std::mt19937_64 rng(seed);
  for (int c = 0; c < data.J(); ++c) {
    std::vector<int> idx;
    for (int i = 0; i < data.n(); ++i)
      if (data.observations[i].category == c) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t pos = 0; pos < idx.size(); ++pos)
      folds[pos % k].push_back(idx[pos]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace

Dataset simulate_dataset(const ModelSpec& raw_spec, const Eigen::VectorXd& beta,
                         const Eigen::MatrixXd& X, std::uint64_t seed) {
  const ModelSpec spec = normalized(raw_spec);
  if (X.cols() != spec.p)
    throw DomainError("simulate_dataset: X columns must match spec.p");
  Dataset data;
  data.category_labels = spec.category_labels;
  for (int c = 0; c < spec.p; ++c)
    data.covariate_names.push_back("x" + std::to_string(c + 1));
  data.provenance = "simulated";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd x = X.row(i).transpose();
    const Eigen::VectorXd pi = model_probabilities(spec, beta, x);
    const double u = unif(rng);
    double acc = 0.0;
    int cat = spec.J - 1;
    for (int j = 0; j < spec.J; ++j) {
      acc += pi[j];
      if (u < acc) {
        cat = j;
        break;
      }
    }
    Observation ob;
    ob.x = x;
    ob.category = cat;
    data.observations.push_back(std::move(ob));
  }
  return data;
}

PermScanResult permutation_scan(const ModelSpec& raw_spec, const Dataset& data,
                                const std::vector<std::vector<int>>& perms,
                                const FitControls& controls) {
  const ModelSpec spec = normalized(raw_spec);
  PermScanResult result;
  for (const auto& sigma : perms) {
    PermScanEntry entry;
    entry.sigma = sigma;
    try {
      const FittedModel fm =
          fisher_scoring(permute_model(spec, sigma), data, controls);
      entry.log_lik = fm.log_lik;
      entry.converged = fm.converged;
      entry.note = fm.diagnostic;
    } catch (const Error& e) {
      entry.diverged = true;
      entry.log_lik = kNaN;
      entry.note = e.what();
    }
    result.entries.push_back(std::move(entry));
  }

  // Guaranteed-equal orbits first, numeric merge second; this keeps slowly
  // converged fits from showing up as spurious plateaus.
  std::map<std::vector<int>, int> orbit_of;
  result.orbit_id.resize(result.entries.size());
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto key = orbit_key(spec, result.entries[i].sigma);
    auto [it, fresh] = orbit_of.try_emplace(key, static_cast<int>(orbit_of.size()));
    result.orbit_id[i] = it->second;
    (void)fresh;
  }

  std::map<int, double> orbit_ll;  // representative = max member log-lik
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.diverged || !e.converged) continue;
    auto [it, fresh] = orbit_ll.try_emplace(result.orbit_id[i], e.log_lik);
    if (!fresh) it->second = std::max(it->second, e.log_lik);
  }
  std::vector<std::pair<double, int>> reps;  // (ll, orbit)
  for (const auto& [orbit, ll] : orbit_ll) reps.emplace_back(ll, orbit);
  std::sort(reps.rbegin(), reps.rend());
  std::map<int, int> plateau_of_orbit;
  int plateau = -1;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [ll, orbit] : reps) {
    if (plateau < 0 || prev - ll > result.plateau_tol) ++plateau;
    plateau_of_orbit[orbit] = plateau;
    prev = ll;
  }
  result.n_plateaus = plateau + 1;
  result.plateau_id.assign(result.entries.size(), -1);
  result.plateaus.assign(result.n_plateaus, {});
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.diverged || !e.converged) continue;
    const int id = plateau_of_orbit[result.orbit_id[i]];
    result.plateau_id[i] = id;
    auto& group = result.plateaus[id];
    group.entry_indices.push_back(static_cast<int>(i));
    group.log_lik = group.entry_indices.size() == 1
                        ? e.log_lik
                        : std::max(group.log_lik, e.log_lik);
  }
  return result;
}

std::vector<std::vector<int>> all_permutations(int J) {
  std::vector<int> sigma = identity_permutation(J);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

PermScanResult permutation_scan_all(const ModelSpec& spec, const Dataset& data,
                                    const FitControls& controls) {
  if (spec.J > 6)
    throw DomainError("full permutation scans are limited to J <= 6");
  return permutation_scan(spec, data, all_permutations(spec.J), controls);
}

std::vector<std::vector<int>> linear_extensions(
    int n, const std::vector<std::pair<int, int>>& less) {
  if (n < 1 || n > 12)
    throw DomainError("linear_extensions supports 1 <= n <= 12");
  std::vector<std::vector<bool>> pred(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : less) {
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
      throw DomainError("bad order constraint");
    pred[b][a] = true;  // a must come before b
  }
  // Kahn pass for cycle detection.
  {
    std::vector<bool> removed(n, false);
    for (int round = 0; round < n; ++round) {
      int pick = -1;
      for (int v = 0; v < n && pick < 0; ++v) {
        if (removed[v]) continue;
        bool free = true;
        for (int u = 0; u < n; ++u)
          if (!removed[u] && pred[v][u]) free = false;
        if (free) pick = v;
      }
      if (pick < 0) throw DomainError("order constraints contain a cycle");
      removed[pick] = true;
    }
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(current.size()) == n) {
      out.push_back(current);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      bool ready = true;
      for (int u = 0; u < n; ++u)
        if (pred[v][u] && !used[u]) ready = false;
      if (!ready) continue;
      used[v] = true;
      current.push_back(v);
      self(self);
      current.pop_back();
      used[v] = false;
    }
  };
  rec(rec);
  return out;
}

std::vector<std::vector<int>> hasse_consistent_permutations(
    const std::vector<std::string>& labels,
    const std::vector<std::pair<std::string, std::string>>& constraints) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    index[labels[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [a, b] : constraints) {
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      throw DomainError("order constraint uses an unknown label: " + a + "<" + b);
    pairs.emplace_back(ia->second, ib->second);
  }
  return linear_extensions(static_cast<int>(labels.size()), pairs);
}

OrderingSearchResult ordering_search(
    const Dataset& data,
    const std::vector<std::pair<std::string, std::string>>& constraints,
    const std::vector<CdfSpec>& cdfs, const DesignSpec& design,
    const FitControls& controls) {
  validate(data);
  const auto perms = hasse_consistent_permutations(data.category_labels, constraints);
  OrderingSearchResult result;
  result.cdfs = cdfs;
  for (const CdfSpec& cdf : cdfs) {
    ModelSpec spec;
    spec.ratio = RatioKind::sequential;
    spec.cdf = cdf;
    spec.design = design;
    spec.J = data.J();
    spec.p = data.p();
    spec.category_labels = data.category_labels;
    std::vector<OrderingSearchRow> rows;
    for (const auto& sigma : perms) {
      OrderingSearchRow row;
      row.sigma = sigma;
      try {
        const FittedModel fm =
            fisher_scoring(permute_model(spec, sigma), data, controls);
        row.log_lik = fm.log_lik;
        row.converged = fm.converged;
      } catch (const Error&) {
        row.diverged = true;
        row.log_lik = kNaN;
      }
      rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const OrderingSearchRow& a, const OrderingSearchRow& b) {
                       if (a.diverged != b.diverged) return !a.diverged;
                       return a.log_lik > b.log_lik;
                     });
    std::vector<std::pair<int, int>> ties;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        if (rows[i].diverged || rows[j].diverged) continue;
        if (std::fabs(rows[i].log_lik - rows[j].log_lik) > result.tie_tol)
          continue;
        std::vector<int> swapped = rows[i].sigma;
        std::swap(swapped[swapped.size() - 1], swapped[swapped.size() - 2]);
        if (swapped == rows[j].sigma)
          ties.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
    result.ranked.push_back(std::move(rows));
    result.tied_pairs.push_back(std::move(ties));
  }
  return result;
}

CvResult kfold_cv(const std::vector<ModelSpec>& classifiers,
                  const Dataset& data, int k, std::uint64_t seed,
                  const FitControls& controls) {
  validate(data);
  if (k < 2) throw DomainError("cross validation needs k >= 2");
  const auto folds = stratified_folds(data, k, seed);
  std::vector<char> fold_of(data.n());
  for (int f = 0; f < k; ++f)
    for (int i : folds[f]) fold_of[i] = static_cast<char>(f);

  CvResult result;
  result.k = k;
  result.seed = seed;
  for (const ModelSpec& raw : classifiers) {
    ModelSpec spec = normalized(raw);
    CvEntry entry;
    entry.spec = spec;
    for (int f = 0; f < k; ++f) {
      Dataset train;
      train.category_labels = data.category_labels;
      train.covariate_names = data.covariate_names;
      train.provenance = data.provenance + " [fold " + std::to_string(f) + "]";
      for (int i = 0; i < data.n(); ++i)
        if (fold_of[i] != f) train.observations.push_back(data.observations[i]);
      double err = kNaN;
      try {
        const FittedModel fm = fisher_scoring(spec, train, controls);
        double wrong = 0.0, total = 0.0;
        for (int i : folds[f]) {
          const Observation& ob = data.observations[i];
          total += ob.weight;
          try {
            if (classify_index(fm, ob.x) != ob.category) wrong += ob.weight;
          } catch (const ConstraintViolation&) {
            wrong += ob.weight;  // undefined prediction counts as an error
          }
        }
        err = total > 0.0 ? wrong / total : 0.0;
      } catch (const Error&) {
        ++entry.failed_folds;
      }
      entry.fold_errors.push_back(err);
    }
    double sum = 0.0;
    int good = 0;
    for (double e : entry.fold_errors) {
      if (!std::isnan(e)) {
        sum += e;
        ++good;
      }
    }
    entry.mean_error = good > 0 ? sum / good : kNaN;
    result.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    if (std::isnan(result.entries[i].mean_error)) continue;
    if (result.best_index < 0 ||
        result.entries[i].mean_error <
            result.entries[result.best_index].mean_error)
      result.best_index = static_cast<int>(i);
  }
  return result;
}

std::vector<ModelSpec> classifier_grid_cstar(int J, int p) {
  std::vector<CdfSpec> cdfs;
  cdfs.push_back(parse_cdf("normal"));
  cdfs.push_back(parse_cdf("laplace"));
  cdfs.push_back(parse_cdf("gumbelmin"));
  cdfs.push_back(parse_cdf("gumbelmax"));
  for (int nu = 1; nu <= 6; ++nu) cdfs.push_back(parse_cdf("student:" + std::to_string(nu)));
  std::vector<ModelSpec> out;
  for (const CdfSpec& cdf : cdfs) {
    ModelSpec spec;
    spec.ratio = RatioKind::reference;
    spec.cdf = cdf;
    spec.design.kind = DesignKind::complete;
    spec.J = J;
    spec.p = p;
    out.push_back(normalized(spec));
  }
  return out;
}

std::vector<ModelSpec> classifier_grid_c(int J, int p) {
  std::vector<ModelSpec> out;
  for (const ModelSpec& base : classifier_grid_cstar(J, p)) {
    for (int ref = 0; ref < J; ++ref) {
      std::vector<int> tau = identity_permutation(J);
      if (ref != J - 1) std::swap(tau[ref], tau[J - 1]);
      out.push_back(permute_model(base, tau));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> pear_tree_constraints() {
  return {{"l", "u"}, {"u", "U"}, {"l", "s"}, {"s", "S"}};
}

std::vector<int> pear_tree_true_order() { return {0, 1, 2, 3, 4}; }

Dataset synthetic_pear_tree(const PearTreeConfig& config) {
  ModelSpec spec;
  spec.ratio = RatioKind::sequential;
  spec.cdf = parse_cdf("gumbelmax");
  spec.design.kind = DesignKind::complete;
  spec.J = 5;
  spec.p = 1;
  spec.category_labels = {"l", "u", "U", "s", "S"};
  spec = normalized(spec);

  // Planted coefficients: distinct slopes make the sequential order
  // identifiable from the covariate, and keep all five categories around a
  // tenth of the mass or more.
  Eigen::VectorXd beta(8);
  beta << -0.5, -0.4, -0.5, -0.2,  // alpha
      1.8, 1.1, -1.1, -1.6;        // delta
  std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ULL + 17);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Eigen::MatrixXd X(config.n, 1);
  for (int i = 0; i < config.n; ++i) X(i, 0) = unif(rng);
  Dataset data = simulate_dataset(spec, beta, X, config.seed);
  data.provenance = "synthetic axillary-production data";
  return data;
}

}  // namespace catglm
