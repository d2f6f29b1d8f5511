#pragma once

#include <string>
#include <vector>

#include "catglm/likelihood.hpp"

namespace catglm {

// Encoded observations plus the category dictionary. Immutable after
// construction; index J-1 is the default reference category.
struct Dataset {
  std::vector<Observation> observations;
  std::vector<std::string> category_labels;
  std::vector<std::string> covariate_names;
  std::string provenance;
  std::vector<int> fold_ids;  // optional pre-assigned CV folds, size n

  int J() const { return static_cast<int>(category_labels.size()); }
  int p() const { return static_cast<int>(covariate_names.size()); }
  int n() const { return static_cast<int>(observations.size()); }
  double n_effective() const {
    double s = 0.0;
    for (const auto& ob : observations) s += ob.weight;
    return s;
  }
};

void validate(const Dataset& data);

// Weighted marginal category frequencies, length J.
Eigen::VectorXd marginal_frequencies(const Dataset& data);

}  // namespace catglm
