#pragma once

#include <string>
#include <vector>

#include "catglm/design.hpp"
#include "catglm/distributions.hpp"
#include "catglm/ratios.hpp"

namespace catglm {

// Full specification of a categorical GLM: the ratio structure, the link
// cdf, the design matrix, and the category bookkeeping.
//
// category_order is a permutation of {0..J-1}: model slot j describes the
// category at label position category_order[j], and slot J-1 is the model's
// reference slot. Identity order means labels are used as-is with the last
// label as reference.
struct ModelSpec {
  RatioKind ratio = RatioKind::reference;
  CdfSpec cdf;
  DesignSpec design;
  int J = 2;
  int p = 0;
  std::vector<std::string> category_labels;  // size J; defaults to "1".."J"
  std::vector<int> category_order;           // permutation; defaults to identity

  int beta_dim() const { return design_columns(design, J, p); }
};

// Fills defaults and checks invariants (J >= 2, labels distinct, order is a
// bijection, cdf parameters valid). Returns the normalized spec.
ModelSpec normalized(ModelSpec spec);

std::vector<int> identity_permutation(int J);
std::vector<int> inverse_permutation(const std::vector<int>& sigma);
bool is_permutation(const std::vector<int>& sigma, int J);

}  // namespace catglm
