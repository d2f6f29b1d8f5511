#include "catglm/model.hpp"

#include <set>

namespace catglm {

std::vector<int> identity_permutation(int J) {
  std::vector<int> out(J);
  for (int j = 0; j < J; ++j) out[j] = j;
  return out;
}

bool is_permutation(const std::vector<int>& sigma, int J) {
  if (static_cast<int>(sigma.size()) != J) return false;
  std::vector<bool> seen(J, false);
  for (int v : sigma) {
    if (v < 0 || v >= J || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<int> inverse_permutation(const std::vector<int>& sigma) {
  std::vector<int> inv(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) inv[sigma[j]] = static_cast<int>(j);
  return inv;
}

ModelSpec normalized(ModelSpec spec) {
  if (spec.J < 2) throw DomainError("models need J >= 2 categories");
  if (spec.p < 0) throw DomainError("covariate dimension must be >= 0");
  validate(spec.cdf);
  if (spec.category_labels.empty()) {
    for (int j = 1; j <= spec.J; ++j)
      spec.category_labels.push_back(std::to_string(j));
  }
  if (static_cast<int>(spec.category_labels.size()) != spec.J)
    throw DomainError("category_labels must have J entries");
  std::set<std::string> uniq(spec.category_labels.begin(),
                             spec.category_labels.end());
  if (static_cast<int>(uniq.size()) != spec.J)
    throw DomainError("category labels must be distinct");
  if (spec.category_order.empty())
    spec.category_order = identity_permutation(spec.J);
  if (!is_permutation(spec.category_order, spec.J))
    throw DomainError("category_order must be a permutation of {0..J-1}");
  design_columns(spec.design, spec.J, spec.p);  // validates custom layouts
  return spec;
}

}  // namespace catglm
