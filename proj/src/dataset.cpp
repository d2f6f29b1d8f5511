#include "catglm/dataset.hpp"

#include <set>

namespace catglm {

void validate(const Dataset& data) {
  if (data.J() < 2) throw DomainError("dataset needs at least two categories");
  std::set<std::string> uniq(data.category_labels.begin(),
                             data.category_labels.end());
  if (static_cast<int>(uniq.size()) != data.J())
    throw DomainError("dataset category labels must be distinct");
  const int p = data.p();
  for (const auto& ob : data.observations) {
    if (static_cast<int>(ob.x.size()) != p)
      throw DomainError("all rows must have identical covariate arity");
    if (ob.category < 0 || ob.category >= data.J())
      throw DomainError("observation category out of range");
    if (!(ob.weight > 0.0)) throw DomainError("weights must be positive");
  }
  if (!data.fold_ids.empty() &&
      data.fold_ids.size() != data.observations.size())
    throw DomainError("fold ids must cover every observation");
}

Eigen::VectorXd marginal_frequencies(const Dataset& data) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(data.J());
  double total = 0.0;
  for (const auto& ob : data.observations) {
    counts[ob.category] += ob.weight;
    total += ob.weight;
  }
  if (total <= 0.0) throw DomainError("dataset is empty");
  return counts / total;
}

}  // namespace catglm
