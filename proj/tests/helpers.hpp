#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "catglm/model.hpp"

namespace test_helpers {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Random covariate matrix with entries uniform in [lo, hi].
inline Eigen::MatrixXd random_X(int n, int p, std::uint64_t seed,
                                double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < p; ++c) X(i, c) = unif(rng);
  return X;
}

// Random truncated probability vector away from the boundary.
inline Eigen::VectorXd random_pi(int J, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  Eigen::VectorXd raw(J);
  for (int j = 0; j < J; ++j) raw[j] = unif(rng);
  raw /= raw.sum();
  return raw.head(J - 1);
}

inline catglm::ModelSpec make_spec(catglm::RatioKind ratio,
                                   const std::string& cdf,
                                   catglm::DesignKind design, int J, int p) {
  catglm::ModelSpec spec;
  spec.ratio = ratio;
  spec.cdf = catglm::parse_cdf(cdf);
  spec.design.kind = design;
  spec.J = J;
  spec.p = p;
  return catglm::normalized(spec);
}

}  // namespace test_helpers
