#include "catglm/likelihood.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace catglm {

namespace {

// Feasibility of a linear predictor vector for the spec at one observation:
// every eta_j inside the cdf support, and strictly increasing for cumulative.
bool eta_feasible(const ModelSpec& spec, const Eigen::VectorXd& eta) {
  if (has_restricted_support(spec.cdf)) {
    const double lo = support_lower_bound(spec.cdf);
    for (Eigen::Index j = 0; j < eta.size(); ++j)
      if (!(eta[j] > lo)) return false;
  }
  if (spec.ratio == RatioKind::cumulative) {
    for (Eigen::Index j = 0; j + 1 < eta.size(); ++j)
      if (!(eta[j] < eta[j + 1])) return false;
  }
  return eta.allFinite();
}

Eigen::VectorXd clamped_cdf_vector(const CdfSpec& cdf,
                                   const Eigen::VectorXd& eta) {
  Eigen::VectorXd p(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j)
    p[j] = clamped_cdf_eval(cdf, eta[j]);
  return p;
}

}  // namespace

Eigen::VectorXd Observation::indicator(int J) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(J - 1);
  if (category < 0 || category >= J)
    throw DomainError("observation category out of range");
  if (category < J - 1) y[category] = 1.0;
  return y;
}

Observation Observation::from_indicator(const Eigen::VectorXd& y,
                                        Eigen::VectorXd x, double weight) {
  Observation obs;
  obs.x = std::move(x);
  obs.weight = weight;
  if (!(weight > 0.0)) throw DomainError("observation weight must be positive");
  int cat = static_cast<int>(y.size());  // all zeros = last category
  int ones = 0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] == 1.0) {
      ++ones;
      cat = static_cast<int>(j);
    } else if (y[j] != 0.0) {
      throw DomainError("indicator entries must be 0 or 1");
    }
  }
  if (ones > 1) throw DomainError("indicator must have at most one 1");
  obs.category = cat;
  return obs;
}

double log_likelihood(const ProbabilityVector& pi, const Eigen::VectorXd& y) {
  if (y.size() != pi.values.size())
    throw DomainError("indicator length must be J-1");
  double ll = 0.0;
  double sum_y = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] != 0.0) {
      ll += y[j] * std::log(clamp_probability(pi.values[j]));
      sum_y += y[j];
    }
  }
  if (sum_y == 0.0) ll = std::log(clamp_probability(pi.last()));
  return ll;
}

Eigen::MatrixXd covariance(const ProbabilityVector& pi) {
  const Eigen::VectorXd& v = pi.values;
  Eigen::MatrixXd cov = -v * v.transpose();
  cov.diagonal() += v;
  return cov;
}

ProbabilityVector internal_probabilities(const ModelSpec& spec,
                                         const Eigen::VectorXd& beta,
                                         const Eigen::VectorXd& x) {
  const Eigen::MatrixXd Z = build_design(spec.design, x, spec.J);
  if (beta.size() != Z.cols())
    throw DomainError("beta length does not match the design");
  const Eigen::VectorXd eta = Z * beta;
  if (!eta_feasible(spec, eta)) {
    std::ostringstream os;
    os << "model undefined at this x: predictor "
       << (spec.ratio == RatioKind::cumulative ? "ordering" : "support")
       << " constraint fails";
    throw ConstraintViolation(os.str());
  }
  const Eigen::VectorXd p = clamped_cdf_vector(spec.cdf, eta);
  try {
    return ratio_invert(spec.ratio, p);
  } catch (const InvalidRatio& e) {
    // Clamping can flatten an ordered eta into a tied ratio vector.
    throw ConstraintViolation(std::string("model undefined at this x: ") +
                              e.what());
  }
}

namespace {

Eigen::VectorXd expand_by_order(const ModelSpec& spec,
                                const ProbabilityVector& rho) {
  const Eigen::VectorXd full = rho.full();
  const std::vector<int>& order = spec.category_order;
  if (order.empty()) return full;
  Eigen::VectorXd out(spec.J);
  for (int j = 0; j < spec.J; ++j) out[order[j]] = full[j];
  return out;
}

}  // namespace

Eigen::VectorXd model_probabilities(const ModelSpec& spec,
                                    const Eigen::VectorXd& beta,
                                    const Eigen::VectorXd& x) {
  return expand_by_order(spec, internal_probabilities(spec, beta, x));
}

Eigen::VectorXd probabilities_from_eta(const ModelSpec& spec,
                                       const Eigen::VectorXd& eta) {
  if (eta.size() != spec.J - 1)
    throw DomainError("eta length must be J-1");
  if (!eta_feasible(spec, eta))
    throw ConstraintViolation(
        "model undefined at this eta: predictor constraint fails");
  const Eigen::VectorXd p = clamped_cdf_vector(spec.cdf, eta);
  try {
    return expand_by_order(spec, ratio_invert(spec.ratio, p));
  } catch (const InvalidRatio& e) {
    throw ConstraintViolation(std::string("model undefined at this eta: ") +
                              e.what());
  }
}

ScoreInfo score_and_information(const ModelSpec& spec,
                                const Eigen::VectorXd& beta,
                                std::span<const Observation> obs) {
  const int m = spec.J - 1;
  const int q = spec.beta_dim();
  if (beta.size() != q)
    throw DomainError("beta length does not match the design");
  const std::vector<int> inv_order =
      spec.category_order.empty()
          ? identity_permutation(spec.J)
          : inverse_permutation(spec.category_order);

  Eigen::VectorXd score = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q, q);
  std::vector<int> bad;

  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation& ob = obs[i];
    const Eigen::MatrixXd Z = build_design(spec.design, ob.x, spec.J);
    const Eigen::VectorXd eta = Z * beta;
    if (!eta_feasible(spec, eta)) {
      bad.push_back(static_cast<int>(i));
      continue;
    }
    const Eigen::VectorXd p = clamped_cdf_vector(spec.cdf, eta);
    std::optional<ProbabilityVector> rho_opt;
    try {
      rho_opt.emplace(ratio_invert(spec.ratio, p));
    } catch (const InvalidRatio&) {
      bad.push_back(static_cast<int>(i));
      continue;
    }
    const ProbabilityVector& rho = *rho_opt;

    Eigen::VectorXd f(m);
    for (int j = 0; j < m; ++j) f[j] = pdf_eval(spec.cdf, eta[j]);
    const Eigen::MatrixXd M = ratio_jacobian(spec.ratio, p, eta, spec.cdf);
    const Eigen::MatrixXd B = f.asDiagonal() * M;
    const Eigen::MatrixXd cov = covariance(rho);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      bad.push_back(static_cast<int>(i));
      continue;
    }
    // Internal indicator: category in model slot coordinates.
    const int slot = inv_order[ob.category];
    Eigen::VectorXd resid = -rho.values;
    if (slot < m) resid[slot] += 1.0;

    const Eigen::VectorXd u = llt.solve(resid);
    score.noalias() += ob.weight * (Z.transpose() * (B * u));
    const Eigen::MatrixXd X = llt.solve(B.transpose());
    const Eigen::MatrixXd ZB = Z.transpose() * B;
    info.noalias() += ob.weight * (ZB * (X * Z));
  }

  if (!bad.empty()) {
    std::ostringstream os;
    os << "constraint violated at " << bad.size() << " observation(s)";
    throw ConstraintViolation(os.str(), bad);
  }
  if (!score.allFinite() || !info.allFinite())
    throw NumericalError("non-finite score or information");
  return {std::move(score), std::move(info)};
}

double total_log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& beta,
                            std::span<const Observation> obs) {
  const std::vector<int> inv_order =
      spec.category_order.empty()
          ? identity_permutation(spec.J)
          : inverse_permutation(spec.category_order);
  double total = 0.0;
  std::vector<int> bad;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation& ob = obs[i];
    try {
      const ProbabilityVector rho = internal_probabilities(spec, beta, ob.x);
      const int slot = inv_order[ob.category];
      const double pr =
          slot < spec.J - 1 ? rho.values[slot] : rho.last();
      total += ob.weight * std::log(clamp_probability(pr));
    } catch (const ConstraintViolation&) {
      bad.push_back(static_cast<int>(i));
    }
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "constraint violated at " << bad.size() << " observation(s)";
    throw ConstraintViolation(os.str(), bad);
  }
  if (!std::isfinite(total)) throw NumericalError("non-finite log-likelihood");
  return total;
}

}  // namespace catglm
