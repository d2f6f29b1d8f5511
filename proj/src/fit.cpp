#include "catglm/fit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <sstream>

namespace catglm {

namespace {

// Start point: intercepts carry the ratio transform of the (smoothed)
// marginal frequencies, slopes are zero. With slopes at zero the predictors
// are quantiles of interior probabilities, so the iterate is feasible for
// every ratio and cdf (ordered for cumulative, in-support for exponential
// and Pareto).
Eigen::VectorXd initial_beta(const ModelSpec& spec, const Dataset& data) {
  const int m = spec.J - 1;
  const Eigen::VectorXd freq = marginal_frequencies(data);
  const double total = data.n_effective();
  Eigen::VectorXd rho(m);
  double denom = total + 0.5 * spec.J;
  for (int j = 0; j < m; ++j) {
    const int label = spec.category_order[j];
    rho[j] = (freq[label] * total + 0.5) / denom;
  }
  const Eigen::VectorXd r =
      ratio_apply(spec.ratio, ProbabilityVector(rho));
  Eigen::VectorXd eta_star(m);
  for (int j = 0; j < m; ++j) eta_star[j] = quantile(spec.cdf, r[j]);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.beta_dim());
  if (spec.design.has_pre()) {
    beta.head(m) = spec.design.pre.partialPivLu().solve(eta_star);
  } else {
    beta.head(m) = eta_star;
  }
  return beta;
}

Eigen::VectorXd solve_information(const Eigen::MatrixXd& info,
                                  const Eigen::VectorXd& rhs, double ridge,
                                  bool* used_fallback) {
  Eigen::MatrixXd system = info;
  if (ridge > 0.0)
    system.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  Eigen::VectorXd delta = ldlt.solve(rhs);
  const bool ok = ldlt.info() == Eigen::Success && delta.allFinite() &&
                  (info * delta - rhs).norm() <=
                      1e-6 * (1.0 + rhs.norm()) + 1e-8 * info.norm();
  if (ok) return delta;
  // Singular or badly conditioned: fall back to a small trace-scaled ridge.
  const double lam = 1e-8 * info.trace() + 1e-12;
  system = info;
  system.diagonal().array() += lam;
  Eigen::LDLT<Eigen::MatrixXd> ldlt2(system);
  delta = ldlt2.solve(rhs);
  if (ldlt2.info() != Eigen::Success || !delta.allFinite())
    throw NumericalError(
        "singular Fisher information; consider a positive ridge control");
  if (used_fallback) *used_fallback = true;
  return delta;
}

void fill_standard_errors(FittedModel& out) {
  const int q = static_cast<int>(out.beta.size());
  out.std_errors = Eigen::VectorXd::Constant(
      q, std::numeric_limits<double>::quiet_NaN());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(out.fisher_information);
  if (ldlt.info() != Eigen::Success) return;
  const Eigen::MatrixXd inv =
      ldlt.solve(Eigen::MatrixXd::Identity(q, q));
  const double scale = out.fisher_information.diagonal().maxCoeff();
  for (int k = 0; k < q; ++k) {
    const double v = inv(k, k);
    // Flag non-identifiable directions instead of reporting huge numbers.
    if (std::isfinite(v) && v > 0.0 && v < 1e12 / std::max(scale, 1e-300))
      out.std_errors[k] = std::sqrt(v);
  }
}

}  // namespace

FittedModel fisher_scoring(const ModelSpec& raw_spec, const Dataset& data,
                           const FitControls& controls) {
  validate(data);
  ModelSpec spec = normalized(raw_spec);
  if (spec.J != data.J())
    throw DomainError("model J does not match the dataset");
  if (spec.p != data.p())
    throw DomainError("model p does not match the dataset");

  FittedModel out;
  out.spec = spec;
  out.n_effective = data.n_effective();

  const std::span<const Observation> obs(data.observations);
  Eigen::VectorXd beta = initial_beta(spec, data);

  double ll;
  try {
    ll = total_log_likelihood(spec, beta, obs);
  } catch (const ConstraintViolation& e) {
    throw ModelUndefined(std::string("support infeasible at initialization: ") +
                         e.what());
  }
  out.loglik_trace.push_back(ll);

  const double score_tol = controls.tol * std::max(1.0, out.n_effective);
  // Log-likelihood changes below this are indistinguishable from summation
  // roundoff; the polish phase may move beta freely inside this band.
  const double noise_slack = 1e-11 * (std::fabs(ll) + 1.0);
  bool converged = false;
  int it = 0;
  std::string diagnostic;
  double score_norm = std::numeric_limits<double>::infinity();
  double rel_change = std::numeric_limits<double>::infinity();
  bool want_polish = false;
  Eigen::MatrixXd info;

  for (it = 0; it < controls.max_iter; ++it) {
    ScoreInfo si = score_and_information(spec, beta, obs);
    info = si.information;
    score_norm = si.score.norm();

    // Both criteria: small score and a flat accepted step.
    if (rel_change <= controls.loglik_rel_tol) {
      if (score_norm <= score_tol) {
        converged = true;
      } else {
        // Flat in the log-likelihood but the score is still large: monotone
        // halving cannot make further progress at double resolution.
        want_polish = true;
      }
      break;
    }

    bool fallback = false;
    Eigen::VectorXd delta =
        solve_information(info, si.score, controls.ridge, &fallback);
    if (fallback && diagnostic.empty())
      diagnostic = "information near-singular; trace ridge applied";

    double step = 1.0;
    bool accepted = false;
    bool any_evaluable = false;
    for (int h = 0; h <= controls.max_halvings; ++h) {
      const Eigen::VectorXd cand = beta + step * delta;
      try {
        const double cand_ll = total_log_likelihood(spec, cand, obs);
        any_evaluable = true;
        if (cand_ll >= ll) {
          rel_change = std::fabs(cand_ll - ll) / (std::fabs(ll) + 1.0);
          beta = cand;
          ll = cand_ll;
          accepted = true;
          break;
        }
      } catch (const ConstraintViolation&) {
        // infeasible candidate: halve
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!any_evaluable)
        throw ModelUndefined(
            "model undefined on data: no feasible step after " +
            std::to_string(controls.max_halvings) + " halvings");
      // Candidates evaluate but none improves: the ascent has hit the
      // resolution of the log-likelihood. Hand over to the score polish.
      want_polish = true;
      break;
    }
    out.loglik_trace.push_back(ll);
  }

  if (want_polish && !converged) {
    // Newton polish at numerically constant log-likelihood: accept full
    // steps that strictly shrink the score norm while the log-likelihood
    // stays inside the roundoff band. Quadratic convergence takes over where
    // line-searched ascent cannot see its own progress.
    for (int k = 0; k < 15; ++k) {
      ScoreInfo si = score_and_information(spec, beta, obs);
      info = si.information;
      score_norm = si.score.norm();
      if (score_norm <= score_tol) {
        converged = true;
        break;
      }
      bool fallback = false;
      Eigen::VectorXd delta;
      try {
        delta = solve_information(info, si.score, controls.ridge, &fallback);
      } catch (const NumericalError&) {
        break;
      }
      const Eigen::VectorXd cand = beta + delta;
      double cand_ll, cand_norm;
      try {
        cand_ll = total_log_likelihood(spec, cand, obs);
        cand_norm = score_and_information(spec, cand, obs).score.norm();
      } catch (const Error&) {
        break;
      }
      if (cand_ll < ll - noise_slack || cand_norm >= score_norm) break;
      beta = cand;
      ll = std::max(ll, cand_ll);
    }
    ll = total_log_likelihood(spec, beta, obs);
  }

  if (!converged) {
    // Refresh score and information at the final iterate.
    try {
      ScoreInfo fin = score_and_information(spec, beta, obs);
      info = fin.information;
      score_norm = fin.score.norm();
    } catch (const Error&) {
      // keep the last available values
    }
    if (diagnostic.empty()) {
      std::ostringstream os;
      if (it >= controls.max_iter)
        os << "no convergence after " << controls.max_iter
           << " iterations; final score norm " << score_norm;
      else
        os << "score stalled at log-likelihood resolution; final score norm "
           << score_norm;
      diagnostic = os.str();
    }
  }

  out.beta = beta;
  out.log_lik = ll;
  out.iterations = it;
  out.converged = converged;
  out.fisher_information = info;
  const double k = static_cast<double>(beta.size());
  out.aic = -2.0 * ll + 2.0 * k;
  out.bic = -2.0 * ll + std::log(out.n_effective) * k;
  out.diagnostic = diagnostic;
  fill_standard_errors(out);
  return out;
}

FittedModel fisher_scoring(const ModelSpec& spec,
                           std::span<const Observation> obs,
                           const FitControls& controls) {
  Dataset data;
  data.observations.assign(obs.begin(), obs.end());
  ModelSpec norm = normalized(spec);
  data.category_labels = norm.category_labels;
  for (int c = 0; c < norm.p; ++c)
    data.covariate_names.push_back("x" + std::to_string(c + 1));
  data.provenance = "in-memory";
  return fisher_scoring(norm, data, controls);
}

ProbabilityVector predict_probabilities(const FittedModel& fitted,
                                        const Eigen::VectorXd& x) {
  const Eigen::VectorXd full = predict_full(fitted, x);
  return ProbabilityVector(full.head(full.size() - 1));
}

Eigen::VectorXd predict_full(const FittedModel& fitted,
                             const Eigen::VectorXd& x) {
  return model_probabilities(fitted.spec, fitted.beta, x);
}

int classify_index(const FittedModel& fitted, const Eigen::VectorXd& x) {
  const Eigen::VectorXd pi = predict_full(fitted, x);
  int best = 0;
  for (int j = 1; j < pi.size(); ++j)
    if (pi[j] > pi[best]) best = j;
  return best;
}

std::string classify(const FittedModel& fitted, const Eigen::VectorXd& x) {
  return fitted.spec.category_labels[classify_index(fitted, x)];
}

}  // namespace catglm
