#include "catglm/transforms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "catglm/likelihood.hpp"

namespace catglm {

namespace {

[[noreturn]] void unmet(const std::string& what) { throw HypothesisError(what); }

void require(bool cond, const std::string& what) {
  if (!cond) unmet(what);
}

Eigen::MatrixXd chained_pre(const DesignSpec& design, const Eigen::MatrixXd& T) {
  return design.has_pre() ? Eigen::MatrixXd(T * design.pre) : T;
}

// Running log-sum-exp in location/scale units: the Gumbel min reparametrization
// eta'_j = u + s * log sum_{k<=j} exp((eta_k - u)/s).
Eigen::VectorXd laara_eta_map(const Eigen::VectorXd& eta, double u, double s) {
  Eigen::VectorXd out(eta.size());
  double acc = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double z = (eta[j] - u) / s;
    const double hi = std::max(acc, z);
    acc = hi + std::log(std::exp(acc - hi) + std::exp(z - hi));
    out[j] = u + s * acc;
  }
  return out;
}

Eigen::VectorXd pareto_eta_map(const Eigen::VectorXd& eta, double u, double s) {
  Eigen::VectorXd out(eta.size());
  out[0] = eta[0];
  for (Eigen::Index j = 1; j < eta.size(); ++j) {
    const double zj = (eta[j] - u) / s;
    const double zp = (eta[j - 1] - u) / s;
    out[j] = u + s * (zj / zp);
  }
  return out;
}

}  // namespace

std::vector<int> reverse_permutation_of(int J) {
  std::vector<int> s(J);
  for (int j = 0; j < J; ++j) s[j] = J - 1 - j;
  return s;
}

std::vector<int> last_two_transposition(int J) {
  std::vector<int> s = identity_permutation(J);
  std::swap(s[J - 2], s[J - 1]);
  return s;
}

ModelSpec permute_model(const ModelSpec& spec, const std::vector<int>& sigma) {
  ModelSpec out = normalized(spec);
  if (!is_permutation(sigma, out.J))
    throw DomainError("permute_model needs a permutation of {0..J-1}");
  std::vector<int> composed(out.J);
  for (int j = 0; j < out.J; ++j) composed[j] = sigma[out.category_order[j]];
  out.category_order = std::move(composed);
  return out;
}

TransformPlan make_plan(PlanName name, const ModelSpec& raw_base,
                        const PlanAux& aux) {
  ModelSpec base = normalized(raw_base);
  require(base.category_order == identity_permutation(base.J),
          "plans start from a base spec with identity category order");
  const int J = base.J;
  const double u = base.cdf.location;
  const double s = base.cdf.scale;

  TransformPlan plan;
  plan.name = name;
  plan.source = base;
  plan.target = base;
  plan.beta_map_kind = "identity";

  switch (name) {
    case PlanName::laara_gumbel: {
      require(base.ratio == RatioKind::sequential,
              "Laara equivalence requires the sequential ratio");
      require(base.cdf.family == CdfFamily::gumbel_min,
              "Laara equivalence requires the Gumbel min cdf");
      require(base.design.kind == DesignKind::proportional &&
                  !base.design.has_pre(),
              "Laara equivalence requires the proportional design");
      plan.target.ratio = RatioKind::cumulative;
      plan.eta_map = [u, s](const Eigen::VectorXd& eta) {
        return laara_eta_map(eta, u, s);
      };
      plan.beta_map_kind = "closed-form";
      const int m = J - 1;
      plan.beta_map = [u, s, m](const Eigen::VectorXd& beta) {
        Eigen::VectorXd out = beta;
        out.head(m) = laara_eta_map(beta.head(m), u, s);
        return out;
      };
      break;
    }
    case PlanName::pareto_z0: {
      require(base.ratio == RatioKind::cumulative,
              "Pareto Z0 equivalence requires the cumulative ratio");
      require(base.cdf.family == CdfFamily::pareto,
              "Pareto Z0 equivalence requires a Pareto cdf");
      require(base.design.kind == DesignKind::z0 && !base.design.has_pre(),
              "Pareto Z0 equivalence requires the Z0 design");
      plan.target.ratio = RatioKind::sequential;
      plan.eta_map = [u, s](const Eigen::VectorXd& eta) {
        return pareto_eta_map(eta, u, s);
      };
      // The slope constraints delta_j = 0 for j <= J-2 are what make the
      // mapped predictor linear; no closed-form beta map is asserted.
      plan.beta_map_kind = "eta-level-only";
      break;
    }
    case PlanName::cum_seq_exponential: {
      require(base.ratio == RatioKind::cumulative,
              "cumulative/sequential equality requires the cumulative ratio");
      require(base.cdf.family == CdfFamily::exponential,
              "cumulative/sequential equality requires the exponential cdf");
      require(u == 0.0, "cumulative/sequential equality requires location 0");
      plan.target.ratio = RatioKind::sequential;
      plan.eta_matrix = make_transform(TransformName::A, J).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
    case PlanName::ref_adj_logistic: {
      require(base.ratio == RatioKind::reference,
              "reference/adjacent equality requires the reference ratio");
      require(base.cdf.family == CdfFamily::logistic,
              "reference/adjacent equality requires the logistic cdf");
      require(u == 0.0, "reference/adjacent equality requires location 0");
      plan.target.ratio = RatioKind::adjacent;
      plan.eta_matrix = make_transform(TransformName::A_transpose, J).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
    case PlanName::reference_permutation: {
      require(base.ratio == RatioKind::reference,
              "reference permutation invariance requires the reference ratio");
      const auto* sig = std::get_if<std::vector<int>>(&aux);
      require(sig != nullptr,
              "reference_permutation needs the permutation as aux");
      require(is_permutation(*sig, J) && (*sig)[J - 1] == J - 1,
              "reference_permutation needs a permutation fixing the reference "
              "category");
      plan.source = permute_model(base, *sig);
      plan.eta_matrix = make_transform(TransformName::P_sigma, J, *sig).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
    case PlanName::canonical_transposition: {
      require(base.ratio == RatioKind::reference,
              "canonical transposition requires the reference ratio");
      require(base.cdf.family == CdfFamily::logistic,
              "canonical transposition requires the logistic cdf");
      require(u == 0.0, "canonical transposition requires location 0");
      const auto* k = std::get_if<int>(&aux);
      require(k != nullptr,
              "canonical_transposition needs the transposed category as aux");
      require(*k >= 0 && *k < J - 1,
              "transposed category must be one of {0..J-2}");
      std::vector<int> tau = identity_permutation(J);
      std::swap(tau[*k], tau[J - 1]);
      plan.source = permute_model(base, tau);
      plan.eta_matrix = make_transform(TransformName::B_tau, J, *k).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
    case PlanName::reversal: {
      require(base.ratio == RatioKind::adjacent ||
                  base.ratio == RatioKind::cumulative,
              "reversal invariance requires the adjacent or cumulative ratio");
      require(!has_restricted_support(base.cdf),
              "reversal needs a cdf with a representable reflection");
      plan.source = permute_model(base, reverse_permutation_of(J));
      plan.target.cdf = reflect(base.cdf);
      plan.eta_matrix =
          -make_transform(TransformName::P_reverse, J).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
    case PlanName::sequential_last_transposition: {
      require(base.ratio == RatioKind::sequential,
              "last-two transposition requires the sequential ratio");
      require(is_symmetric(base.cdf) && u == 0.0,
              "last-two transposition requires a symmetric cdf");
      plan.source = permute_model(base, last_two_transposition(J));
      plan.eta_matrix = make_transform(TransformName::A_tilde_tau, J).matrix;
      plan.target.design.pre = chained_pre(base.design, plan.eta_matrix);
      break;
    }
  }

  if (plan.eta_matrix.size() > 0) {
    const Eigen::MatrixXd M = plan.eta_matrix;
    plan.eta_map = [M](const Eigen::VectorXd& eta) {
      return Eigen::VectorXd(M * eta);
    };
  }
  if (plan.beta_map_kind == "identity")
    plan.beta_map = [](const Eigen::VectorXd& b) { return b; };
  return plan;
}

EqualityReport verify_pointwise_equality(
    const TransformPlan& plan, const Eigen::VectorXd& beta,
    const std::vector<Eigen::VectorXd>& x_grid) {
  EqualityReport report;
  const bool eta_level = plan.beta_map_kind == "eta-level-only" ||
                         plan.name == PlanName::laara_gumbel;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const Eigen::VectorXd& x = x_grid[i];
    try {
      const Eigen::VectorXd pi_src =
          model_probabilities(plan.source, beta, x);
      Eigen::VectorXd pi_tgt;
      if (eta_level) {
        const Eigen::VectorXd eta_src =
            build_design(plan.source.design, x, plan.source.J) * beta;
        pi_tgt = probabilities_from_eta(plan.target, plan.eta_map(eta_src));
      } else {
        pi_tgt = model_probabilities(plan.target, plan.beta_map(beta), x);
      }
      report.max_deviation = std::max(
          report.max_deviation, (pi_src - pi_tgt).cwiseAbs().maxCoeff());
      ++report.points_checked;
    } catch (const Error& e) {
      report.point_errors.emplace_back(static_cast<int>(i), e.what());
    }
  }
  return report;
}

std::string to_string(PlanName name) {
  switch (name) {
    case PlanName::laara_gumbel: return "laara_gumbel";
    case PlanName::pareto_z0: return "pareto_z0";
    case PlanName::cum_seq_exponential: return "cum_seq_exponential";
    case PlanName::ref_adj_logistic: return "ref_adj_logistic";
    case PlanName::reference_permutation: return "reference_permutation";
    case PlanName::canonical_transposition: return "canonical_transposition";
    case PlanName::reversal: return "reversal";
    case PlanName::sequential_last_transposition:
      return "sequential_last_transposition";
  }
  return "?";
}

PlanName parse_plan(const std::string& name) {
  if (name == "laara_gumbel") return PlanName::laara_gumbel;
  if (name == "pareto_z0") return PlanName::pareto_z0;
  if (name == "cum_seq_exponential") return PlanName::cum_seq_exponential;
  if (name == "ref_adj_logistic") return PlanName::ref_adj_logistic;
  if (name == "reference_permutation") return PlanName::reference_permutation;
  if (name == "canonical_transposition")
    return PlanName::canonical_transposition;
  if (name == "reversal") return PlanName::reversal;
  if (name == "sequential_last_transposition")
    return PlanName::sequential_last_transposition;
  throw DomainError("unknown plan name: " + name);
}

}  // namespace catglm
