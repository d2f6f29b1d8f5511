#include "catglm/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace catglm {

namespace {

double urand(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

unsigned pick(std::mt19937_64& rng) {
  return static_cast<unsigned>(rng() >> 33);
}

}  // namespace

Eigen::VectorXd sample_ratio_vector(RatioKind kind, int J,
                                    std::mt19937_64& rng) {
  const int m = J - 1;
  Eigen::VectorXd p(m);
  if (kind == RatioKind::cumulative) {
    // Increasing with a guaranteed gap, inside (0.05, 0.95).
    Eigen::VectorXd gaps(m + 1);
    double total = 0.0;
    for (int j = 0; j <= m; ++j) {
      gaps[j] = urand(rng, 0.5, 1.5);
      total += gaps[j];
    }
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      acc += gaps[j];
      p[j] = 0.05 + 0.9 * acc / total;
    }
  } else {
    for (int j = 0; j < m; ++j) p[j] = urand(rng, 0.1, 0.9);
  }
  return p;
}

JacobianCheckResult jacobian_fd_check(RatioKind kind, int J, int trials,
                                      std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  const CdfSpec logistic;  // p = F(eta) holds exactly under the quantile map
  JacobianCheckResult result;
  result.trials = trials;
  const int m = J - 1;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd p = sample_ratio_vector(kind, J, rng);
    Eigen::VectorXd eta(m);
    for (int i = 0; i < m; ++i) eta[i] = quantile(logistic, p[i]);
    const Eigen::MatrixXd jac = ratio_jacobian(kind, p, eta, logistic);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd up = p, dn = p;
      up[i] += h;
      dn[i] -= h;
      const Eigen::VectorXd fd =
          (ratio_invert(kind, up).values - ratio_invert(kind, dn).values) /
          (2.0 * h);
      for (int j = 0; j < m; ++j)
        result.max_abs_error =
            std::max(result.max_abs_error, std::fabs(jac(i, j) - fd[j]));
    }
  }
  return result;
}

double score_fd_relative_error(const ModelSpec& spec,
                               const Eigen::VectorXd& beta,
                               std::span<const Observation> obs, double h) {
  const ScoreInfo si = score_and_information(spec, beta, obs);
  double max_diff = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    Eigen::VectorXd up = beta, dn = beta;
    up[k] += h;
    dn[k] -= h;
    const double fd = (total_log_likelihood(spec, up, obs) -
                       total_log_likelihood(spec, dn, obs)) /
                      (2.0 * h);
    max_diff = std::max(max_diff, std::fabs(fd - si.score[k]));
  }
  const double scale = std::max(1.0, si.score.cwiseAbs().maxCoeff());
  return max_diff / scale;
}

PlanCase sample_plan_case(PlanName name, int J, std::mt19937_64& rng,
                          int grid_points) {
  PlanCase out;
  ModelSpec& base = out.base;
  base.J = J;
  base.p = 1;
  const int m = J - 1;

  auto any_beta = [&](int dim, double lo, double hi) {
    Eigen::VectorXd b(dim);
    for (int i = 0; i < dim; ++i) b[i] = urand(rng, lo, hi);
    return b;
  };
  // Ordered intercepts with wide gaps plus small slopes keep cumulative
  // predictors ordered (and positive where needed) over |x| <= 1.
  auto ordered_alpha = [&](double first_lo, double first_hi, double gap_lo,
                           double gap_hi) {
    Eigen::VectorXd a(m);
    a[0] = urand(rng, first_lo, first_hi);
    for (int j = 1; j < m; ++j) a[j] = a[j - 1] + urand(rng, gap_lo, gap_hi);
    return a;
  };
  auto grid = [&](double lo, double hi) {
    std::vector<Eigen::VectorXd> g;
    for (int i = 0; i < grid_points; ++i) {
      Eigen::VectorXd x(1);
      x[0] = lo + (hi - lo) * (i + 0.5) / grid_points;
      g.push_back(std::move(x));
    }
    return g;
  };

  switch (name) {
    case PlanName::laara_gumbel: {
      base.ratio = RatioKind::sequential;
      base.cdf = parse_cdf("gumbelmin");
      base.design.kind = DesignKind::proportional;
      out.beta = any_beta(m + 1, -1.0, 1.0);
      out.x_grid = grid(-2.0, 2.0);
      break;
    }
    case PlanName::pareto_z0: {
      base.ratio = RatioKind::cumulative;
      base.cdf = parse_cdf("pareto:" + std::to_string(1 + (pick(rng) % 3)));
      base.design.kind = DesignKind::z0;
      Eigen::VectorXd beta(m + 1);
      beta.head(m) = ordered_alpha(1.2, 1.8, 0.4, 0.8);
      beta[m] = urand(rng, 0.0, 0.3);  // slope only reaches the last row
      out.beta = beta;
      out.x_grid = grid(0.0, 1.0);
      break;
    }
    case PlanName::cum_seq_exponential: {
      base.ratio = RatioKind::cumulative;
      base.cdf = parse_cdf("exponential");
      const bool proportional = urand(rng, 0.0, 1.0) < 0.5;
      base.design.kind =
          proportional ? DesignKind::proportional : DesignKind::complete;
      const Eigen::VectorXd alpha = ordered_alpha(0.4, 0.8, 0.5, 0.9);
      if (proportional) {
        Eigen::VectorXd beta(m + 1);
        beta.head(m) = alpha;
        beta[m] = urand(rng, -0.2, 0.2);
        out.beta = beta;
      } else {
        Eigen::VectorXd beta(2 * m);
        beta.head(m) = alpha;
        for (int j = 0; j < m; ++j) beta[m + j] = urand(rng, -0.15, 0.15);
        out.beta = beta;
      }
      out.x_grid = grid(-1.0, 1.0);
      break;
    }
    case PlanName::ref_adj_logistic: {
      base.ratio = RatioKind::reference;
      base.cdf = parse_cdf("logistic");
      base.design.kind = DesignKind::complete;
      out.beta = any_beta(2 * m, -1.0, 1.0);
      out.x_grid = grid(-2.0, 2.0);
      break;
    }
    case PlanName::reference_permutation: {
      base.ratio = RatioKind::reference;
      const char* families[] = {"normal", "cauchy", "gumbelmax"};
      base.cdf = parse_cdf(families[pick(rng) % 3]);
      base.design.kind = DesignKind::complete;
      out.beta = any_beta(2 * m, -1.0, 1.0);
      std::vector<int> sigma = identity_permutation(J);
      std::shuffle(sigma.begin(), sigma.end() - 1, rng);
      out.aux = sigma;
      out.x_grid = grid(-2.0, 2.0);
      break;
    }
    case PlanName::canonical_transposition: {
      base.ratio = RatioKind::reference;
      base.cdf = parse_cdf("logistic");
      base.design.kind = DesignKind::complete;
      out.beta = any_beta(2 * m, -1.0, 1.0);
      out.aux = static_cast<int>(pick(rng) % m);
      out.x_grid = grid(-2.0, 2.0);
      break;
    }
    case PlanName::reversal: {
      const bool adjacent = urand(rng, 0.0, 1.0) < 0.5;
      base.ratio = adjacent ? RatioKind::adjacent : RatioKind::cumulative;
      const char* families[] = {"logistic", "normal", "gumbelmin"};
      base.cdf = parse_cdf(families[pick(rng) % 3]);
      base.design.kind = DesignKind::complete;
      Eigen::VectorXd beta(2 * m);
      if (adjacent) {
        beta = any_beta(2 * m, -1.0, 1.0);
      } else {
        beta.head(m) = ordered_alpha(-1.0, -0.5, 0.5, 0.9);
        for (int j = 0; j < m; ++j) beta[m + j] = urand(rng, -0.15, 0.15);
      }
      out.beta = beta;
      out.x_grid = grid(-1.0, 1.0);
      break;
    }
    case PlanName::sequential_last_transposition: {
      base.ratio = RatioKind::sequential;
      const char* families[] = {"logistic", "normal", "cauchy"};
      base.cdf = parse_cdf(families[pick(rng) % 3]);
      base.design.kind = DesignKind::complete;
      out.beta = any_beta(2 * m, -1.0, 1.0);
      out.x_grid = grid(-2.0, 2.0);
      break;
    }
  }
  out.base = normalized(out.base);
  return out;
}

}  // namespace catglm
