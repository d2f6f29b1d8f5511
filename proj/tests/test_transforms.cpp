#include "doctest.h"

#include <cmath>
#include <random>

#include "catglm/diagnostics.hpp"
#include "catglm/transforms.hpp"
#include "helpers.hpp"

using namespace catglm;
using test_helpers::make_spec;
using test_helpers::vec;

namespace {

const PlanName kAllPlans[] = {
    PlanName::laara_gumbel,
    PlanName::pareto_z0,
    PlanName::cum_seq_exponential,
    PlanName::ref_adj_logistic,
    PlanName::reference_permutation,
    PlanName::canonical_transposition,
    PlanName::reversal,
    PlanName::sequential_last_transposition,
};

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("cum_seq_exponential plan on the proportional design") {
  const ModelSpec base = make_spec(RatioKind::cumulative, "exponential",
                                   DesignKind::proportional, 4, 1);
  const TransformPlan plan = make_plan(PlanName::cum_seq_exponential, base);
  CHECK(plan.target.ratio == RatioKind::sequential);
  CHECK(plan.beta_map_kind == "identity");
  const Eigen::MatrixXd A = make_transform(TransformName::A, 4).matrix;
  CHECK((plan.eta_matrix - A).norm() == 0.0);
  // effective target design is A * Z_p
  const Eigen::VectorXd x = vec({2.0});
  const Eigen::MatrixXd Zp = build_design(base.design, x, 4);
  const Eigen::MatrixXd Ztgt = build_design(plan.target.design, x, 4);
  CHECK((Ztgt - A * Zp).norm() == 0.0);
}

TEST_CASE("ref_adj_logistic witnesses the complete-design equivalence") {
  const ModelSpec base =
      make_spec(RatioKind::reference, "logistic", DesignKind::complete, 4, 2);
  const TransformPlan plan = make_plan(PlanName::ref_adj_logistic, base);
  CHECK(plan.target.ratio == RatioKind::adjacent);
  CHECK(design_equivalent(base.design, plan.target.design, 4, 2));
}

TEST_CASE("laara beta map and eta map agree") {
  const ModelSpec base = make_spec(RatioKind::sequential, "gumbelmin",
                                   DesignKind::proportional, 4, 1);
  const TransformPlan plan = make_plan(PlanName::laara_gumbel, base);
  CHECK(plan.target.ratio == RatioKind::cumulative);
  CHECK(plan.beta_map_kind == "closed-form");
  Eigen::VectorXd beta(4);
  beta << -0.6, 0.2, 0.9, 0.4;
  // alpha'_j = ln sum_{k<=j} exp(alpha_k), delta' = delta
  const Eigen::VectorXd mapped = plan.beta_map(beta);
  double acc = 0.0;
  for (int j = 0; j < 3; ++j) {
    acc += std::exp(beta[j]);
    CHECK(mapped[j] == doctest::Approx(std::log(acc)).epsilon(1e-12));
  }
  CHECK(mapped[3] == beta[3]);
  // the beta route must reproduce the source probabilities too
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(1);
    x[0] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const Eigen::VectorXd src = model_probabilities(plan.source, beta, x);
    const Eigen::VectorXd tgt = model_probabilities(plan.target, mapped, x);
    CHECK((src - tgt).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("plan hypotheses are enforced") {
  CHECK_THROWS_AS(
      make_plan(PlanName::laara_gumbel,
                make_spec(RatioKind::sequential, "gumbelmin", DesignKind::complete, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::laara_gumbel,
                make_spec(RatioKind::cumulative, "gumbelmin", DesignKind::proportional, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::cum_seq_exponential,
                make_spec(RatioKind::cumulative, "logistic", DesignKind::proportional, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::reversal,
                make_spec(RatioKind::sequential, "normal", DesignKind::complete, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::reversal,
                make_spec(RatioKind::cumulative, "exponential", DesignKind::complete, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::sequential_last_transposition,
                make_spec(RatioKind::sequential, "gumbelmin", DesignKind::complete, 4, 1)),
      HypothesisError);
  // aux requirements
  CHECK_THROWS_AS(
      make_plan(PlanName::canonical_transposition,
                make_spec(RatioKind::reference, "logistic", DesignKind::complete, 4, 1)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::canonical_transposition,
                make_spec(RatioKind::reference, "logistic", DesignKind::complete, 4, 1),
                PlanAux(3)),
      HypothesisError);
  CHECK_THROWS_AS(
      make_plan(PlanName::reference_permutation,
                make_spec(RatioKind::reference, "normal", DesignKind::complete, 4, 1),
                PlanAux(std::vector<int>{3, 1, 2, 0})),
      HypothesisError);
}

TEST_CASE("every plan holds pointwise at 1e-10 over random feasible draws") {
  for (PlanName name : kAllPlans) {
    for (int J : {3, 4, 5}) {
      std::mt19937_64 rng(1000 + 17 * static_cast<int>(name) + J);
      for (int t = 0; t < 20; ++t) {
        const PlanCase pc = sample_plan_case(name, J, rng);
        const TransformPlan plan = make_plan(name, pc.base, pc.aux);
        const EqualityReport report =
            verify_pointwise_equality(plan, pc.beta, pc.x_grid);
        CAPTURE(to_string(name));
        CAPTURE(J);
        CAPTURE(t);
        CHECK(report.point_errors.empty());
        CHECK(report.points_checked == 50);
        CHECK(report.max_deviation <= 1e-10);
      }
    }
  }
}

TEST_CASE("permute_model composition") {
  ModelSpec spec = make_spec(RatioKind::adjacent, "normal", DesignKind::complete, 4, 1);
  spec.category_labels = {"a", "b", "c", "d"};
  spec = normalized(spec);

  const ModelSpec same = permute_model(spec, identity_permutation(4));
  CHECK(same.category_order == identity_permutation(4));

  const std::vector<int> rev = reverse_permutation_of(4);
  const ModelSpec reversed = permute_model(spec, rev);
  CHECK(reversed.category_order == std::vector<int>{3, 2, 1, 0});

  const std::vector<int> sigma = {2, 0, 3, 1};
  const ModelSpec back =
      permute_model(permute_model(spec, sigma), inverse_permutation(sigma));
  CHECK(back.category_order == identity_permutation(4));
}

TEST_CASE("helper permutations") {
  CHECK(reverse_permutation_of(4) == std::vector<int>{3, 2, 1, 0});
  CHECK(last_two_transposition(5) == std::vector<int>{0, 1, 2, 4, 3});
  CHECK(parse_plan("reversal") == PlanName::reversal);
  for (PlanName name : kAllPlans) CHECK(parse_plan(to_string(name)) == name);
  CHECK_THROWS_AS(parse_plan("mystery"), DomainError);
}

}  // TEST_SUITE
