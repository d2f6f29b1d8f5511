#include "doctest.h"

#include <cmath>
#include <random>

#include "catglm/diagnostics.hpp"
#include "catglm/ratios.hpp"
#include "helpers.hpp"

using namespace catglm;
using test_helpers::vec;

namespace {

const RatioKind kKinds[] = {RatioKind::reference, RatioKind::adjacent,
                            RatioKind::cumulative, RatioKind::sequential};

}  // namespace

TEST_SUITE("ratios") {

TEST_CASE("probability vector invariants") {
  CHECK_NOTHROW(ProbabilityVector(vec({0.2, 0.3})));
  CHECK_THROWS_AS(ProbabilityVector(vec({0.0, 0.3})), DomainError);
  CHECK_THROWS_AS(ProbabilityVector(vec({-0.1, 0.3})), DomainError);
  CHECK_THROWS_AS(ProbabilityVector(vec({0.6, 0.5})), DomainError);
  const ProbabilityVector pi(vec({0.2, 0.3}));
  CHECK(pi.J() == 3);
  CHECK(pi.last() == doctest::Approx(0.5));
  CHECK(pi.full()[2] == doctest::Approx(0.5));
}

TEST_CASE("ratio_apply examples") {
  const ProbabilityVector pi(vec({0.2, 0.3}));
  const Eigen::VectorXd ref = ratio_apply(RatioKind::reference, pi);
  CHECK(ref[0] == doctest::Approx(0.2 / 0.7).epsilon(1e-14));
  CHECK(ref[1] == doctest::Approx(0.375).epsilon(1e-14));
  const Eigen::VectorXd cum = ratio_apply(RatioKind::cumulative, pi);
  CHECK(cum[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cum[1] == doctest::Approx(0.5).epsilon(1e-14));
  const Eigen::VectorXd adj = ratio_apply(RatioKind::adjacent, pi);
  CHECK(adj[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(adj[1] == doctest::Approx(0.375).epsilon(1e-14));
  const Eigen::VectorXd seq = ratio_apply(RatioKind::sequential, pi);
  CHECK(seq[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(seq[1] == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("ratio_invert examples") {
  const ProbabilityVector cum = ratio_invert(RatioKind::cumulative, vec({0.2, 0.5}));
  CHECK(cum.values[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cum.values[1] == doctest::Approx(0.3).epsilon(1e-14));
  const ProbabilityVector ref = ratio_invert(RatioKind::reference, vec({0.5, 0.5}));
  CHECK(ref.values[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(ref.values[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const ProbabilityVector seq = ratio_invert(RatioKind::sequential, vec({0.2, 0.375}));
  CHECK(seq.values[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(seq.values[1] == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("invalid ratio vectors") {
  CHECK_THROWS_AS(ratio_invert(RatioKind::cumulative, vec({0.5, 0.2})),
                  InvalidRatio);
  CHECK_THROWS_AS(ratio_invert(RatioKind::cumulative, vec({0.5, 0.5})),
                  InvalidRatio);
  CHECK_THROWS_AS(ratio_invert(RatioKind::reference, vec({0.5, 1.0})),
                  InvalidRatio);
  CHECK_THROWS_AS(ratio_invert(RatioKind::sequential, vec({0.0, 0.5})),
                  InvalidRatio);
}

TEST_CASE("round trip over random probability vectors") {
  std::mt19937_64 rng(20240811);
  for (RatioKind kind : kKinds) {
    for (int J = 2; J <= 8; ++J) {
      for (int t = 0; t < 1000; ++t) {
        const Eigen::VectorXd pi = test_helpers::random_pi(J, rng);
        const ProbabilityVector pv(pi);
        const Eigen::VectorXd r = ratio_apply(kind, pv);
        const ProbabilityVector back = ratio_invert(kind, r);
        CHECK((back.values - pi).cwiseAbs().maxCoeff() <= 1e-12);
        const Eigen::VectorXd r2 = ratio_apply(kind, back);
        CHECK((r2 - r).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("all four ratios coincide at J=2") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const ProbabilityVector pi(test_helpers::random_pi(2, rng));
    const double base = ratio_apply(RatioKind::reference, pi)[0];
    for (RatioKind kind : kKinds)
      CHECK(ratio_apply(kind, pi)[0] == doctest::Approx(base).epsilon(1e-15));
  }
}

TEST_CASE("cumulative image is strictly increasing") {
  std::mt19937_64 rng(11);
  for (int J = 3; J <= 8; ++J) {
    for (int t = 0; t < 100; ++t) {
      const ProbabilityVector pi(test_helpers::random_pi(J, rng));
      const Eigen::VectorXd r = ratio_apply(RatioKind::cumulative, pi);
      for (int j = 0; j + 1 < J - 1; ++j) CHECK(r[j] < r[j + 1]);
    }
  }
}

TEST_CASE("cumulative jacobian is the constant bidiagonal matrix") {
  const Eigen::VectorXd p = vec({0.2, 0.5});
  const Eigen::VectorXd eta = vec({-1.0, 0.3});
  const Eigen::MatrixXd jac =
      ratio_jacobian(RatioKind::cumulative, p, eta, parse_cdf("logistic"));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, 0, 1;
  CHECK((jac - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reference jacobian matches finite differences at p=(0.5,0.5)") {
  const CdfSpec logistic = parse_cdf("logistic");
  const Eigen::VectorXd p = vec({0.5, 0.5});
  Eigen::VectorXd eta(2);
  eta << quantile(logistic, 0.5), quantile(logistic, 0.5);
  const Eigen::MatrixXd jac =
      ratio_jacobian(RatioKind::reference, p, eta, logistic);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd up = p, dn = p;
    up[i] += h;
    dn[i] -= h;
    const Eigen::VectorXd fd =
        (ratio_invert(RatioKind::reference, up).values -
         ratio_invert(RatioKind::reference, dn).values) /
        (2.0 * h);
    for (int j = 0; j < 2; ++j) CHECK(std::fabs(jac(i, j) - fd[j]) <= 1e-6);
  }
  // closed-form spot value: d pi_1 / d r_1 = 8/9 at this point
  CHECK(jac(0, 0) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("jacobians match the finite-difference oracle for every kind") {
  for (RatioKind kind : kKinds) {
    for (int J : {2, 3, 4, 5, 8}) {
      const auto res = jacobian_fd_check(kind, J, 50, 99 + J);
      CHECK(res.max_abs_error <= 1e-6);
    }
  }
}

TEST_CASE("sequential jacobian at J=4 against the oracle") {
  const auto res = jacobian_fd_check(RatioKind::sequential, 4, 200, 5);
  CHECK(res.max_abs_error <= 1e-6);
}

TEST_CASE("ratio names round trip") {
  for (RatioKind kind : kKinds) CHECK(parse_ratio(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_ratio("nonsense"), DomainError);
}

}  // TEST_SUITE
