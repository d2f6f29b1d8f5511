#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catglm/errors.hpp"

namespace catglm {

enum class DesignKind { complete, proportional, z0, minimal, custom };

// Layout of one covariate in a custom design: either a single slope column
// shared by the rows in `rows`, or one independent slope column per included
// row. Custom designs cover everything between proportional and complete.
struct CovariateLayout {
  bool shared = true;
  std::vector<bool> rows;  // size J-1; which predictors include the covariate
};

// A design matrix generator. The beta layout is fixed across the library:
// (alpha_1, ..., alpha_{J-1}, then slope blocks in category order), so that
// constant matrices act purely on the eta side. `pre` is an optional
// (J-1)x(J-1) left factor: the effective matrix is pre * Z_kind(x).
struct DesignSpec {
  DesignKind kind = DesignKind::complete;
  std::vector<CovariateLayout> custom;  // used when kind == custom, size p
  Eigen::MatrixXd pre;                  // empty means identity

  bool has_pre() const { return pre.size() > 0; }
};

int design_columns(const DesignSpec& spec, int J, int p);
Eigen::MatrixXd build_design(const DesignSpec& spec, const Eigen::VectorXd& x,
                             int J);

std::string to_string(const DesignSpec& spec);
// Accepts "complete", "proportional", "z0", "minimal" and
// "custom:<layout;...>" where each layout is s:<rowmask> (shared slope) or
// i:<rowmask> (independent slopes), e.g. "custom:s:11;i:10" for p=2, J=3.
DesignSpec parse_design(const std::string& name);

// Constant transform matrices used by the equivalence and invariance
// propositions.
enum class TransformName {
  A,             // lower bidiagonal, 1 on diagonal, -1 below
  A_transpose,
  A_inverse,     // lower triangle of ones
  P_sigma,       // restricted permutation matrix of a sigma fixing J
  P_reverse,     // anti-diagonal
  B_tau,         // identity with column tau(J) replaced by -1
  A_tilde_tau,   // identity with last diagonal entry -1
  identity,
};

struct TransformMatrix {
  TransformName name;
  Eigen::MatrixXd matrix;  // (J-1) x (J-1), integer-valued
};

TransformMatrix make_transform(TransformName name, int J);
// B_tau: `category` is the 0-based index tau(J) in {0, ..., J-2}.
TransformMatrix make_transform(TransformName name, int J, int category);
// P_sigma: `sigma` is a 0-based permutation of {0, ..., J-1} with
// sigma[J-1] == J-1.
TransformMatrix make_transform(TransformName name, int J,
                               const std::vector<int>& sigma);

// Two design generators are equivalent when they span the same space of
// linear maps x -> eta. Checked numerically: both generators are evaluated at
// >= p+J+2 distinct x draws, the rows stacked, and column spans compared via
// rank tests (singular values below 1e-9 times the largest are treated as
// zero).
using DesignGen = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
bool design_equivalent(const DesignGen& a, const DesignGen& b, int p,
                       std::uint64_t seed = 0);
bool design_equivalent(const DesignSpec& a, const DesignSpec& b, int J, int p,
                       std::uint64_t seed = 0);

// Domain of a single explanatory variable for the cumulative compatibility
// check.
struct CovariateDomain {
  enum class Kind { categorical, real_line, positive_half_line, interval };
  Kind kind = Kind::real_line;
  double lower = 0.0;  // interval only
  double upper = 0.0;
};

struct ConstraintReport {
  bool valid = true;
  std::vector<std::string> failures;
};

// Checks whether eta_j(x) < eta_{j+1}(x) holds over the whole domain, the
// condition for a cumulative model to be defined. Categorical domains use
// the exact intercept/slope conditions; intervals are checked at the
// endpoints plus a 100-point grid.
ConstraintReport validate_cumulative_constraints(const DesignSpec& spec,
                                                 const Eigen::VectorXd& beta,
                                                 const CovariateDomain& domain,
                                                 int J, int p);

}  // namespace catglm
