#include "catglm/design.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <sstream>

namespace catglm {

namespace {

void check_custom(const DesignSpec& spec, int J, int p) {
  if (static_cast<int>(spec.custom.size()) != p)
    throw DomainError("custom design needs one covariate layout per covariate");
  for (const auto& c : spec.custom) {
    if (static_cast<int>(c.rows.size()) != J - 1)
      throw DomainError("custom covariate layout row mask must have J-1 entries");
  }
}

int rank_of(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = 1e-9 * sv[0];
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++r;
  return r;
}

}  // namespace

int design_columns(const DesignSpec& spec, int J, int p) {
  const int m = J - 1;
  switch (spec.kind) {
    case DesignKind::complete:
      return m * (1 + p);
    case DesignKind::proportional:
    case DesignKind::z0:
      return m + p;
    case DesignKind::minimal:
      return m;
    case DesignKind::custom: {
      check_custom(spec, J, p);
      int cols = m;
      for (const auto& c : spec.custom) {
        if (c.shared) {
          cols += 1;
        } else {
          for (bool b : c.rows) cols += b ? 1 : 0;
        }
      }
      return cols;
    }
  }
  throw DomainError("unknown design kind");
}

Eigen::MatrixXd build_design(const DesignSpec& spec, const Eigen::VectorXd& x,
                             int J) {
  const int m = J - 1;
  const int p = static_cast<int>(x.size());
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(m, design_columns(spec, J, p));
  Z.leftCols(m) = Eigen::MatrixXd::Identity(m, m);
  switch (spec.kind) {
    case DesignKind::complete:
      for (int j = 0; j < m; ++j)
        Z.block(j, m + j * p, 1, p) = x.transpose();
      break;
    case DesignKind::proportional:
      for (int j = 0; j < m; ++j) Z.block(j, m, 1, p) = x.transpose();
      break;
    case DesignKind::z0:
      Z.block(m - 1, m, 1, p) = x.transpose();
      break;
    case DesignKind::minimal:
      break;
    case DesignKind::custom: {
      check_custom(spec, J, p);
      int col = m;
      for (int c = 0; c < p; ++c) {
        const auto& lay = spec.custom[c];
        if (lay.shared) {
          for (int j = 0; j < m; ++j)
            if (lay.rows[j]) Z(j, col) = x[c];
          ++col;
        } else {
          for (int j = 0; j < m; ++j)
            if (lay.rows[j]) Z(j, col++) = x[c];
        }
      }
      break;
    }
  }
  if (spec.has_pre()) {
    if (spec.pre.rows() != m || spec.pre.cols() != m)
      throw DomainError("design premultiplier must be (J-1) x (J-1)");
    return spec.pre * Z;
  }
  return Z;
}

std::string to_string(const DesignSpec& spec) {
  std::string base;
  switch (spec.kind) {
    case DesignKind::complete: base = "complete"; break;
    case DesignKind::proportional: base = "proportional"; break;
    case DesignKind::z0: base = "z0"; break;
    case DesignKind::minimal: base = "minimal"; break;
    case DesignKind::custom: {
      std::ostringstream os;
      os << "custom:";
      for (std::size_t c = 0; c < spec.custom.size(); ++c) {
        if (c) os << ";";
        os << (spec.custom[c].shared ? "s:" : "i:");
        for (bool b : spec.custom[c].rows) os << (b ? '1' : '0');
      }
      base = os.str();
      break;
    }
  }
  return base;
}

DesignSpec parse_design(const std::string& name) {
  DesignSpec spec;
  if (name == "complete") {
    spec.kind = DesignKind::complete;
  } else if (name == "proportional") {
    spec.kind = DesignKind::proportional;
  } else if (name == "z0") {
    spec.kind = DesignKind::z0;
  } else if (name == "minimal") {
    spec.kind = DesignKind::minimal;
  } else if (name.rfind("custom:", 0) == 0) {
    spec.kind = DesignKind::custom;
    std::string body = name.substr(7);
    std::istringstream is(body);
    std::string piece;
    while (std::getline(is, piece, ';')) {
      if (piece.size() < 3 || piece[1] != ':' ||
          (piece[0] != 's' && piece[0] != 'i'))
        throw DomainError("bad custom design layout: " + piece);
      CovariateLayout lay;
      lay.shared = piece[0] == 's';
      for (std::size_t i = 2; i < piece.size(); ++i) {
        if (piece[i] != '0' && piece[i] != '1')
          throw DomainError("bad custom design row mask: " + piece);
        lay.rows.push_back(piece[i] == '1');
      }
      spec.custom.push_back(std::move(lay));
    }
    if (spec.custom.empty())
      throw DomainError("custom design needs at least one covariate layout");
  } else {
    throw DomainError("unknown design name: " + name);
  }
  return spec;
}

TransformMatrix make_transform(TransformName name, int J) {
  if (J < 2) throw DomainError("transform matrices need J >= 2");
  const int m = J - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
  switch (name) {
    case TransformName::A:
      for (int i = 1; i < m; ++i) M(i, i - 1) = -1.0;
      break;
    case TransformName::A_transpose:
      for (int i = 0; i + 1 < m; ++i) M(i, i + 1) = -1.0;
      break;
    case TransformName::A_inverse:
      M = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) M(i, j) = 1.0;
      break;
    case TransformName::P_reverse:
      M = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) M(i, m - 1 - i) = 1.0;
      break;
    case TransformName::A_tilde_tau:
      M(m - 1, m - 1) = -1.0;
      break;
    case TransformName::identity:
      break;
    case TransformName::P_sigma:
      throw DomainError("P_sigma needs the permutation as aux argument");
    case TransformName::B_tau:
      throw DomainError("B_tau needs the transposed category as aux argument");
  }
  return {name, std::move(M)};
}

TransformMatrix make_transform(TransformName name, int J, int category) {
  if (name != TransformName::B_tau)
    throw DomainError("category aux only applies to B_tau");
  const int m = J - 1;
  if (category < 0 || category >= m)
    throw DomainError("B_tau category out of range");
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
  M.col(category).setConstant(-1.0);
  return {name, std::move(M)};
}

TransformMatrix make_transform(TransformName name, int J,
                               const std::vector<int>& sigma) {
  if (name != TransformName::P_sigma)
    throw DomainError("permutation aux only applies to P_sigma");
  if (static_cast<int>(sigma.size()) != J)
    throw DomainError("P_sigma permutation must have J entries");
  std::vector<bool> seen(J, false);
  for (int v : sigma) {
    if (v < 0 || v >= J || seen[v])
      throw DomainError("P_sigma aux is not a permutation of {0..J-1}");
    seen[v] = true;
  }
  if (sigma[J - 1] != J - 1)
    throw DomainError("P_sigma permutation must fix the reference category");
  const int m = J - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  // (P)_{i,j} = 1 when i = sigma(j)
  for (int j = 0; j < m; ++j) M(sigma[j], j) = 1.0;
  return {name, std::move(M)};
}

bool design_equivalent(const DesignGen& a, const DesignGen& b, int p,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd first_a = a(Eigen::VectorXd::Zero(p));
  Eigen::MatrixXd first_b = b(Eigen::VectorXd::Zero(p));
  if (first_a.rows() != first_b.rows())
    throw DomainError("design_equivalent requires equal row counts");
  const int rows = static_cast<int>(first_a.rows());
  const int draws = p + rows + 3;
  Eigen::MatrixXd Ma(draws * rows, first_a.cols());
  Eigen::MatrixXd Mb(draws * rows, first_b.cols());
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd x(p);
    for (int c = 0; c < p; ++c) x[c] = normal(rng);
    Ma.middleRows(d * rows, rows) = a(x);
    Mb.middleRows(d * rows, rows) = b(x);
  }
  Eigen::MatrixXd both(draws * rows, Ma.cols() + Mb.cols());
  both << Ma, Mb;
  const int ra = rank_of(Ma);
  const int rb = rank_of(Mb);
  const int rab = rank_of(both);
  return ra == rb && rb == rab;
}

bool design_equivalent(const DesignSpec& a, const DesignSpec& b, int J, int p,
                       std::uint64_t seed) {
  auto gen_a = [&](const Eigen::VectorXd& x) { return build_design(a, x, J); };
  auto gen_b = [&](const Eigen::VectorXd& x) { return build_design(b, x, J); };
  return design_equivalent(gen_a, gen_b, p, seed);
}

namespace {

// Split beta into per-category intercepts and slope rows under the named
// design kinds (no premultiplier).
void split_beta(const DesignSpec& spec, const Eigen::VectorXd& beta, int J,
                int p, Eigen::VectorXd& alpha, Eigen::MatrixXd& delta) {
  const int m = J - 1;
  if (beta.size() != design_columns(spec, J, p))
    throw DomainError("beta length does not match the design");
  alpha = beta.head(m);
  delta = Eigen::MatrixXd::Zero(m, p);
  switch (spec.kind) {
    case DesignKind::complete:
      for (int j = 0; j < m; ++j)
        delta.row(j) = beta.segment(m + j * p, p).transpose();
      break;
    case DesignKind::proportional:
      for (int j = 0; j < m; ++j) delta.row(j) = beta.tail(p).transpose();
      break;
    case DesignKind::z0:
      delta.row(m - 1) = beta.tail(p).transpose();
      break;
    case DesignKind::minimal:
      break;
    case DesignKind::custom: {
      int col = m;
      for (int c = 0; c < p; ++c) {
        const auto& lay = spec.custom[c];
        if (lay.shared) {
          for (int j = 0; j < m; ++j)
            if (lay.rows[j]) delta(j, c) = beta[col];
          ++col;
        } else {
          for (int j = 0; j < m; ++j)
            if (lay.rows[j]) delta(j, c) = beta[col++];
        }
      }
      break;
    }
  }
}

}  // namespace

ConstraintReport validate_cumulative_constraints(const DesignSpec& spec,
                                                 const Eigen::VectorXd& beta,
                                                 const CovariateDomain& domain,
                                                 int J, int p) {
  ConstraintReport report;
  if (spec.has_pre())
    throw DomainError(
        "validate_cumulative_constraints expects a plain named design");
  Eigen::VectorXd alpha;
  Eigen::MatrixXd delta;
  split_beta(spec, beta, J, p, alpha, delta);
  const int m = J - 1;

  auto fail = [&](const std::string& msg) {
    report.valid = false;
    report.failures.push_back(msg);
  };

  for (int j = 0; j + 1 < m; ++j) {
    std::ostringstream pair;
    pair << "(j=" << j + 1 << ", j+1=" << j + 2 << ")";
    switch (domain.kind) {
      case CovariateDomain::Kind::categorical: {
        // eta_j(x) < eta_{j+1}(x) for x in the indicator space is equivalent
        // to alpha_j < alpha_{j+1} and delta_{j,c} - delta_{j+1,c} <
        // alpha_{j+1} - alpha_j for every level c.
        if (!(alpha[j] < alpha[j + 1]))
          fail("alpha not increasing at " + pair.str());
        for (int c = 0; c < p; ++c) {
          if (!(delta(j, c) - delta(j + 1, c) < alpha[j + 1] - alpha[j])) {
            std::ostringstream os;
            os << "slope condition fails at " << pair.str() << " level " << c + 1;
            fail(os.str());
          }
        }
        break;
      }
      case CovariateDomain::Kind::real_line: {
        if (!(alpha[j] < alpha[j + 1]))
          fail("alpha not increasing at " + pair.str());
        for (int c = 0; c < p; ++c) {
          if (delta(j, c) != delta(j + 1, c)) {
            std::ostringstream os;
            os << "slopes differ on R at " << pair.str() << " covariate " << c + 1;
            fail(os.str());
          }
        }
        break;
      }
      case CovariateDomain::Kind::positive_half_line: {
        if (!(alpha[j] < alpha[j + 1]))
          fail("alpha not increasing at " + pair.str());
        for (int c = 0; c < p; ++c) {
          if (!(delta(j, c) <= delta(j + 1, c))) {
            std::ostringstream os;
            os << "slope not nondecreasing on R+ at " << pair.str()
               << " covariate " << c + 1;
            fail(os.str());
          }
        }
        break;
      }
      case CovariateDomain::Kind::interval: {
        // No closed-form criterion; check the endpoints plus a 100-point grid.
        if (p != 1)
          throw DomainError("interval domain check supports a single covariate");
        bool ok = true;
        double bad_x = domain.lower;
        for (int g = 0; g <= 101; ++g) {
          const double x =
              domain.lower + (domain.upper - domain.lower) * g / 101.0;
          const double ej = alpha[j] + delta(j, 0) * x;
          const double ej1 = alpha[j + 1] + delta(j + 1, 0) * x;
          if (!(ej < ej1)) {
            ok = false;
            bad_x = x;
            break;
          }
        }
        if (!ok) {
          std::ostringstream os;
          os << "predictors cross on [" << domain.lower << "," << domain.upper
             << "] at " << pair.str() << " near x=" << bad_x;
          fail(os.str());
        }
        break;
      }
    }
  }
  return report;
}

}  // namespace catglm
