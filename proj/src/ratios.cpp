#include "catglm/ratios.hpp"

#include <cmath>
#include <sstream>

namespace catglm {

namespace {

void check_open_unit(const Eigen::VectorXd& p) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0 && p[j] < 1.0)) {
      std::ostringstream os;
      os << "ratio component " << j + 1 << " = " << p[j]
         << " is outside (0,1)";
      throw InvalidRatio(os.str());
    }
  }
}

}  // namespace

ProbabilityVector::ProbabilityVector(Eigen::VectorXd v) : values(std::move(v)) {
  if (values.size() < 1)
    throw DomainError("probability vector needs J >= 2 (at least one entry)");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (!(values[j] > 0.0))
      throw DomainError("probability vector entries must be strictly positive");
    sum += values[j];
  }
  if (!(sum < 1.0))
    throw DomainError("probability vector entries must sum to less than 1");
}

Eigen::VectorXd ProbabilityVector::full() const {
  Eigen::VectorXd out(values.size() + 1);
  out.head(values.size()) = values;
  out[values.size()] = last();
  return out;
}

Eigen::VectorXd ratio_apply(RatioKind kind, const ProbabilityVector& pi) {
  const Eigen::VectorXd& v = pi.values;
  const Eigen::Index m = v.size();
  Eigen::VectorXd r(m);
  switch (kind) {
    case RatioKind::reference: {
      const double pj = pi.last();
      for (Eigen::Index j = 0; j < m; ++j) r[j] = v[j] / (v[j] + pj);
      break;
    }
    case RatioKind::adjacent: {
      for (Eigen::Index j = 0; j + 1 < m; ++j) r[j] = v[j] / (v[j] + v[j + 1]);
      r[m - 1] = v[m - 1] / (v[m - 1] + pi.last());
      break;
    }
    case RatioKind::cumulative: {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        acc += v[j];
        r[j] = acc;
      }
      break;
    }
    case RatioKind::sequential: {
      double tail = 1.0;  // pi_j + ... + pi_J
      for (Eigen::Index j = 0; j < m; ++j) {
        r[j] = v[j] / tail;
        tail -= v[j];
      }
      break;
    }
  }
  return r;
}

ProbabilityVector ratio_invert(RatioKind kind, const Eigen::VectorXd& p) {
  check_open_unit(p);
  const Eigen::Index m = p.size();
  Eigen::VectorXd v(m);
  switch (kind) {
    case RatioKind::reference: {
      // pi_j = (r_j / (1 - r_j)) pi_J
      Eigen::VectorXd odds(m);
      double sum = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        odds[j] = p[j] / (1.0 - p[j]);
        sum += odds[j];
      }
      const double pj = 1.0 / (1.0 + sum);
      v = odds * pj;
      break;
    }
    case RatioKind::adjacent: {
      // pi_j = (prod_{k=j}^{J-1} r_k/(1-r_k)) pi_J
      Eigen::VectorXd prod(m);
      double acc = 1.0;
      for (Eigen::Index j = m - 1; j >= 0; --j) {
        acc *= p[j] / (1.0 - p[j]);
        prod[j] = acc;
      }
      const double pj = 1.0 / (1.0 + prod.sum());
      v = prod * pj;
      break;
    }
    case RatioKind::cumulative: {
      double prev = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!(p[j] > prev)) {
          std::ostringstream os;
          os << "cumulative ratio vector must be strictly increasing; "
             << "component " << j + 1 << " = " << p[j] << " does not exceed "
             << prev;
          throw InvalidRatio(os.str());
        }
        v[j] = p[j] - prev;
        prev = p[j];
      }
      break;
    }
    case RatioKind::sequential: {
      // pi_j = r_j prod_{k<j} (1 - r_k)
      double tail = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        v[j] = p[j] * tail;
        tail *= 1.0 - p[j];
      }
      break;
    }
  }
  return ProbabilityVector(std::move(v));
}

Eigen::MatrixXd ratio_jacobian(RatioKind kind, const Eigen::VectorXd& p,
                               const Eigen::VectorXd& eta,
                               const CdfSpec& cdf) {
  const Eigen::Index m = p.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);

  if (kind == RatioKind::cumulative) {
    // Constant bidiagonal: pi_j = r_j - r_{j-1}.
    for (Eigen::Index i = 0; i < m; ++i) {
      jac(i, i) = 1.0;
      if (i + 1 < m) jac(i, i + 1) = -1.0;
    }
    return jac;
  }

  if (eta.size() != m)
    throw DomainError("ratio_jacobian: eta and p must have equal length");
  Eigen::VectorXd F(m);
  for (Eigen::Index i = 0; i < m; ++i) F[i] = clamped_cdf_eval(cdf, eta[i]);

  switch (kind) {
    case RatioKind::reference: {
      const Eigen::VectorXd v = ratio_invert(kind, p).values;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double s = F[i] * (1.0 - F[i]);
        for (Eigen::Index j = 0; j < m; ++j) {
          const double cov = i == j ? v[i] * (1.0 - v[i]) : -v[i] * v[j];
          jac(i, j) = cov / s;
        }
      }
      break;
    }
    case RatioKind::adjacent: {
      const Eigen::VectorXd v = ratio_invert(kind, p).values;
      Eigen::VectorXd gamma(m);  // gamma_i = P(Y <= i)
      double acc = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        acc += v[i];
        gamma[i] = acc;
      }
      for (Eigen::Index i = 0; i < m; ++i) {
        const double s = F[i] * (1.0 - F[i]);
        for (Eigen::Index j = 0; j < m; ++j) {
          jac(i, j) = (i >= j ? v[j] * (1.0 - gamma[i]) : -v[j] * gamma[i]) / s;
        }
      }
      break;
    }
    case RatioKind::sequential: {
      for (Eigen::Index j = 0; j < m; ++j) {
        double diag = 1.0;
        for (Eigen::Index k = 0; k < j; ++k) diag *= 1.0 - F[k];
        jac(j, j) = diag;
        for (Eigen::Index i = 0; i < j; ++i) {
          double prod = 1.0;
          for (Eigen::Index k = 0; k < j; ++k)
            if (k != i) prod *= 1.0 - F[k];
          jac(i, j) = -F[j] * prod;
        }
      }
      break;
    }
    case RatioKind::cumulative:
      break;  // handled above
  }
  return jac;
}

std::string to_string(RatioKind kind) {
  switch (kind) {
    case RatioKind::reference: return "reference";
    case RatioKind::adjacent: return "adjacent";
    case RatioKind::cumulative: return "cumulative";
    case RatioKind::sequential: return "sequential";
  }
  return "?";
}

RatioKind parse_ratio(const std::string& name) {
  if (name == "reference") return RatioKind::reference;
  if (name == "adjacent") return RatioKind::adjacent;
  if (name == "cumulative") return RatioKind::cumulative;
  if (name == "sequential") return RatioKind::sequential;
  throw DomainError("unknown ratio name: " + name);
}

}  // namespace catglm
