#include "catglm/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace catglm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

// Regularized incomplete beta I_x(a,b) via the Lentz continued fraction.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_cdf_std(int nu, double t) {
  const double x = nu / (nu + t * t);
  const double ib = reg_inc_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_pdf_std(int nu, double t) {
  const double ln = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * kPi) -
                    0.5 * (nu + 1.0) * std::log1p(t * t / nu);
  return std::exp(ln);
}

double normal_cdf_std(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_pdf_std(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

// Acklam's rational approximation for the standard normal quantile,
// polished with two Newton steps.
double normal_quantile_std(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double bb[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((bb[0] * r + bb[1]) * r + bb[2]) * r + bb[3]) * r + bb[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf_std(x) - p;
    const double d = normal_pdf_std(x);
    if (d <= 0.0) break;
    x -= e / d;
  }
  return x;
}

// Bracketed Newton for the standard Student quantile.
double student_quantile_std(int nu, double p) {
  if (p == 0.5) return 0.0;
  // Start from the Cauchy quantile, whose tails dominate every Student's.
  double lo = -1.0, hi = 1.0;
  while (student_cdf_std(nu, hi) < p) hi *= 2.0;
  while (student_cdf_std(nu, lo) > p) lo *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = student_cdf_std(nu, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = student_pdf_std(nu, x);
    double step = d > 0.0 ? f / d : 0.0;
    double cand = x - step;
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (std::fabs(cand - x) < 1e-15 * (1.0 + std::fabs(x))) {
      x = cand;
      break;
    }
    x = cand;
  }
  return x;
}

[[noreturn]] void throw_out_of_support(const char* family, double w) {
  std::ostringstream os;
  os << family << " cdf evaluated outside its support at w=" << w
     << " (predictor positivity constraint violated)";
  throw SupportViolation(os.str(), w);
}

}  // namespace

void validate(const CdfSpec& spec) {
  if (!(spec.scale > 0.0)) throw DomainError("cdf scale must be > 0");
  if (spec.family == CdfFamily::student && spec.df < 1)
    throw DomainError("Student df must be >= 1");
  if (spec.family == CdfFamily::pareto && !(spec.shape >= 1.0))
    throw DomainError("Pareto shape must be >= 1");
  if (!std::isfinite(spec.location) || !std::isfinite(spec.scale))
    throw DomainError("cdf location/scale must be finite");
}

bool is_symmetric(CdfFamily family) {
  switch (family) {
    case CdfFamily::logistic:
    case CdfFamily::normal:
    case CdfFamily::laplace:
    case CdfFamily::cauchy:
    case CdfFamily::student:
      return true;
    default:
      return false;
  }
}

bool has_restricted_support(CdfFamily family) {
  return family == CdfFamily::exponential || family == CdfFamily::pareto;
}

double support_lower_bound(const CdfSpec& spec) {
  switch (spec.family) {
    case CdfFamily::exponential:
      return spec.location;
    case CdfFamily::pareto:
      return spec.location + spec.scale;
    default:
      return -std::numeric_limits<double>::infinity();
  }
}

double cdf_eval(const CdfSpec& spec, double w) {
  const double z = (w - spec.location) / spec.scale;
  switch (spec.family) {
    case CdfFamily::logistic:
      return 1.0 / (1.0 + std::exp(-z));
    case CdfFamily::normal:
      return normal_cdf_std(z);
    case CdfFamily::laplace:
      return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    case CdfFamily::cauchy:
      return 0.5 + std::atan(z) / kPi;
    case CdfFamily::student:
      return student_cdf_std(spec.df, z);
    case CdfFamily::gumbel_min:
      return -std::expm1(-std::exp(z));
    case CdfFamily::gumbel_max:
      return std::exp(-std::exp(-z));
    case CdfFamily::exponential:
      if (z <= 0.0) throw_out_of_support("exponential", w);
      return -std::expm1(-z);
    case CdfFamily::pareto:
      if (z <= 1.0) throw_out_of_support("Pareto", w);
      return 1.0 - std::pow(z, -spec.shape);
  }
  throw DomainError("unknown cdf family");
}

double pdf_eval(const CdfSpec& spec, double w) {
  const double z = (w - spec.location) / spec.scale;
  const double s = spec.scale;
  switch (spec.family) {
    case CdfFamily::logistic: {
      const double F = 1.0 / (1.0 + std::exp(-z));
      return F * (1.0 - F) / s;
    }
    case CdfFamily::normal:
      return normal_pdf_std(z) / s;
    case CdfFamily::laplace:
      return 0.5 * std::exp(-std::fabs(z)) / s;
    case CdfFamily::cauchy:
      return 1.0 / (kPi * (1.0 + z * z)) / s;
    case CdfFamily::student:
      return student_pdf_std(spec.df, z) / s;
    case CdfFamily::gumbel_min:
      return std::exp(z - std::exp(z)) / s;
    case CdfFamily::gumbel_max:
      return std::exp(-z - std::exp(-z)) / s;
    case CdfFamily::exponential:
      if (z <= 0.0) throw_out_of_support("exponential", w);
      return std::exp(-z) / s;
    case CdfFamily::pareto:
      if (z <= 1.0) throw_out_of_support("Pareto", w);
      return spec.shape * std::pow(z, -spec.shape - 1.0) / s;
  }
  throw DomainError("unknown cdf family");
}

double quantile(const CdfSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("quantile requires p in (0,1)");
  double z;
  switch (spec.family) {
    case CdfFamily::logistic:
      z = std::log(p / (1.0 - p));
      break;
    case CdfFamily::normal:
      z = normal_quantile_std(p);
      break;
    case CdfFamily::laplace:
      z = p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
      break;
    case CdfFamily::cauchy:
      z = std::tan(kPi * (p - 0.5));
      break;
    case CdfFamily::student:
      z = student_quantile_std(spec.df, p);
      break;
    case CdfFamily::gumbel_min:
      z = std::log(-std::log1p(-p));
      break;
    case CdfFamily::gumbel_max:
      z = -std::log(-std::log(p));
      break;
    case CdfFamily::exponential:
      z = -std::log1p(-p);
      break;
    case CdfFamily::pareto:
      z = std::pow(1.0 - p, -1.0 / spec.shape);
      break;
    default:
      throw DomainError("unknown cdf family");
  }
  return spec.location + spec.scale * z;
}

CdfSpec reflect(const CdfSpec& spec) {
  if (has_restricted_support(spec.family))
    throw UnsupportedReflection(
        "reflection of " + to_string(spec) +
        " is not representable (support would become an upper half line)");
  CdfSpec out = spec;
  out.location = -spec.location;
  if (spec.family == CdfFamily::gumbel_min) {
    out.family = CdfFamily::gumbel_max;
  } else if (spec.family == CdfFamily::gumbel_max) {
    out.family = CdfFamily::gumbel_min;
  }
  return out;
}

std::string to_string(const CdfSpec& spec) {
  std::ostringstream os;
  switch (spec.family) {
    case CdfFamily::logistic: os << "logistic"; break;
    case CdfFamily::normal: os << "normal"; break;
    case CdfFamily::laplace: os << "laplace"; break;
    case CdfFamily::cauchy: os << "cauchy"; break;
    case CdfFamily::student: os << "student:" << spec.df; break;
    case CdfFamily::gumbel_min: os << "gumbelmin"; break;
    case CdfFamily::gumbel_max: os << "gumbelmax"; break;
    case CdfFamily::exponential: os << "exponential"; break;
    case CdfFamily::pareto: os << "pareto:" << spec.shape; break;
  }
  if (spec.location != 0.0 || spec.scale != 1.0)
    os << "@" << spec.location << "," << spec.scale;
  return os.str();
}

CdfSpec parse_cdf(const std::string& name) {
  CdfSpec spec;
  std::string base = name;
  const auto at = name.find('@');
  if (at != std::string::npos) {
    base = name.substr(0, at);
    const std::string ls = name.substr(at + 1);
    const auto comma = ls.find(',');
    if (comma == std::string::npos)
      throw DomainError("bad cdf location/scale suffix: " + name);
    spec.location = std::stod(ls.substr(0, comma));
    spec.scale = std::stod(ls.substr(comma + 1));
  }
  if (base == "logistic") {
    spec.family = CdfFamily::logistic;
  } else if (base == "normal") {
    spec.family = CdfFamily::normal;
  } else if (base == "laplace") {
    spec.family = CdfFamily::laplace;
  } else if (base == "cauchy") {
    spec.family = CdfFamily::cauchy;
  } else if (base.rfind("student:", 0) == 0) {
    spec.family = CdfFamily::student;
    spec.df = std::stoi(base.substr(8));
  } else if (base == "gumbelmin") {
    spec.family = CdfFamily::gumbel_min;
  } else if (base == "gumbelmax") {
    spec.family = CdfFamily::gumbel_max;
  } else if (base == "exponential") {
    spec.family = CdfFamily::exponential;
  } else if (base.rfind("pareto:", 0) == 0) {
    spec.family = CdfFamily::pareto;
    spec.shape = std::stod(base.substr(7));
  } else {
    throw DomainError("unknown cdf name: " + name);
  }
  validate(spec);
  return spec;
}

bool operator==(const CdfSpec& a, const CdfSpec& b) {
  if (a.family != b.family || a.location != b.location || a.scale != b.scale)
    return false;
  if (a.family == CdfFamily::student && a.df != b.df) return false;
  if (a.family == CdfFamily::pareto && a.shape != b.shape) return false;
  return true;
}

}  // namespace catglm
