#include "dynpov/poverty_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

constexpr double kNegativeVarianceTol = 1e-6;
constexpr double kJensenRelTol = 1e-12;

// A variance computed as (positive part) - (subtracted part). Small negative
// results are round-off; the tolerance scales with the magnitude of the terms
// so it stays meaningful in currency^2 units.
double checked_variance(double positive, double subtracted, const char* what) {
  const double v = positive - subtracted;
  const double tol = kNegativeVarianceTol * std::max(1.0, std::abs(positive));
  if (v < -tol) {
    throw Error(ErrorKind::NegativeVariance,
                std::string(what) + " is negative (" + std::to_string(v) +
                    "); class moments are inconsistent");
  }
  return std::max(v, 0.0);
}

bool below(double a, double b) { return a < b - kJensenRelTol * std::max(1.0, std::abs(b)); }

}  // namespace

PovertyThresholds::PovertyThresholds(double y_ep, double y_p) : y_ep_(y_ep), y_p_(y_p) {
  if (!(std::isfinite(y_ep) && std::isfinite(y_p)) || !(0.0 < y_ep && y_ep < y_p)) {
    throw Error(ErrorKind::InvalidArgument,
                "thresholds need 0 < y_ep < y_p (got y_ep=" + std::to_string(y_ep) +
                    ", y_p=" + std::to_string(y_p) + ")");
  }
}

void validate_moments(const ClassIncomeMoments& m, const PovertyThresholds& thresholds) {
  const double values[] = {m.y1, m.y2, m.y1_2, m.y2_2, m.zbar1, m.zbar2, m.q1, m.q2};
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "class moments must be finite and >= 0");
    }
  }
  if (!(m.y1 <= thresholds.y_ep() && thresholds.y_ep() <= m.y2 && m.y2 <= thresholds.y_p())) {
    throw Error(ErrorKind::InvalidArgument, "class means must satisfy 0 <= y1 <= y_ep <= y2 <= y_p");
  }
  if (below(m.y1_2, m.y1 * m.y1) || below(m.y2_2, m.y2 * m.y2)) {
    throw Error(ErrorKind::InvalidArgument, "second moments violate E[Y^2] >= E[Y]^2");
  }
  if (below(m.q1, m.zbar1 * m.zbar1) || below(m.q2, m.zbar2 * m.zbar2)) {
    throw Error(ErrorKind::InvalidArgument, "pair moments violate q >= zbar^2");
  }
}

void validate_params(const ModelParams& params) {
  validate_moments(params.moments, params.thresholds);
}

ClassIncomeMoments moments_from_spec(const ClassDistributionSpec& spec,
                                     PairDenominator denominator) {
  const LawMoments a = law_moments(spec.c1, denominator);
  const LawMoments b = law_moments(spec.c2, denominator);
  return ClassIncomeMoments{a.mean, b.mean, a.second, b.second, a.zbar, b.zbar, a.q, b.q};
}

ClassMass class_mass(const ModelParams& params, double t) {
  const Eigen::RowVector3d row = params.mu.row() * matrix_exp(params.lambda, t).matrix();
  return ClassMass{row(0), row(1), row(2)};
}

double mixture_cdf(const ModelParams& params, const ClassDistributionSpec& spec, double t,
                   double x) {
  const ClassMass mass = class_mass(params, t);
  return law_cdf(spec.c1, x) * mass.p1 + law_cdf(spec.c2, x) * mass.p2 + mass.p3;
}

double truncated_moment(const ClassIncomeMoments& m, const ClassMass& mass, int r) {
  switch (r) {
    case 1: return m.y1 * mass.p1 + m.y2 * mass.p2;
    case 2: return m.y1_2 * mass.p1 + m.y2_2 * mass.p2;
    default:
      throw Error(ErrorKind::UnsupportedOrder,
                  "only moments of order 1 and 2 are stored (got r=" + std::to_string(r) + ")");
  }
}

double truncated_moment(const ModelParams& params, double t, int r) {
  if (r != 1 && r != 2) return truncated_moment(params.moments, ClassMass{}, r);
  return truncated_moment(params.moments, class_mass(params, t), r);
}

double theta(const ClassIncomeMoments& m, const ClassMass& mass) {
  const double a = mass.p1;
  const double b = mass.p2;
  return a * a * m.zbar1 + 2.0 * (m.y2 - m.y1) * a * b + b * b * m.zbar2;
}

double theta(const ModelParams& params, double t) {
  return theta(params.moments, class_mass(params, t));
}

double sigma2_gini(const ClassIncomeMoments& m, const ClassMass& mass) {
  const double a = mass.p1;
  const double b = mass.p2;
  const double squared_inner = a * a * a * m.q1 +
                               b * b * a * (m.y1_2 - 2.0 * m.y1 * m.y2 + m.y2 * m.y2) +
                               a * a * b * (m.y2_2 - 2.0 * m.y1 * m.y2 + m.y1 * m.y1) +
                               b * b * b * m.q2;
  const double th = theta(m, mass);
  return checked_variance(squared_inner, th * th, "sigma^2(t)");
}

double sigma2_gini(const ModelParams& params, double t) {
  return sigma2_gini(params.moments, class_mass(params, t));
}

double xbar12(const ClassIncomeMoments& m, const ClassMass& mass) {
  return truncated_moment(m, mass, 1);
}

double xbar12(const ModelParams& params, double t) {
  return xbar12(params.moments, class_mass(params, t));
}

double sigma12_sq(const ClassIncomeMoments& m, const ClassMass& mass) {
  const double mean = xbar12(m, mass);
  return checked_variance(truncated_moment(m, mass, 2), mean * mean, "sigma_12^2(t)");
}

double sigma12_sq(const ModelParams& params, double t) {
  return sigma12_sq(params.moments, class_mass(params, t));
}

}  // namespace dynpov
