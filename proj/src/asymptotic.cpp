#include "dynpov/asymptotic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

void require_poor_mass(double h) {
  if (!(h > kNoPoorEpsilon)) {
    throw Error(ErrorKind::NoPoorMass, "poor mass H_inf(t) is zero; index undefined");
  }
}

void require_poor_income(double xbar) {
  if (!(xbar > kNoPoorEpsilon)) {
    throw Error(ErrorKind::ZeroPoorIncome, "expected poor income xbar12(t) is zero");
  }
}

double i_value(const ClassIncomeMoments& m, const ClassMass& mass, double y_p) {
  const double h = mass.poor();
  require_poor_mass(h);
  return 1.0 - (m.y1 / y_p) * mass.p1 / h - (m.y2 / y_p) * mass.p2 / h;
}

double g_value(const ClassIncomeMoments& m, const ClassMass& mass, const IndexOptions& options) {
  const double h = mass.poor();
  require_poor_mass(h);
  const double xbar = xbar12(m, mass);
  require_poor_income(xbar);
  return gini_numerator(m, mass, options.gini_numerator) / (2.0 * h * xbar);
}

double s_value(const ClassIncomeMoments& m, const ClassMass& mass, double y_p,
               const IndexOptions& options) {
  const double h = mass.poor();
  if (!(h > kNoPoorEpsilon)) return 0.0;
  const double i = i_value(m, mass, y_p);
  return h * (i + (1.0 - i) * g_value(m, mass, options));
}

}  // namespace

std::string_view to_string(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::H: return "H";
    case IndexKind::I: return "I";
    case IndexKind::G: return "G";
    case IndexKind::S: return "S";
  }
  return "?";
}

IndexKind index_kind_from_string(std::string_view name) {
  for (IndexKind k : kAllIndexes) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown index kind '" + std::string(name) + "'");
}

std::string_view to_string(GiniNumerator g) noexcept {
  return g == GiniNumerator::Lemma4 ? "lemma4" : "proposition2_display";
}

GiniNumerator gini_numerator_from_string(std::string_view name) {
  if (name == "lemma4") return GiniNumerator::Lemma4;
  if (name == "proposition2_display") return GiniNumerator::Proposition2Display;
  throw Error(ErrorKind::InvalidArgument,
              "gini numerator must be lemma4 or proposition2_display, got '" + std::string(name) +
                  "'");
}

double gini_numerator(const ClassIncomeMoments& m, const ClassMass& mass, GiniNumerator which) {
  if (which == GiniNumerator::Lemma4) return theta(m, mass);
  const double b = mass.p2;
  return b * b * m.zbar1 + 2.0 * (m.y2 - m.y1) * mass.p1 * b + b * b * m.zbar2;
}

double index_value(IndexKind kind, const ClassIncomeMoments& m, const ClassMass& mass, double y_p,
                   const IndexOptions& options) {
  switch (kind) {
    case IndexKind::H: return mass.poor();
    case IndexKind::I: return i_value(m, mass, y_p);
    case IndexKind::G: return g_value(m, mass, options);
    case IndexKind::S: return s_value(m, mass, y_p, options);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double index_variance(IndexKind kind, const ClassIncomeMoments& m, const ClassMass& mass,
                      double y_p, const IndexOptions& options) {
  const double h = mass.poor();
  switch (kind) {
    case IndexKind::H: return h * (1.0 - h);
    case IndexKind::I:
      require_poor_mass(h);
      return sigma12_sq(m, mass) / (y_p * y_p * h * h);
    case IndexKind::G: {
      require_poor_mass(h);
      const double xbar = xbar12(m, mass);
      require_poor_income(xbar);
      return sigma2_gini(m, mass) / (4.0 * h * h * xbar * xbar);
    }
    case IndexKind::S: {
      require_poor_mass(h);
      const double s = s_value(m, mass, y_p, options);
      return (1.0 - h) * s * s / h;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double index_value(IndexKind kind, const ModelParams& params, double t,
                   const IndexOptions& options) {
  return index_value(kind, params.moments, class_mass(params, t), params.thresholds.y_p(),
                     options);
}

double index_variance(IndexKind kind, const ModelParams& params, double t,
                      const IndexOptions& options) {
  return index_variance(kind, params.moments, class_mass(params, t), params.thresholds.y_p(),
                        options);
}

double h_inf(const ModelParams& params, double t) { return index_value(IndexKind::H, params, t); }
double i_inf(const ModelParams& params, double t) { return index_value(IndexKind::I, params, t); }
double g_inf(const ModelParams& params, double t, const IndexOptions& options) {
  return index_value(IndexKind::G, params, t, options);
}
double s_inf(const ModelParams& params, double t, const IndexOptions& options) {
  return index_value(IndexKind::S, params, t, options);
}

double var_h(const ModelParams& params, double t) {
  return index_variance(IndexKind::H, params, t);
}
double var_i(const ModelParams& params, double t) {
  return index_variance(IndexKind::I, params, t);
}
double var_g(const ModelParams& params, double t, const IndexOptions& options) {
  return index_variance(IndexKind::G, params, t, options);
}
double var_s(const ModelParams& params, double t, const IndexOptions& options) {
  return index_variance(IndexKind::S, params, t, options);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "normal quantile needs p in (0, 1)");
  }
  // Acklam's rational approximation (relative error ~1e-9) ...
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // ... polished with one Halley step against erfc.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Band confidence_band(double value, double variance_inf, std::size_t n, double alpha) {
  if (!(variance_inf >= 0.0) || n < 1 || !(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "confidence band needs variance >= 0, n >= 1 and alpha in (0, 1]");
  }
  const double z = alpha == 1.0 ? 0.0 : normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(variance_inf / static_cast<double>(n));
  return Band{value - half, value + half};
}

double prob_in_interval(double a, double b, double value_inf, double variance_inf, std::size_t n) {
  if (!(a <= b) || n < 1) {
    throw Error(ErrorKind::InvalidArgument, "probability interval needs a <= b and n >= 1");
  }
  if (!(variance_inf > 0.0)) return (a <= value_inf && value_inf <= b) ? 1.0 : 0.0;
  const double s = std::sqrt(variance_inf / static_cast<double>(n));
  return normal_cdf((b - value_inf) / s) - normal_cdf((a - value_inf) / s);
}

std::array<IndexSeries, 4> index_series(const ModelParams& params, std::span<const double> t_grid,
                                        std::size_t n, double alpha,
                                        const IndexOptions& options) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!std::isfinite(t_grid[k]) || t_grid[k] < 0.0 || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "time grid must be strictly increasing with t >= 0");
    }
  }
  std::array<IndexSeries, 4> out;
  for (std::size_t k = 0; k < 4; ++k) out[k].kind = kAllIndexes[k];

  const double y_p = params.thresholds.y_p();
  for (double t : t_grid) {
    const ClassMass mass = class_mass(params, t);
    for (auto& series : out) {
      IndexPoint pt;
      pt.t = t;
      pt.n = n;
      pt.alpha = alpha;
      pt.value = index_value(series.kind, params.moments, mass, y_p, options);
      pt.variance_inf = index_variance(series.kind, params.moments, mass, y_p, options);
      const Band band = confidence_band(pt.value, pt.variance_inf, n, alpha);
      pt.ci_low = band.low;
      pt.ci_high = band.high;
      series.points.push_back(pt);
    }
  }
  return out;
}

}  // namespace dynpov
