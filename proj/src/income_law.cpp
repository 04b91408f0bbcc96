#include "dynpov/income_law.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dynpov/error.hpp"
#include "dynpov/poverty_model.hpp"

namespace dynpov {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Pieces of a truncated exponential law with closed forms.
struct TruncExp {
  double rate, lo, hi, norm;  // norm = 1 - exp(-rate * (hi - lo))

  explicit TruncExp(const TruncatedExponentialLaw& law)
      : rate(law.rate), lo(law.lo), hi(law.hi), norm(-std::expm1(-law.rate * (law.hi - law.lo))) {}

  double pdf(double x) const { return rate * std::exp(-rate * (x - lo)) / norm; }
  double cdf(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return -std::expm1(-rate * (x - lo)) / norm;
  }
  // Integral of s f(s) over [lo, x].
  double partial_mean(double x) const {
    x = std::clamp(x, lo, hi);
    const double e = std::exp(-rate * (x - lo));
    return (lo - x * e - std::expm1(-rate * (x - lo)) / rate) / norm;
  }
  double mean() const { return partial_mean(hi); }
  // E|y - X|
  double abs_dev(double y) const {
    return y * (2.0 * cdf(y) - 1.0) + mean() - 2.0 * partial_mean(y);
  }
};

template <class F>
double integrate(F&& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-12);
}

void check_law(const IncomeLaw& law) {
  std::visit(overloaded{
                 [](const PointMassLaw& l) {
                   if (!std::isfinite(l.value) || l.value < 0.0)
                     throw Error(ErrorKind::InvalidArgument, "point mass must be finite and >= 0");
                 },
                 [](const UniformLaw& l) {
                   if (!(std::isfinite(l.lo) && std::isfinite(l.hi)) || l.lo > l.hi || l.lo < 0.0)
                     throw Error(ErrorKind::InvalidArgument, "uniform law needs 0 <= lo <= hi");
                 },
                 [](const TruncatedExponentialLaw& l) {
                   if (!(std::isfinite(l.lo) && std::isfinite(l.hi)) || !(l.lo < l.hi) || l.lo < 0.0)
                     throw Error(ErrorKind::InvalidArgument,
                                 "truncated exponential needs 0 <= lo < hi");
                   if (!std::isfinite(l.rate) || l.rate == 0.0)
                     throw Error(ErrorKind::InvalidArgument,
                                 "truncated exponential rate must be finite and nonzero");
                 },
                 [](const EmpiricalLaw& l) {
                   if (l.sample.empty())
                     throw Error(ErrorKind::InvalidArgument, "empirical law needs a sample");
                   for (double v : l.sample) {
                     if (!std::isfinite(v) || v < 0.0)
                       throw Error(ErrorKind::InvalidArgument,
                                   "empirical sample values must be finite and >= 0");
                   }
                 },
             },
             law);
}

}  // namespace

double law_cdf(const IncomeLaw& law, double x) {
  return std::visit(
      overloaded{
          [x](const PointMassLaw& l) { return x >= l.value ? 1.0 : 0.0; },
          [x](const UniformLaw& l) {
            if (x < l.lo) return 0.0;
            if (x >= l.hi) return 1.0;
            return (x - l.lo) / (l.hi - l.lo);
          },
          [x](const TruncatedExponentialLaw& l) { return TruncExp(l).cdf(x); },
          [x](const EmpiricalLaw& l) {
            const auto n = std::count_if(l.sample.begin(), l.sample.end(),
                                         [x](double v) { return v <= x; });
            return static_cast<double>(n) / static_cast<double>(l.sample.size());
          },
      },
      law);
}

double law_lower(const IncomeLaw& law) {
  return std::visit(overloaded{
                        [](const PointMassLaw& l) { return l.value; },
                        [](const UniformLaw& l) { return l.lo; },
                        [](const TruncatedExponentialLaw& l) { return l.lo; },
                        [](const EmpiricalLaw& l) {
                          return *std::min_element(l.sample.begin(), l.sample.end());
                        },
                    },
                    law);
}

double law_upper(const IncomeLaw& law) {
  return std::visit(overloaded{
                        [](const PointMassLaw& l) { return l.value; },
                        [](const UniformLaw& l) { return l.hi; },
                        [](const TruncatedExponentialLaw& l) { return l.hi; },
                        [](const EmpiricalLaw& l) {
                          return *std::max_element(l.sample.begin(), l.sample.end());
                        },
                    },
                    law);
}

LawMoments sample_moments(std::span<const double> sample, PairDenominator denominator) {
  const std::size_t n = sample.size();
  const std::size_t min_n = denominator == PairDenominator::NSquared ? 1 : 2;
  if (n < min_n) {
    throw Error(ErrorKind::InsufficientClassData,
                "need at least " + std::to_string(min_n) + " observations for pair averages");
  }
  const double inner_den =
      static_cast<double>(denominator == PairDenominator::NSquared ? n : n - 1);

  LawMoments m;
  for (double v : sample) {
    m.mean += v;
    m.second += v * v;
  }
  m.mean /= static_cast<double>(n);
  m.second /= static_cast<double>(n);

  // Self-pairs contribute |x - x| = 0 under either denominator.
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(sample[i] - sample[j]);
    const double g = row / inner_den;
    m.zbar += g;
    m.q += g * g;
  }
  m.zbar /= static_cast<double>(n);
  m.q /= static_cast<double>(n);
  return m;
}

LawMoments law_moments(const IncomeLaw& law, PairDenominator denominator) {
  check_law(law);
  return std::visit(
      overloaded{
          [](const PointMassLaw& l) {
            return LawMoments{l.value, l.value * l.value, 0.0, 0.0};
          },
          [](const UniformLaw& l) {
            const double w = l.hi - l.lo;
            return LawMoments{0.5 * (l.lo + l.hi), (l.lo * l.lo + l.lo * l.hi + l.hi * l.hi) / 3.0,
                              w / 3.0, 7.0 * w * w / 60.0};
          },
          [](const TruncatedExponentialLaw& l) {
            const TruncExp te(l);
            LawMoments m;
            m.mean = te.mean();
            m.second = integrate([&](double x) { return x * x * te.pdf(x); }, l.lo, l.hi);
            m.zbar = integrate([&](double x) { return te.abs_dev(x) * te.pdf(x); }, l.lo, l.hi);
            m.q = integrate(
                [&](double x) {
                  const double g = te.abs_dev(x);
                  return g * g * te.pdf(x);
                },
                l.lo, l.hi);
            return m;
          },
          [denominator](const EmpiricalLaw& l) { return sample_moments(l.sample, denominator); },
      },
      law);
}

double sample_law(const IncomeLaw& law, std::mt19937_64& rng) {
  return std::visit(
      overloaded{
          [](const PointMassLaw& l) { return l.value; },
          [&rng](const UniformLaw& l) {
            if (l.lo == l.hi) return l.lo;
            return std::uniform_real_distribution<double>(l.lo, l.hi)(rng);
          },
          [&rng](const TruncatedExponentialLaw& l) {
            const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const double x = l.lo - std::log1p(u * std::expm1(-l.rate * (l.hi - l.lo))) / l.rate;
            return std::clamp(x, l.lo, l.hi);
          },
          [&rng](const EmpiricalLaw& l) {
            std::uniform_int_distribution<std::size_t> pick(0, l.sample.size() - 1);
            return l.sample[pick(rng)];
          },
      },
      law);
}

void validate_spec(const ClassDistributionSpec& spec, const PovertyThresholds& thresholds) {
  check_law(spec.c1);
  check_law(spec.c2);
  const double y_ep = thresholds.y_ep();
  const double y_p = thresholds.y_p();

  if (law_lower(spec.c1) < 0.0 || law_upper(spec.c1) > y_ep) {
    throw Error(ErrorKind::InvalidArgument, "C1 law must be supported on [0, y_ep]");
  }
  // Atoms at y_ep would classify as C1; continuous laws may touch it.
  const bool c2_has_atoms = std::holds_alternative<PointMassLaw>(spec.c2) ||
                            std::holds_alternative<EmpiricalLaw>(spec.c2);
  const double c2_lo = law_lower(spec.c2);
  if ((c2_has_atoms ? c2_lo <= y_ep : c2_lo < y_ep) || law_upper(spec.c2) > y_p) {
    throw Error(ErrorKind::InvalidArgument, "C2 law must be supported on (y_ep, y_p]");
  }
  if (spec.c3) {
    check_law(*spec.c3);
    if (law_lower(*spec.c3) < y_p ||
        ((std::holds_alternative<PointMassLaw>(*spec.c3) ||
          std::holds_alternative<EmpiricalLaw>(*spec.c3)) &&
         law_lower(*spec.c3) <= y_p)) {
      throw Error(ErrorKind::InvalidArgument, "C3 law must lie above y_p");
    }
  }
}

}  // namespace dynpov
