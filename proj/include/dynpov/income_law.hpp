#pragma once

// Class-conditional income laws F_1, F_2 (and optionally the non-poor law).
// Each law is time-invariant and memoryless: a fresh draw is taken at every
// observation time given the current class.

#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace dynpov {

class PovertyThresholds;

struct PointMassLaw {
  double value = 0.0;
};

struct UniformLaw {
  double lo = 0.0;
  double hi = 0.0;
};

/// Density proportional to exp(-rate * (x - lo)) on [lo, hi]; rate may be
/// negative (increasing density) but not zero.
struct TruncatedExponentialLaw {
  double rate = 1.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Resampling from an observed list of incomes.
struct EmpiricalLaw {
  std::vector<double> sample;
};

using IncomeLaw = std::variant<PointMassLaw, UniformLaw, TruncatedExponentialLaw, EmpiricalLaw>;

struct ClassDistributionSpec {
  IncomeLaw c1;
  IncomeLaw c2;
  /// Law above the poverty line. Only needed for full-population draws;
  /// defaults to y_p * (1 + Exp(1)).
  std::optional<IncomeLaw> c3;
};

/// How within-class pair averages treat self-pairs for finite samples.
enum class PairDenominator {
  NSquared,        // all ordered pairs, self-pairs included (divide by n^2)
  NTimesNMinusOne  // distinct ordered pairs only
};

/// Scalars of one class law that the closed-form indexes need.
struct LawMoments {
  double mean = 0.0;    // E[Y]
  double second = 0.0;  // E[Y^2]
  double zbar = 0.0;    // E|Y - Y'|
  double q = 0.0;       // E_Y[(E_X |Y - X|)^2]
};

double law_cdf(const IncomeLaw& law, double x);
double law_lower(const IncomeLaw& law);
double law_upper(const IncomeLaw& law);

LawMoments law_moments(const IncomeLaw& law,
                       PairDenominator denominator = PairDenominator::NSquared);

/// Exact pair sums over a finite sample, O(n^2). Requires n >= 1 (n >= 2 for
/// NTimesNMinusOne).
LawMoments sample_moments(std::span<const double> sample,
                          PairDenominator denominator = PairDenominator::NSquared);

double sample_law(const IncomeLaw& law, std::mt19937_64& rng);

/// Throws Error(InvalidArgument) unless the C1 law lives in [0, y_ep], the C2
/// law in (y_ep, y_p] and any C3 law above y_p.
void validate_spec(const ClassDistributionSpec& spec, const PovertyThresholds& thresholds);

}  // namespace dynpov
