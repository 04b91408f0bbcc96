#pragma once

// Model parameter bundle and the closed forms for the poor-censored income
// X = Y * 1{class in {C1, C2}}: mixture CDF, truncated moments, the expected
// absolute difference Theta_t and the Gini U-statistic variance sigma^2(t).

#include "dynpov/income_law.hpp"
#include "dynpov/markov.hpp"

namespace dynpov {

class PovertyThresholds {
 public:
  /// Requires 0 < y_ep < y_p.
  PovertyThresholds(double y_ep, double y_p);

  double y_ep() const noexcept { return y_ep_; }
  double y_p() const noexcept { return y_p_; }

 private:
  double y_ep_;
  double y_p_;
};

/// The eight scalars of F_1 and F_2 used by the closed-form indexes.
struct ClassIncomeMoments {
  double y1 = 0.0;    // E[Y_1]
  double y2 = 0.0;    // E[Y_2]
  double y1_2 = 0.0;  // E[Y_1^2]
  double y2_2 = 0.0;  // E[Y_2^2]
  double zbar1 = 0.0; // E|Y_1 - Y_1'|
  double zbar2 = 0.0; // E|Y_2 - Y_2'|
  double q1 = 0.0;    // E[(E|Y_1 - X_1|)^2]
  double q2 = 0.0;    // E[(E|Y_2 - X_2|)^2]
};

struct ModelParams {
  Distribution3 mu;
  GeneratorMatrix lambda;
  PovertyThresholds thresholds{0.6, 1.0};
  ClassIncomeMoments moments;
};

/// Throws Error(InvalidArgument) if the moments are inconsistent with each
/// other (Jensen bounds) or with the thresholds.
void validate_moments(const ClassIncomeMoments& m, const PovertyThresholds& thresholds);
void validate_params(const ModelParams& params);

ClassIncomeMoments moments_from_spec(const ClassDistributionSpec& spec,
                                     PairDenominator denominator = PairDenominator::NSquared);

/// Class occupation probabilities mu' P(t).
struct ClassMass {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 1.0;

  double poor() const noexcept { return p1 + p2; }
};

ClassMass class_mass(const ModelParams& params, double t);

/// F(t; x) = F_1(x) mu'P.1 + F_2(x) mu'P.2 + mu'P.3.
double mixture_cdf(const ModelParams& params, const ClassDistributionSpec& spec, double t,
                   double x);

/// E[X^r] for r in {1, 2}; Error(UnsupportedOrder) otherwise.
double truncated_moment(const ModelParams& params, double t, int r);
double truncated_moment(const ClassIncomeMoments& m, const ClassMass& mass, int r);

double theta(const ModelParams& params, double t);
double theta(const ClassIncomeMoments& m, const ClassMass& mass);

/// sigma^2(t): the squared-inner-integral minus Theta_t^2. Values within the
/// rounding tolerance below zero clamp to 0; anything clearly negative throws
/// Error(NegativeVariance).
double sigma2_gini(const ModelParams& params, double t);
double sigma2_gini(const ClassIncomeMoments& m, const ClassMass& mass);

double xbar12(const ModelParams& params, double t);
double xbar12(const ClassIncomeMoments& m, const ClassMass& mass);

double sigma12_sq(const ModelParams& params, double t);
double sigma12_sq(const ClassIncomeMoments& m, const ClassMass& mass);

}  // namespace dynpov
