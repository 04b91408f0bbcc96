#pragma once

// Infinite-population limits of the four dynamic poverty indexes, their CLT
// variances and the resulting normal confidence bands.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dynpov/poverty_model.hpp"

namespace dynpov {

enum class IndexKind { H, I, G, S };

inline constexpr std::array<IndexKind, 4> kAllIndexes{IndexKind::H, IndexKind::I, IndexKind::G,
                                                      IndexKind::S};

std::string_view to_string(IndexKind kind) noexcept;
IndexKind index_kind_from_string(std::string_view name);

/// Which coefficient multiplies zbar1 in the Gini numerator.
///  - Lemma4: (mu'P.1)^2, matching Theta_t.
///  - Proposition2Display: (mu'P.2)^2, as printed in the displayed limit.
enum class GiniNumerator { Lemma4, Proposition2Display };

std::string_view to_string(GiniNumerator g) noexcept;
GiniNumerator gini_numerator_from_string(std::string_view name);

struct IndexOptions {
  GiniNumerator gini_numerator = GiniNumerator::Lemma4;
};

/// Poor mass at or below this is treated as "no poor".
inline constexpr double kNoPoorEpsilon = 1e-12;

double gini_numerator(const ClassIncomeMoments& m, const ClassMass& mass, GiniNumerator which);

double h_inf(const ModelParams& params, double t);
double i_inf(const ModelParams& params, double t);
double g_inf(const ModelParams& params, double t, const IndexOptions& options = {});
double s_inf(const ModelParams& params, double t, const IndexOptions& options = {});

/// Asymptotic variances of sqrt(N) * (index_N - index_inf), before the 1/N
/// scaling.
double var_h(const ModelParams& params, double t);
double var_i(const ModelParams& params, double t);
double var_g(const ModelParams& params, double t, const IndexOptions& options = {});
double var_s(const ModelParams& params, double t, const IndexOptions& options = {});

/// The same quantities evaluated from precomputed class masses. `y_p` is the
/// poverty line.
struct AsymptoticValues {
  double h = 0.0;
  double i = 0.0;
  double g = 0.0;
  double s = 0.0;
};
double index_value(IndexKind kind, const ClassIncomeMoments& m, const ClassMass& mass, double y_p,
                   const IndexOptions& options = {});
double index_variance(IndexKind kind, const ClassIncomeMoments& m, const ClassMass& mass,
                      double y_p, const IndexOptions& options = {});
double index_value(IndexKind kind, const ModelParams& params, double t,
                   const IndexOptions& options = {});
double index_variance(IndexKind kind, const ModelParams& params, double t,
                      const IndexOptions& options = {});

double normal_cdf(double x);
/// Inverse standard normal CDF for p in (0, 1).
double normal_quantile(double p);

struct Band {
  double low = 0.0;
  double high = 0.0;
};

/// value -/+ z_{1-alpha/2} * sqrt(variance_inf / n). Not clipped to [0, 1].
/// alpha must be in (0, 1]; alpha = 1 gives a zero-width band.
Band confidence_band(double value, double variance_inf, std::size_t n, double alpha);

/// Normal approximation of P(a <= index_N <= b). With variance_inf <= 0 the
/// limit law is degenerate and the indicator of value in [a, b] is returned.
double prob_in_interval(double a, double b, double value_inf, double variance_inf, std::size_t n);

struct IndexPoint {
  double t = 0.0;
  double value = 0.0;
  double variance_inf = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 1;
  double alpha = 0.05;
};

struct IndexSeries {
  IndexKind kind = IndexKind::H;
  std::vector<IndexPoint> points;
};

/// One series per index kind, in H, I, G, S order. The grid must be strictly
/// increasing with t >= 0.
std::array<IndexSeries, 4> index_series(const ModelParams& params, std::span<const double> t_grid,
                                        std::size_t n, double alpha,
                                        const IndexOptions& options = {});

}  // namespace dynpov
