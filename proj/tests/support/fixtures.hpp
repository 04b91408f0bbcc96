#pragma once

// Published parameter values and synthetic data built to match them.

#include <array>
#include <cstdint>
#include <vector>

#include "dynpov/ingestion.hpp"
#include "dynpov/markov.hpp"
#include "dynpov/poverty_model.hpp"

namespace dynpov::fixtures {

inline constexpr double kYp = 5479.50;
inline constexpr double kYep = 3287.70;
inline constexpr double kY1 = 2136.62;
inline constexpr double kY2 = 4488.47;
inline constexpr double kY1Reduced = 2046.57;
inline constexpr double kY2Reduced = 4430.35;
inline constexpr std::array<double, 3> kMu{0.050, 0.068, 0.882};

// Transition matrix and generator as printed (two decimals), full window.
Matrix3 p_hat();
Matrix3 lambda_hat();
// Same for the 1998-2002 window.
Matrix3 p_hat_forecast();
Matrix3 lambda_hat_forecast();

PovertyThresholds thresholds();
std::vector<int> waves();  // 1998, 2000, ..., 2012

/// Poverty thresholds by household size and year, 1998-2012.
ThresholdTable threshold_table();

/// Synthetic standardized incomes with the published pooled class size, mean
/// and standard deviation (n-1 divisor): C1 182 values on [0, y_ep], C2 416
/// values on (y_ep, y_p].
std::vector<double> pool_c1();
std::vector<double> pool_c2();

/// Moments of the pools (self-pairs included).
ClassIncomeMoments pool_moments();

/// Published mu and generator, pooled moments, published thresholds.
ModelParams published_params();

using CountMatrix = std::array<std::array<std::uint64_t, 3>, 3>;

/// Splits the multigraph of counts into class walks with exactly `length`
/// steps each. The walks' transition counts equal `counts` exactly; throws
/// if that is impossible with the simple greedy construction.
std::vector<std::vector<int>> walks_from_counts(const CountMatrix& counts, std::size_t length);

/// Counts with K_ij = rows[i] * 100 * p_ij for a two-decimal matrix.
CountMatrix counts_from_percent(const Matrix3& p, std::array<std::uint64_t, 3> rows);

/// Raw panel records for the walks over `waves`: each class observation gets
/// an income from the matching pool (C3 above y_p), scaled back to raw money
/// with the household-size and year threshold. Household sizes cycle 1..8.
std::vector<PanelRecord> panel_from_walks(const std::vector<std::vector<int>>& walks,
                                          const std::vector<int>& waves);

struct PanelFixture {
  std::vector<std::vector<int>> walks;
  std::vector<PanelRecord> records;
  CountMatrix counts{};
};

/// 900 households over the 8 waves; transition counts are 100 * (2, 4, 57)
/// rows in the printed full-window proportions.
PanelFixture full_panel();

/// Households whose first three waves (1998-2002) carry transition counts in
/// the printed reduced-window proportions; later waves repeat the 2002 class.
PanelFixture reduced_panel();

}  // namespace dynpov::fixtures
