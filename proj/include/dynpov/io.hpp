#pragma once

// JSON interchange documents and CSV tables.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynpov/asymptotic.hpp"
#include "dynpov/empirical.hpp"
#include "dynpov/estimation.hpp"
#include "dynpov/simulation.hpp"

namespace dynpov {

using Json = nlohmann::json;

/// At most 12 significant digits, trailing zeros dropped ("%.12g"). NaN and
/// infinities become an empty string.
std::string format_number(double x);

Json to_json(const Matrix3& m);
Matrix3 matrix_from_json(const Json& j);

/// {mu, lambda, thresholds: {y_ep, y_p}, moments: {...}}.
Json to_json(const ModelParams& params);
/// Reads the four fields above; other keys are ignored so a full estimation
/// report is accepted too. Malformed input is Error(ParseError); invalid
/// values raise the usual validation errors.
ModelParams model_params_from_json(const Json& j);
/// Same, but `moments` may be absent, in which case it stays default.
ModelParams model_params_from_json(const Json& j, bool require_moments);

Json to_json(const IncomeLaw& law);
IncomeLaw income_law_from_json(const Json& j);
Json to_json(const ClassDistributionSpec& spec);
ClassDistributionSpec distribution_spec_from_json(const Json& j);

std::string_view to_string(PairDenominator d) noexcept;
PairDenominator pair_denominator_from_string(std::string_view name);

/// The ModelParams document plus eta, origin_year, window, p_hat, counts and
/// diagnostics.
Json to_json(const EstimationReport& report);

/// Keys: params, dist_spec, n_agents, grid, replications, seed, alpha and
/// optional gini_numerator, pair_denominator, threads. When params.moments is
/// absent the moments are computed from dist_spec.
SimConfig sim_config_from_json(const Json& j);
Json to_json(const SimConfig& config);

Json to_json(const CoverageReport& report);

/// Row source for the index CSV. `year` and `forecast` are optional columns.
struct IndexRow {
  IndexKind kind = IndexKind::H;
  double t = 0.0;
  std::optional<double> value;
  std::optional<double> variance;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::size_t> n;
  std::optional<double> alpha;
  std::optional<double> year;
  std::optional<bool> forecast;
  std::optional<std::string> status;
};

/// Columns kind,t,value,variance,ci_low,ci_high,n,alpha,year then `forecast`
/// and/or `status` when requested. Missing values are empty fields.
void write_index_csv(std::ostream& out, std::span<const IndexRow> rows, bool with_forecast,
                     bool with_status);

/// One row per series point, series by series. With an origin year the
/// `year` column is origin_year + t.
std::vector<IndexRow> index_rows(std::span<const IndexSeries> series,
                                 std::optional<int> origin_year);

/// index,t,coverage,mean_z,var_z,n_excluded.
void write_coverage_csv(std::ostream& out, const CoverageReport& report);

/// replication,t,H,I,G,S,status,n1,n2,n3.
void write_cohort_csv(std::ostream& out, const CohortRun& run);

}  // namespace dynpov
