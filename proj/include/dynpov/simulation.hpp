#pragma once

// Agent-level Monte Carlo of the class process: finite-N indexes, SLLN
// convergence and coverage of the asymptotic bands.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dynpov/asymptotic.hpp"
#include "dynpov/empirical.hpp"
#include "dynpov/income_law.hpp"
#include "dynpov/poverty_model.hpp"

namespace dynpov {

struct SimConfig {
  ModelParams params;
  ClassDistributionSpec dist_spec;
  std::size_t n_agents = 1000;
  std::vector<double> grid{0.0};
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  IndexOptions index_options;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend
  /// on it.
  unsigned threads = 0;
};

/// Error(InvalidArgument) unless n_agents >= 1, replications >= 1, the grid
/// is nonempty, strictly increasing with t >= 0, alpha in (0, 1] and the
/// class laws fit the thresholds.
void validate_config(const SimConfig& config);

/// Independent stream for replication `rep`; the same (seed, rep) always
/// gives the same stream.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep);

/// Right-continuous piecewise-constant path: state[k] holds on
/// [times[k], times[k+1]).
struct ClassJumpPath {
  std::vector<double> times;
  std::vector<int> states;
  double horizon = 0.0;

  int state_at(double t) const;
};

/// Exponential holding times with rate -lambda_ii, jumps with probabilities
/// lambda_ij / -lambda_ii. An absorbing state holds until the horizon.
ClassJumpPath simulate_class_path(const GeneratorMatrix& lambda, int initial, double horizon,
                                  std::mt19937_64& rng);

/// Fresh income draw for an agent in class `cls`. C3 uses spec.c3 when set,
/// otherwise y_p * (1 + Exp(1)).
double sample_income(PovertyClass cls, const ClassDistributionSpec& spec,
                     const PovertyThresholds& thresholds, std::mt19937_64& rng);

/// Finite-N indexes per replication and grid time.
struct CohortRun {
  std::vector<double> grid;
  std::size_t replications = 0;
  std::size_t n_agents = 0;
  std::vector<EmpiricalIndexes> values;   // [rep * grid.size() + k]
  std::vector<ClassCounts> counts;        // same layout

  const EmpiricalIndexes& at(std::size_t rep, std::size_t k) const {
    return values[rep * grid.size() + k];
  }
  const ClassCounts& counts_at(std::size_t rep, std::size_t k) const {
    return counts[rep * grid.size() + k];
  }
};

/// Classes are sampled only at grid times: the class at t + d is drawn from
/// the row of exp(d * Lambda) of the class at t. Only poor incomes are drawn.
CohortRun run_cohort(const SimConfig& config);

/// Finite-N value of one index; nullopt when undefined in that replication.
std::optional<double> index_of(const EmpiricalIndexes& e, IndexKind kind);

struct CoverageCell {
  IndexKind kind = IndexKind::H;
  double t = 0.0;
  bool defined = true;  // false when the limit itself is undefined at t
  double value_inf = 0.0;
  double variance_inf = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double coverage = 0.0;
  double mean_z = 0.0;  // mean of sqrt(N) * (index_N - index_inf)
  double var_z = 0.0;   // its sample variance
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
};

struct CoverageReport {
  std::size_t n_agents = 0;
  std::size_t replications = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<CoverageCell> cells;  // kind-major, then grid order

  const CoverageCell& cell(IndexKind kind, std::size_t k) const;
};

CoverageReport summarize_coverage(const SimConfig& config, const CohortRun& run);

/// run_cohort + summarize_coverage. Needs replications >= 100.
CoverageReport coverage_experiment(const SimConfig& config);

/// Mean |index_N - index_inf| over replications and grid times, for each N.
struct SllnPoint {
  std::size_t n_agents = 0;
  std::array<double, 4> mean_abs_error{};  // H, I, G, S
};

std::vector<SllnPoint> slln_experiment(const SimConfig& config, std::span<const std::size_t> sizes);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace dynpov
