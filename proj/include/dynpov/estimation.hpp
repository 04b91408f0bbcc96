#pragma once

// From a cohort of class paths to ModelParams: transition counts, the
// discrete-time matrix, its generator, the initial distribution and pooled
// class income moments.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dynpov/empirical.hpp"
#include "dynpov/income_law.hpp"
#include "dynpov/ingestion.hpp"
#include "dynpov/poverty_model.hpp"

namespace dynpov {

struct TransitionCounts {
  std::array<std::array<std::uint64_t, 3>, 3> k{};

  std::uint64_t row_total(int i) const;
  std::uint64_t total() const;
};

/// A class label per grid year; nullopt marks a missing observation.
using ClassPath = std::vector<std::optional<PovertyClass>>;

/// Counts adjacent (wave, next wave) pairs. Every path must have exactly
/// `n_waves` labels, none missing, else Error(IncompletePath).
TransitionCounts count_transitions(std::span<const ClassPath> paths, std::size_t n_waves);

/// Counts over waves [first, last] of a cohort.
TransitionCounts count_transitions(const Cohort& cohort, std::size_t first, std::size_t last);

/// p_ij = K_ij / K_i. Error(EmptyRow) if some K_i is zero.
TransitionMatrix estimate_transition_matrix(const TransitionCounts& counts);

/// Error(NotIrreducible) for a reducible P, otherwise log(P) / eta.
GeneratorMatrix estimate_generator(const TransitionMatrix& p, double eta);

/// Class shares of one cross-section. Error(InvalidArgument) if empty.
Distribution3 estimate_initial_distribution(const CrossSection& cs);

/// Sample means, raw second moments and exact pair averages for C1 and C2.
/// Each class needs at least two observations (Error(InsufficientClassData)).
ClassIncomeMoments estimate_class_moments(std::span<const double> c1, std::span<const double> c2,
                                          PairDenominator denominator = PairDenominator::NSquared);

struct EstimationDiagnostics {
  std::array<std::complex<double>, 3> p_eigenvalues{};
  bool eigenvalues_real_positive = false;
  bool irreducible = false;
  double roundtrip_error = 0.0;  // max |exp(eta * Lambda) - P|
  std::array<std::size_t, 3> class_sizes{};  // pooled observations per class
  std::size_t households = 0;
};

struct EstimationReport {
  ModelParams params;
  TransitionCounts counts;
  TransitionMatrix p_hat;
  double eta = 1.0;
  std::vector<int> window;  // wave years used; window.front() is t = 0
  EstimationDiagnostics diagnostics;

  int origin_year() const { return window.empty() ? 0 : window.front(); }
};

struct EstimateOptions {
  double eta = 2.0;
  /// Inclusive (first, last) calendar years; the whole cohort when empty.
  std::optional<std::pair<int, int>> window;
  PairDenominator pair_denominator = PairDenominator::NSquared;
};

/// The full pipeline on the waves of `window`. The window must hold at least
/// two cohort waves, all spaced `eta` years apart (Error(InvalidWindow)).
/// Moments are pooled over the window's waves; mu comes from its first wave.
EstimationReport estimate(const Cohort& cohort, const EstimateOptions& options);

}  // namespace dynpov
