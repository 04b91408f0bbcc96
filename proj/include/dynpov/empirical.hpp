#pragma once

// Finite-population poverty indexes of a single cross-section.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynpov/poverty_model.hpp"

namespace dynpov {

enum class PovertyClass : std::uint8_t { C1 = 0, C2 = 1, C3 = 2 };

inline int class_index(PovertyClass c) noexcept { return static_cast<int>(c); }
std::string_view to_string(PovertyClass c) noexcept;

/// C1 iff income <= y_ep, C2 iff y_ep < income <= y_p, C3 otherwise.
PovertyClass classify(double income, const PovertyThresholds& thresholds);

struct Observation {
  std::string household_id;
  double income = 0.0;
  PovertyClass cls = PovertyClass::C3;
};

struct CrossSection {
  int year = 0;
  std::vector<Observation> observations;
};

/// Classifies each income; ids and incomes must have equal length.
CrossSection make_cross_section(int year, std::span<const std::string> ids,
                                std::span<const double> incomes,
                                const PovertyThresholds& thresholds);

struct ClassCounts {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t poor() const noexcept { return n1 + n2; }
  std::size_t total() const noexcept { return n1 + n2 + n3; }
};

ClassCounts class_counts(const CrossSection& cs);
std::vector<double> poor_incomes(const CrossSection& cs);

double headcount(const CrossSection& cs);
double income_gap(const CrossSection& cs, const PovertyThresholds& thresholds);
double gini_poor(const CrossSection& cs);
double sen(double h, double i, double g);

/// Gini among the given incomes as the literal double sum over all ordered
/// pairs (self-pairs included), O(n^2).
double gini_double_sum(std::span<const double> incomes);
/// Same value via the sorted-rank weighting sum_i (2i - n - 1) x_(i), O(n log n).
double gini_sorted(std::span<const double> incomes);

enum class IndexStatus { Ok, NoPoor, ZeroIncomeMass };
std::string_view to_string(IndexStatus s) noexcept;

/// All four indexes of one cross-section. I and G are empty when undefined
/// (status says why); S is 0 when there are no poor and empty when G is
/// undefined for another reason.
struct EmpiricalIndexes {
  double h = 0.0;
  std::optional<double> i;
  std::optional<double> g;
  std::optional<double> s;
  IndexStatus status = IndexStatus::Ok;
};

EmpiricalIndexes compute_indexes(const CrossSection& cs, const PovertyThresholds& thresholds);

/// Variant for callers that already hold the poor incomes. `poor` is sorted in
/// place.
EmpiricalIndexes compute_indexes(std::size_t population, std::span<double> poor, double y_p);

}  // namespace dynpov
