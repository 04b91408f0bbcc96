#pragma once

// Panel and threshold CSV loading, income standardization and cohort
// construction.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynpov/empirical.hpp"
#include "dynpov/poverty_model.hpp"

namespace dynpov {

/// Households with this many components or more share one threshold row.
inline constexpr int kTopComponentsBucket = 7;

inline int components_bucket(int components) noexcept {
  return components >= kTopComponentsBucket ? kTopComponentsBucket : components;
}

struct PanelRecord {
  std::string household_id;
  int year = 0;
  int components = 1;  // 7 stands for "7+"
  double income = 0.0;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct PanelLoad {
  std::vector<PanelRecord> records;
  std::vector<RowError> row_errors;
};

/// Header must name household_id, year, components and income (any order;
/// extra columns ignored) or Error(ParseError) is thrown. Bad rows are skipped
/// and listed in row_errors; this includes negative incomes and repeated
/// (household_id, year) keys.
PanelLoad parse_panel(std::istream& in);
/// Error(MissingInput) if the file cannot be opened.
PanelLoad load_panel(const std::filesystem::path& path);

class ThresholdTable {
 public:
  /// `components` is bucketed, so any value >= 7 addresses the 7+ row.
  void set(int components, int year, double threshold);
  bool contains(int components, int year) const;
  /// Error(MissingThreshold) if absent.
  double at(int components, int year) const;
  std::vector<int> years() const;
  bool empty() const noexcept { return cells_.empty(); }

  /// Error(InvalidArgument) unless every threshold is finite and > 0 and
  /// thresholds increase with components within each year.
  void validate() const;

 private:
  std::map<std::pair<int, int>, double> cells_;  // (year, bucket) -> threshold
};

/// Header `components,year,threshold`; components are 1..6 or `7+`. Any
/// malformed row or a failed validate() is Error(ParseError).
ThresholdTable parse_thresholds(std::istream& in);
/// An unreadable file is Error(MissingThreshold).
ThresholdTable load_thresholds(const std::filesystem::path& path);

struct StandardizedRecord {
  std::string household_id;
  int year = 0;
  int components = 1;
  double raw_income = 0.0;
  double income = 0.0;
};

/// income = raw * threshold(base_components, base_year) / threshold(components, year).
/// A raw income equal to its own threshold maps exactly to the base threshold.
std::vector<StandardizedRecord> standardize(std::span<const PanelRecord> records,
                                            const ThresholdTable& thresholds,
                                            int base_components, int base_year);

/// Alternative rule applied in two steps: divide by an equivalence scale
/// (relative to `base_components`), then deflate by a price index (relative to
/// `base_year`). Missing entries are Error(MissingThreshold).
std::vector<StandardizedRecord> standardize_two_step(std::span<const PanelRecord> records,
                                                     const std::map<int, double>& scale_by_components,
                                                     const std::map<int, double>& index_by_year,
                                                     int base_components, int base_year);

/// y_ep = fraction * y_p.
double derive_extreme_threshold(double y_p, double fraction = 0.6);

/// Sorted distinct years appearing in the records.
std::vector<int> wave_years(std::span<const StandardizedRecord> records);

/// Households observed at every wave. Incomes and classes are indexed
/// [household][wave]; households are ordered by id.
struct Cohort {
  std::vector<int> waves;
  std::vector<std::string> household_ids;
  std::vector<std::vector<double>> incomes;
  std::vector<std::vector<PovertyClass>> classes;
  PovertyThresholds thresholds{0.6, 1.0};
  std::size_t dropped = 0;

  std::size_t households() const noexcept { return household_ids.size(); }
  std::size_t observations() const noexcept { return households() * waves.size(); }
  /// Error(InvalidArgument) for a year that is not a wave.
  std::size_t wave_index(int year) const;
  CrossSection cross_section(std::size_t wave) const;
};

/// Keeps the households with an income at every wave year (records at other
/// years are ignored). Error(EmptyCohort) if none remain; Error(InvalidArgument)
/// for an empty or unordered wave list or a repeated (household, year).
Cohort build_cohort(std::span<const StandardizedRecord> records, std::span<const int> waves,
                    const PovertyThresholds& thresholds);

/// Groups arbitrary records (not necessarily complete) into one cross-section
/// per year, for per-wave observed indexes.
std::vector<CrossSection> cross_sections_by_year(std::span<const StandardizedRecord> records,
                                                 const PovertyThresholds& thresholds);

}  // namespace dynpov
