#include "dynpov/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

// Neumaier summation; the Gini routes are compared to 1e-12.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double total(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

void require_poor(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::NoPoor, "no poor households in the cross-section");
}

void require_income_mass(double sum) {
  if (!(sum > 0.0)) {
    throw Error(ErrorKind::ZeroIncomeMass, "total poor income is zero; Gini is 0/0");
  }
}

}  // namespace

std::string_view to_string(PovertyClass c) noexcept {
  switch (c) {
    case PovertyClass::C1: return "C1";
    case PovertyClass::C2: return "C2";
    case PovertyClass::C3: return "C3";
  }
  return "?";
}

std::string_view to_string(IndexStatus s) noexcept {
  switch (s) {
    case IndexStatus::Ok: return "ok";
    case IndexStatus::NoPoor: return "NoPoor";
    case IndexStatus::ZeroIncomeMass: return "ZeroIncomeMass";
  }
  return "?";
}

PovertyClass classify(double income, const PovertyThresholds& thresholds) {
  if (!(income >= 0.0)) {
    throw Error(ErrorKind::NegativeIncome, "income must be >= 0 (got " + std::to_string(income) + ")");
  }
  if (income <= thresholds.y_ep()) return PovertyClass::C1;
  if (income <= thresholds.y_p()) return PovertyClass::C2;
  return PovertyClass::C3;
}

CrossSection make_cross_section(int year, std::span<const std::string> ids,
                                std::span<const double> incomes,
                                const PovertyThresholds& thresholds) {
  if (ids.size() != incomes.size()) {
    throw Error(ErrorKind::InvalidArgument, "ids and incomes differ in length");
  }
  CrossSection cs;
  cs.year = year;
  cs.observations.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    cs.observations.push_back({ids[k], incomes[k], classify(incomes[k], thresholds)});
  }
  return cs;
}

ClassCounts class_counts(const CrossSection& cs) {
  ClassCounts c;
  for (const auto& o : cs.observations) {
    switch (o.cls) {
      case PovertyClass::C1: ++c.n1; break;
      case PovertyClass::C2: ++c.n2; break;
      case PovertyClass::C3: ++c.n3; break;
    }
  }
  return c;
}

std::vector<double> poor_incomes(const CrossSection& cs) {
  std::vector<double> out;
  for (const auto& o : cs.observations) {
    if (o.cls != PovertyClass::C3) out.push_back(o.income);
  }
  return out;
}

double headcount(const CrossSection& cs) {
  const ClassCounts c = class_counts(cs);
  if (c.total() == 0) throw Error(ErrorKind::InvalidArgument, "empty cross-section");
  return static_cast<double>(c.poor()) / static_cast<double>(c.total());
}

double income_gap(const CrossSection& cs, const PovertyThresholds& thresholds) {
  const std::vector<double> poor = poor_incomes(cs);
  require_poor(poor.size());
  return 1.0 - total(poor) / (thresholds.y_p() * static_cast<double>(poor.size()));
}

double gini_double_sum(std::span<const double> incomes) {
  require_poor(incomes.size());
  const double sum = total(incomes);
  require_income_mass(sum);
  CompensatedSum pairs;
  for (double a : incomes) {
    for (double b : incomes) pairs.add(std::abs(a - b));
  }
  return pairs.value() / (2.0 * static_cast<double>(incomes.size()) * sum);
}

double gini_sorted(std::span<const double> incomes) {
  std::vector<double> sorted(incomes.begin(), incomes.end());
  std::sort(sorted.begin(), sorted.end());
  require_poor(sorted.size());
  const double sum = total(sorted);
  require_income_mass(sum);
  const auto n = static_cast<double>(sorted.size());
  CompensatedSum weighted;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    weighted.add((2.0 * static_cast<double>(k + 1) - n - 1.0) * sorted[k]);
  }
  return weighted.value() / (n * sum);
}

double gini_poor(const CrossSection& cs) { return gini_sorted(poor_incomes(cs)); }

double sen(double h, double i, double g) { return h * (i + (1.0 - i) * g); }

EmpiricalIndexes compute_indexes(std::size_t population, std::span<double> poor, double y_p) {
  if (population == 0 || poor.size() > population) {
    throw Error(ErrorKind::InvalidArgument, "population must be >= number of poor and >= 1");
  }
  EmpiricalIndexes out;
  out.h = static_cast<double>(poor.size()) / static_cast<double>(population);
  if (poor.empty()) {
    out.status = IndexStatus::NoPoor;
    out.s = 0.0;
    return out;
  }
  std::sort(poor.begin(), poor.end());
  const auto n = static_cast<double>(poor.size());
  const double sum = total(poor);
  out.i = 1.0 - sum / (y_p * n);
  if (!(sum > 0.0)) {
    out.status = IndexStatus::ZeroIncomeMass;
    return out;
  }
  CompensatedSum weighted;
  for (std::size_t k = 0; k < poor.size(); ++k) {
    weighted.add((2.0 * static_cast<double>(k + 1) - n - 1.0) * poor[k]);
  }
  out.g = weighted.value() / (n * sum);
  out.s = sen(out.h, *out.i, *out.g);
  return out;
}

EmpiricalIndexes compute_indexes(const CrossSection& cs, const PovertyThresholds& thresholds) {
  std::vector<double> poor = poor_incomes(cs);
  return compute_indexes(cs.observations.size(), poor, thresholds.y_p());
}

}  // namespace dynpov
