#include "dynpov/estimation.hpp"

#include <cmath>
#include <string>

#include "dynpov/error.hpp"

namespace dynpov {

std::uint64_t TransitionCounts::row_total(int i) const {
  const auto& row = k[static_cast<std::size_t>(i)];
  return row[0] + row[1] + row[2];
}

std::uint64_t TransitionCounts::total() const { return row_total(0) + row_total(1) + row_total(2); }

TransitionCounts count_transitions(std::span<const ClassPath> paths, std::size_t n_waves) {
  TransitionCounts counts;
  for (std::size_t h = 0; h < paths.size(); ++h) {
    const ClassPath& path = paths[h];
    if (path.size() != n_waves) {
      throw Error(ErrorKind::IncompletePath, "path " + std::to_string(h) + " has " +
                                                 std::to_string(path.size()) + " labels, expected " +
                                                 std::to_string(n_waves));
    }
    for (std::size_t w = 0; w < path.size(); ++w) {
      if (!path[w]) {
        throw Error(ErrorKind::IncompletePath,
                    "path " + std::to_string(h) + " misses wave " + std::to_string(w));
      }
    }
    for (std::size_t w = 1; w < path.size(); ++w) {
      ++counts.k[static_cast<std::size_t>(class_index(*path[w - 1]))]
                [static_cast<std::size_t>(class_index(*path[w]))];
    }
  }
  return counts;
}

TransitionCounts count_transitions(const Cohort& cohort, std::size_t first, std::size_t last) {
  if (first > last || last >= cohort.waves.size()) {
    throw Error(ErrorKind::InvalidWindow, "wave range out of bounds");
  }
  TransitionCounts counts;
  for (const auto& path : cohort.classes) {
    for (std::size_t w = first + 1; w <= last; ++w) {
      ++counts.k[static_cast<std::size_t>(class_index(path[w - 1]))]
                [static_cast<std::size_t>(class_index(path[w]))];
    }
  }
  return counts;
}

TransitionMatrix estimate_transition_matrix(const TransitionCounts& counts) {
  Matrix3 p;
  for (int i = 0; i < 3; ++i) {
    const std::uint64_t total = counts.row_total(i);
    if (total == 0) {
      throw Error(ErrorKind::EmptyRow,
                  "class C" + std::to_string(i + 1) + " is never observed as an origin");
    }
    for (int j = 0; j < 3; ++j) {
      p(i, j) = static_cast<double>(counts.k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                static_cast<double>(total);
    }
  }
  return TransitionMatrix(p);
}

GeneratorMatrix estimate_generator(const TransitionMatrix& p, double eta) {
  if (!is_irreducible(p)) {
    throw Error(ErrorKind::NotIrreducible, "transition matrix is reducible; no ergodic generator");
  }
  return matrix_log_generator(p, eta);
}

Distribution3 estimate_initial_distribution(const CrossSection& cs) {
  const ClassCounts c = class_counts(cs);
  if (c.total() == 0) throw Error(ErrorKind::InvalidArgument, "empty cross-section");
  const auto n = static_cast<double>(c.total());
  return Distribution3({static_cast<double>(c.n1) / n, static_cast<double>(c.n2) / n,
                        static_cast<double>(c.n3) / n});
}

ClassIncomeMoments estimate_class_moments(std::span<const double> c1, std::span<const double> c2,
                                          PairDenominator denominator) {
  if (c1.size() < 2 || c2.size() < 2) {
    throw Error(ErrorKind::InsufficientClassData,
                "need at least 2 incomes in C1 and C2 (have " + std::to_string(c1.size()) + ", " +
                    std::to_string(c2.size()) + ")");
  }
  const LawMoments a = sample_moments(c1, denominator);
  const LawMoments b = sample_moments(c2, denominator);
  return ClassIncomeMoments{a.mean, b.mean, a.second, b.second, a.zbar, b.zbar, a.q, b.q};
}

EstimationReport estimate(const Cohort& cohort, const EstimateOptions& options) {
  if (!(options.eta > 0.0) || !std::isfinite(options.eta)) {
    throw Error(ErrorKind::InvalidArgument, "eta must be a positive number of years");
  }
  std::size_t first = 0;
  std::size_t last = cohort.waves.empty() ? 0 : cohort.waves.size() - 1;
  if (options.window) {
    const auto [from, to] = *options.window;
    auto index_of = [&](int year) {
      for (std::size_t w = 0; w < cohort.waves.size(); ++w) {
        if (cohort.waves[w] == year) return w;
      }
      throw Error(ErrorKind::InvalidWindow,
                  "window bound " + std::to_string(year) + " is not a wave year");
    };
    first = index_of(from);
    last = index_of(to);
  }
  if (cohort.waves.empty() || last <= first) {
    throw Error(ErrorKind::InvalidWindow, "window must contain at least two waves");
  }
  for (std::size_t w = first + 1; w <= last; ++w) {
    const double gap = static_cast<double>(cohort.waves[w] - cohort.waves[w - 1]);
    if (std::abs(gap - options.eta) > 1e-9) {
      throw Error(ErrorKind::InvalidWindow,
                  "waves " + std::to_string(cohort.waves[w - 1]) + " and " +
                      std::to_string(cohort.waves[w]) + " are not eta apart");
    }
  }

  EstimationReport report;
  report.eta = options.eta;
  report.window.assign(cohort.waves.begin() + static_cast<std::ptrdiff_t>(first),
                       cohort.waves.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  report.counts = count_transitions(cohort, first, last);
  report.p_hat = estimate_transition_matrix(report.counts);

  auto& diag = report.diagnostics;
  diag.households = cohort.households();
  diag.irreducible = is_irreducible(report.p_hat);
  const EigenSystem eig = eigen_decompose(report.p_hat.matrix());
  diag.p_eigenvalues = eig.values;
  diag.eigenvalues_real_positive = true;
  for (const auto& v : eig.values) {
    if (std::abs(v.imag()) > 1e-9 || !(v.real() > 0.0)) diag.eigenvalues_real_positive = false;
  }

  std::vector<double> pooled[3];
  for (std::size_t h = 0; h < cohort.households(); ++h) {
    for (std::size_t w = first; w <= last; ++w) {
      pooled[class_index(cohort.classes[h][w])].push_back(cohort.incomes[h][w]);
    }
  }
  for (std::size_t c = 0; c < 3; ++c) diag.class_sizes[c] = pooled[c].size();

  ModelParams& params = report.params;
  params.thresholds = cohort.thresholds;
  params.lambda = estimate_generator(report.p_hat, options.eta);
  params.mu = estimate_initial_distribution(cohort.cross_section(first));
  params.moments = estimate_class_moments(pooled[0], pooled[1], options.pair_denominator);
  diag.roundtrip_error =
      max_abs_diff(matrix_exp(params.lambda, options.eta).matrix(), report.p_hat.matrix());
  return report;
}

}  // namespace dynpov
