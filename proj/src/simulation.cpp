#include "dynpov/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

using CumRow = std::array<double, 3>;

CumRow cumulative(double a, double b) { return {a, a + b, 1.0}; }

int draw_class(const CumRow& cum, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < cum[0]) return 0;
  if (u < cum[1]) return 1;
  return 2;
}

// Cumulative rows of exp(d * Lambda) for each grid step, d measured from the
// previous grid time (from 0 for the first).
std::vector<std::array<CumRow, 3>> step_tables(const SimConfig& config) {
  std::vector<std::array<CumRow, 3>> out;
  double prev = 0.0;
  for (double t : config.grid) {
    const Matrix3 p = matrix_exp(config.params.lambda, t - prev).matrix();
    std::array<CumRow, 3> rows;
    for (int i = 0; i < 3; ++i) rows[static_cast<std::size_t>(i)] = cumulative(p(i, 0), p(i, 1));
    out.push_back(rows);
    prev = t;
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<std::pair<double, double>> limit_at(const SimConfig& config, IndexKind kind,
                                                  const ClassMass& mass) {
  const auto& p = config.params;
  try {
    const double v = index_value(kind, p.moments, mass, p.thresholds.y_p(), config.index_options);
    const double var =
        index_variance(kind, p.moments, mass, p.thresholds.y_p(), config.index_options);
    return std::pair{v, var};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoPoorMass || e.kind() == ErrorKind::ZeroPoorIncome) {
      return std::nullopt;
    }
    throw;
  }
}

}  // namespace

void validate_config(const SimConfig& config) {
  if (config.n_agents < 1) throw Error(ErrorKind::InvalidArgument, "n_agents must be >= 1");
  if (config.replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
  if (config.grid.empty()) throw Error(ErrorKind::InvalidArgument, "observation grid is empty");
  for (std::size_t k = 0; k < config.grid.size(); ++k) {
    const double t = config.grid[k];
    if (!std::isfinite(t) || t < 0.0 || (k > 0 && !(t > config.grid[k - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing with t >= 0");
    }
  }
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be in (0, 1]");
  }
  validate_spec(config.dist_spec, config.params.thresholds);
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
  return std::mt19937_64(seq);
}

int ClassJumpPath::state_at(double t) const {
  if (states.empty()) throw Error(ErrorKind::InvalidArgument, "empty path");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return states.front();
  return states[static_cast<std::size_t>(it - times.begin()) - 1];
}

ClassJumpPath simulate_class_path(const GeneratorMatrix& lambda, int initial, double horizon,
                                  std::mt19937_64& rng) {
  if (initial < 0 || initial > 2 || !(horizon >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "initial class must be 0..2 and horizon >= 0");
  }
  ClassJumpPath path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.states.push_back(initial);
  int state = initial;
  double t = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double rate = -lambda(state, state);
    if (!(rate > 0.0)) break;
    t += std::exponential_distribution<double>(rate)(rng);
    if (t >= horizon) break;
    const double u = unit(rng) * rate;
    int next = -1;
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == state) continue;
      acc += lambda(state, j);
      next = j;
      if (u < acc) break;
    }
    state = next;
    path.times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

double sample_income(PovertyClass cls, const ClassDistributionSpec& spec,
                     const PovertyThresholds& thresholds, std::mt19937_64& rng) {
  switch (cls) {
    case PovertyClass::C1: return sample_law(spec.c1, rng);
    case PovertyClass::C2: return sample_law(spec.c2, rng);
    case PovertyClass::C3:
      if (spec.c3) return sample_law(*spec.c3, rng);
      return thresholds.y_p() * (1.0 + std::exponential_distribution<double>(1.0)(rng));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

CohortRun run_cohort(const SimConfig& config) {
  validate_config(config);
  const auto steps = step_tables(config);
  const auto& mu = config.params.mu;
  const CumRow initial = cumulative(mu[0], mu[1]);
  const double y_p = config.params.thresholds.y_p();
  const std::size_t n_grid = config.grid.size();

  CohortRun run;
  run.grid = config.grid;
  run.replications = config.replications;
  run.n_agents = config.n_agents;
  run.values.resize(config.replications * n_grid);
  run.counts.resize(config.replications * n_grid);

  parallel_for(config.replications, config.threads, [&](std::size_t rep) {
    std::mt19937_64 rng = replication_rng(config.seed, rep);
    std::vector<std::uint8_t> state(config.n_agents);
    for (auto& s : state) s = static_cast<std::uint8_t>(draw_class(initial, rng));
    std::vector<double> poor;
    poor.reserve(config.n_agents);
    for (std::size_t k = 0; k < n_grid; ++k) {
      const auto& rows = steps[k];
      ClassCounts counts;
      poor.clear();
      for (auto& s : state) {
        s = static_cast<std::uint8_t>(draw_class(rows[s], rng));
        const auto cls = static_cast<PovertyClass>(s);
        switch (cls) {
          case PovertyClass::C1: ++counts.n1; break;
          case PovertyClass::C2: ++counts.n2; break;
          case PovertyClass::C3: ++counts.n3; break;
        }
        if (cls != PovertyClass::C3) {
          poor.push_back(sample_income(cls, config.dist_spec, config.params.thresholds, rng));
        }
      }
      run.counts[rep * n_grid + k] = counts;
      run.values[rep * n_grid + k] = compute_indexes(config.n_agents, poor, y_p);
    }
  });
  return run;
}

std::optional<double> index_of(const EmpiricalIndexes& e, IndexKind kind) {
  switch (kind) {
    case IndexKind::H: return e.h;
    case IndexKind::I: return e.i;
    case IndexKind::G: return e.g;
    case IndexKind::S: return e.s;
  }
  return std::nullopt;
}

const CoverageCell& CoverageReport::cell(IndexKind kind, std::size_t k) const {
  const std::size_t n_grid = cells.size() / kAllIndexes.size();
  const auto offset = static_cast<std::size_t>(kind) * n_grid + k;
  if (k >= n_grid || offset >= cells.size()) {
    throw Error(ErrorKind::InvalidArgument, "coverage cell out of range");
  }
  return cells[offset];
}

CoverageReport summarize_coverage(const SimConfig& config, const CohortRun& run) {
  CoverageReport report;
  report.n_agents = run.n_agents;
  report.replications = run.replications;
  report.alpha = config.alpha;
  report.seed = config.seed;
  const double root_n = std::sqrt(static_cast<double>(run.n_agents));

  for (IndexKind kind : kAllIndexes) {
    for (std::size_t k = 0; k < run.grid.size(); ++k) {
      CoverageCell cell;
      cell.kind = kind;
      cell.t = run.grid[k];
      const auto limit = limit_at(config, kind, class_mass(config.params, cell.t));
      if (!limit) {
        cell.defined = false;
        cell.coverage = std::numeric_limits<double>::quiet_NaN();
        cell.mean_z = cell.var_z = cell.coverage;
        cell.n_excluded = run.replications;
        report.cells.push_back(cell);
        continue;
      }
      cell.value_inf = limit->first;
      cell.variance_inf = limit->second;
      const Band band = confidence_band(cell.value_inf, cell.variance_inf, run.n_agents, config.alpha);
      cell.ci_low = band.low;
      cell.ci_high = band.high;

      std::size_t inside = 0;
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t rep = 0; rep < run.replications; ++rep) {
        const auto x = index_of(run.at(rep, k), kind);
        if (!x) {
          ++cell.n_excluded;
          continue;
        }
        ++cell.n_used;
        if (band.low <= *x && *x <= band.high) ++inside;
        const double z = root_n * (*x - cell.value_inf);
        sum += z;
        sum_sq += z * z;
      }
      if (cell.n_used == 0) {
        cell.coverage = cell.mean_z = cell.var_z = std::numeric_limits<double>::quiet_NaN();
      } else {
        const auto m = static_cast<double>(cell.n_used);
        cell.coverage = static_cast<double>(inside) / m;
        cell.mean_z = sum / m;
        cell.var_z = cell.n_used > 1 ? std::max(0.0, (sum_sq - m * cell.mean_z * cell.mean_z) / (m - 1.0))
                                     : 0.0;
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

CoverageReport coverage_experiment(const SimConfig& config) {
  if (config.replications < 100) {
    throw Error(ErrorKind::InvalidArgument, "coverage needs at least 100 replications");
  }
  return summarize_coverage(config, run_cohort(config));
}

std::vector<SllnPoint> slln_experiment(const SimConfig& config, std::span<const std::size_t> sizes) {
  std::vector<SllnPoint> out;
  for (std::size_t n : sizes) {
    SimConfig c = config;
    c.n_agents = n;
    const CohortRun run = run_cohort(c);
    SllnPoint point;
    point.n_agents = n;
    for (std::size_t idx = 0; idx < kAllIndexes.size(); ++idx) {
      const IndexKind kind = kAllIndexes[idx];
      double sum = 0.0;
      std::size_t used = 0;
      for (std::size_t k = 0; k < run.grid.size(); ++k) {
        const auto limit = limit_at(c, kind, class_mass(c.params, run.grid[k]));
        if (!limit) continue;
        for (std::size_t rep = 0; rep < run.replications; ++rep) {
          const auto x = index_of(run.at(rep, k), kind);
          if (!x) continue;
          sum += std::abs(*x - limit->first);
          ++used;
        }
      }
      point.mean_abs_error[idx] =
          used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used);
    }
    out.push_back(point);
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "slope needs two or more (x, y) pairs");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "log-log slope needs positive values");
    }
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw Error(ErrorKind::InvalidArgument, "x values must differ");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace dynpov
