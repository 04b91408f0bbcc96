// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynpov/asymptotic.hpp"
#include "dynpov/empirical.hpp"
#include "dynpov/error.hpp"
#include "dynpov/estimation.hpp"
#include "dynpov/ingestion.hpp"
#include "dynpov/markov.hpp"
#include "dynpov/poverty_model.hpp"
#include "dynpov/simulation.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dynpov;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d %s: %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

ClassMass mass_of(const Eigen::RowVector3d& row) { return {row(0), row(1), row(2)}; }

// mu' exp(t L) by Eigen's matrix exponential.
Eigen::RowVector3d occupancy(const std::array<double, 3>& mu, const Matrix3& lambda, double t) {
  const Eigen::RowVector3d m(mu[0], mu[1], mu[2]);
  return m * oracle::expm(t * lambda);
}

// Null vector of L' normalised to sum 1.
Eigen::RowVector3d stationary_oracle(const Matrix3& lambda) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(lambda.transpose());
  Eigen::Vector3d v = lu.kernel().col(0);
  v /= v.sum();
  return v.transpose();
}

// Uniform class laws on [0, y_ep] and [y_ep, y_p] with the printed mu and generator.
SimConfig uniform_published_config() {
  SimConfig c;
  c.params.mu = Distribution3(fixtures::kMu);
  c.params.lambda = GeneratorMatrix(fixtures::lambda_hat());
  c.params.thresholds = fixtures::thresholds();
  c.dist_spec = {UniformLaw{0.0, fixtures::kYep}, UniformLaw{fixtures::kYep, fixtures::kYp},
                 std::nullopt};
  c.params.moments = moments_from_spec(c.dist_spec);
  c.grid.clear();
  for (int t = 0; t <= 14; t += 2) c.grid.push_back(t);
  c.threads = 0;
  return c;
}

Outcome generator_reproduction() {
  const TransitionMatrix p(fixtures::p_hat());
  (void)matrix_log_generator(p, 2.0);
  const auto start = Clock::now();
  const GeneratorMatrix g = matrix_log_generator(p, 2.0);
  const double elapsed = seconds_since(start);
  const double entry = max_abs_diff(g.matrix(), fixtures::lambda_hat());
  const double roundtrip = max_abs_diff(oracle::expm(2.0 * g.matrix()), fixtures::p_hat());
  const bool ok = entry <= 5e-3 && roundtrip < 1e-8 && elapsed < 1e-3;
  return {ok, "max|log - printed| = " + fmt("%.3g", entry) + " (tol 5e-3), roundtrip " +
                  fmt("%.3g", roundtrip) + ", call " + fmt("%.3g", elapsed * 1e3) + " ms"};
}

Outcome eigenvalues() {
  const auto es = eigen_decompose(fixtures::p_hat());
  std::vector<double> got;
  double imag = 0.0;
  for (const auto& v : es.values) {
    got.push_back(v.real());
    imag = std::max(imag, std::fabs(v.imag()));
  }
  std::sort(got.rbegin(), got.rend());
  const double r = std::sqrt(1401.0);
  const double want[3] = {1.0, (71.0 + r) / 200.0, (71.0 - r) / 200.0};
  double err = imag;
  for (int k = 0; k < 3; ++k) err = std::max(err, std::fabs(got[k] - want[k]));
  return {err <= 1e-9, "max eigenvalue error " + fmt("%.3g", err)};
}

Outcome estimation_pipeline() {
  auto cohort_of = [](const fixtures::PanelFixture& f) {
    const auto recs = standardize(f.records, fixtures::threshold_table(), 1, 1998);
    return build_cohort(recs, fixtures::waves(), fixtures::thresholds());
  };
  const auto full = estimate(cohort_of(fixtures::full_panel()), {});
  bool exact = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) exact &= full.p_hat(i, j) == fixtures::p_hat()(i, j);
  }
  EstimateOptions opts;
  opts.window = std::pair{1998, 2002};
  const auto reduced = estimate(cohort_of(fixtures::reduced_panel()), opts);
  bool two_decimals = true;
  double dev = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double x = reduced.p_hat(i, j);
      dev = std::max(dev, std::fabs(x - fixtures::p_hat_forecast()(i, j)));
      two_decimals &= std::fabs(std::round(x * 100.0) / 100.0 - fixtures::p_hat_forecast()(i, j)) < 1e-12;
    }
  }
  return {exact && two_decimals, std::string("full window exact: ") + (exact ? "yes" : "no") +
                                     ", reduced window max dev " + fmt("%.3g", dev)};
}

Outcome boundary_classification() {
  const auto th = fixtures::thresholds();
  const PovertyThresholds unit(0.6, 1.0);
  const bool ok = classify(th.y_ep(), th) == PovertyClass::C1 &&
                  classify(th.y_p(), th) == PovertyClass::C2 &&
                  classify(std::nextafter(th.y_p(), INFINITY), th) == PovertyClass::C3 &&
                  classify(0.6, unit) == PovertyClass::C1 && classify(1.0, unit) == PovertyClass::C2;
  return {ok, "y_ep -> C1, y_p -> C2"};
}

Outcome gini_equivalence() {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> size(2, 500);
  std::uniform_real_distribution<double> income(0.0, 5479.5);
  double worst = 0.0;
  double worst_scale = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> x(static_cast<std::size_t>(size(rng)));
    for (auto& v : x) v = income(rng);
    if (rep % 10 == 0) x[0] = x[1];  // ties
    double num = 0.0, sum = 0.0;
    for (double a : x) {
      sum += a;
      for (double b : x) num += std::fabs(a - b);
    }
    const double naive = num / (2.0 * static_cast<double>(x.size()) * sum);
    const double ds = gini_double_sum(x);
    const double so = gini_sorted(x);
    worst = std::max({worst, std::fabs(ds - so), std::fabs(so - naive)});
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= 37.25;
    worst_scale = std::max(worst_scale, std::fabs(gini_sorted(scaled) - so));
  }
  return {worst <= 1e-12 && worst_scale <= 1e-12,
          "max disagreement " + fmt("%.3g", worst) + ", scale " + fmt("%.3g", worst_scale)};
}

Outcome lemma4_closed_forms() {
  const std::vector<ClassDistributionSpec> specs{
      {UniformLaw{0.0, 0.6}, UniformLaw{0.6, 1.0}, std::nullopt},
      {UniformLaw{0.0, fixtures::kYep}, UniformLaw{fixtures::kYep, fixtures::kYp}, std::nullopt},
      {TruncatedExponentialLaw{2.0, 0.0, 0.6}, TruncatedExponentialLaw{-1.0, 0.6, 1.0}, std::nullopt},
      {TruncatedExponentialLaw{5.0, 0.0, 0.6}, UniformLaw{0.6, 1.0}, std::nullopt}};
  const std::vector<ClassMass> masses{{0.05, 0.068, 0.882}, {0.3, 0.4, 0.3}, {0.2, 0.0, 0.8},
                                      {0.0, 0.1, 0.9}};
  double theta_err = 0.0;
  double sigma_err = 0.0;
  std::string sigma_note;
  for (const auto& spec : specs) {
    const auto m = moments_from_spec(spec);
    for (const auto& cm : masses) {
      const oracle::PoorMixture mix{oracle::density_of(spec.c1), oracle::density_of(spec.c2), cm.p1,
                                    cm.p2};
      const double th = oracle::theta_nested(mix);
      theta_err = std::max(theta_err, std::fabs(theta(m, cm) - th) / th);
      const double s2 = oracle::sigma2_nested(mix);
      try {
        sigma_err = std::max(sigma_err, std::fabs(sigma2_gini(m, cm) - s2) / s2);
      } catch (const Error& e) {
        sigma_err = INFINITY;
        sigma_note = std::string(" (closed form threw ") + std::string(to_string(e.kind())) + ")";
      }
    }
  }
  return {theta_err <= 1e-8 && sigma_err <= 1e-8,
          "theta rel err " + fmt("%.3g", theta_err) + ", sigma2 rel err " + fmt("%.3g", sigma_err) +
              sigma_note};
}

Outcome slln_slope() {
  SimConfig c = uniform_published_config();
  c.replications = 500;
  c.seed = 7;
  const std::vector<std::size_t> sizes{500, 2000, 8000};
  const auto points = slln_experiment(c, sizes);
  const std::vector<double> x{500.0, 2000.0, 8000.0};
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t idx = 0; idx < kAllIndexes.size(); ++idx) {
    std::vector<double> y;
    for (const auto& p : points) y.push_back(p.mean_abs_error[idx]);
    const double slope = loglog_slope(x, y);
    ok &= std::fabs(slope + 0.5) <= 0.1;
    detail << to_string(kAllIndexes[idx]) << " slope " << fmt("%.3f", slope) << ' ';
  }
  return {ok, detail.str()};
}

Outcome clt_coverage() {
  SimConfig c = uniform_published_config();
  c.n_agents = 2000;
  c.replications = 2000;
  c.alpha = 0.05;
  c.seed = 11;
  const auto rep = coverage_experiment(c);
  bool ok = true;
  std::ostringstream detail;
  for (IndexKind kind : kAllIndexes) {
    double lo = 1.0, hi = 0.0, worst_var = 0.0;
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      const auto& cell = rep.cell(kind, k);
      if (!cell.defined) {
        ok = false;
        continue;
      }
      lo = std::min(lo, cell.coverage);
      hi = std::max(hi, cell.coverage);
      worst_var = std::max(worst_var, std::fabs(cell.var_z - cell.variance_inf) / cell.variance_inf);
    }
    ok &= lo >= 0.925 && hi <= 0.975 && worst_var <= 0.15;
    detail << to_string(kind) << " cov [" << fmt("%.4f", lo) << ',' << fmt("%.4f", hi)
           << "] var dev " << fmt("%.3f", worst_var) << "; ";
  }
  return {ok, detail.str()};
}

Outcome degenerate_classes() {
  const ClassDistributionSpec spec{PointMassLaw{fixtures::kY1}, PointMassLaw{fixtures::kY2},
                                   std::nullopt};
  ModelParams p;
  p.mu = Distribution3(fixtures::kMu);
  p.lambda = GeneratorMatrix(fixtures::lambda_hat());
  p.thresholds = fixtures::thresholds();
  p.moments = moments_from_spec(spec);
  double g_err = 0.0;
  double num_err = 0.0;
  for (double t : {0.0, 1.0, 2.0, 6.0, 14.0, 50.0}) {
    const Eigen::RowVector3d q = occupancy(fixtures::kMu, fixtures::lambda_hat(), t);
    const double d = fixtures::kY2 - fixtures::kY1;
    const double h = q(0) + q(1);
    const double xbar = fixtures::kY1 * q(0) + fixtures::kY2 * q(1);
    const double g_want = d * q(0) * q(1) / (h * xbar);
    const double num_want = 2.0 * d * q(0) * q(1);
    g_err = std::max(g_err, std::fabs(g_inf(p, t) - g_want) / g_want);
    const double num = gini_numerator(p.moments, class_mass(p, t), GiniNumerator::Lemma4);
    num_err = std::max(num_err, std::fabs(num - num_want) / num_want);
  }
  return {g_err <= 1e-12 && num_err <= 1e-12,
          "g_inf rel err " + fmt("%.3g", g_err) + ", numerator rel err " + fmt("%.3g", num_err)};
}

Outcome long_run_shape() {
  const ModelParams p = fixtures::published_params();
  bool ok = true;
  std::ostringstream detail;
  const Eigen::RowVector3d pi = stationary_oracle(fixtures::lambda_hat());
  for (IndexKind kind : kAllIndexes) {
    bool monotone = true;
    double prev = index_value(kind, p, 0.0);
    for (double t = 0.25; t <= 14.0 + 1e-9; t += 0.25) {
      const double v = index_value(kind, p, t);
      monotone &= v < prev;
      prev = v;
    }
    const double stationary = index_value(kind, p.moments, mass_of(pi), p.thresholds.y_p());
    const double gap = std::fabs(index_value(kind, p, 500.0) - stationary);
    ok &= monotone && gap <= 1e-3;
    detail << to_string(kind) << (monotone ? " decreasing" : " NOT decreasing") << " gap500 "
           << fmt("%.2g", gap) << "; ";
  }

  // One simulated 914-household cohort against the 95% bands at the eight waves.
  SimConfig c;
  c.params = p;
  c.dist_spec = {EmpiricalLaw{fixtures::pool_c1()}, EmpiricalLaw{fixtures::pool_c2()}, std::nullopt};
  c.n_agents = 914;
  c.replications = 1;
  c.seed = 1998;
  c.grid.clear();
  for (int t = 0; t <= 14; t += 2) c.grid.push_back(t);
  const auto run = run_cohort(c);
  const auto series = index_series(p, c.grid, c.n_agents, 0.05);
  std::size_t inside = 0, total = 0;
  for (std::size_t idx = 0; idx < series.size(); ++idx) {
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      const auto x = index_of(run.at(0, k), series[idx].kind);
      ++total;
      if (x && *x >= series[idx].points[k].ci_low && *x <= series[idx].points[k].ci_high) ++inside;
    }
  }
  ok &= inside >= 29;
  detail << "band containment " << inside << '/' << total;
  return {ok, detail.str()};
}

}  // namespace

int main() {
  report(1, "generator reproduction", generator_reproduction);
  report(2, "eigenvalue fixture", eigenvalues);
  report(3, "estimation pipeline", estimation_pipeline);
  report(4, "boundary classification", boundary_classification);
  report(5, "empirical gini equivalence", gini_equivalence);
  report(6, "closed forms vs numeric integration", [] {
    const auto start = Clock::now();
    Outcome o = lemma4_closed_forms();
    const double s = seconds_since(start);
    if (s >= 5.0) o.pass = false;
    return o;
  });
  report(7, "slln convergence", [] {
    const auto start = Clock::now();
    Outcome o = slln_slope();
    if (seconds_since(start) >= 120.0) o.pass = false;
    return o;
  });
  report(8, "clt coverage", [] {
    const auto start = Clock::now();
    Outcome o = clt_coverage();
    if (seconds_since(start) >= 300.0) o.pass = false;
    return o;
  });
  report(9, "degenerate class consistency", degenerate_classes);
  report(10, "long-run shape and bands", long_run_shape);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
