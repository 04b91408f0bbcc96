#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "dynpov/income_law.hpp"

namespace dynpov::fixtures {
namespace {

Matrix3 rows(std::initializer_list<double> v) {
  Matrix3 m;
  auto it = v.begin();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = *it++;
  }
  return m;
}

// Beta quantiles at (k + 1/2) / n mapped to [lo, hi], then shifted and scaled
// to the exact target mean and sample standard deviation.
std::vector<double> matched_pool(std::size_t n, double mean, double sd, double lo, double hi) {
  const double width = hi - lo;
  const double m = (mean - lo) / width;
  const double v = (sd / width) * (sd / width);
  const double total = m * (1.0 - m) / v - 1.0;
  const double a = m * total;
  const double b = (1.0 - m) * total;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    x[k] = lo + width * boost::math::ibeta_inv(a, b, p);
  }
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double xi : x) ss += (xi - xm) * (xi - xm);
  const double xs = std::sqrt(ss / static_cast<double>(n - 1));
  for (double& xi : x) {
    xi = mean + (xi - xm) * (sd / xs);
    if (!(xi > lo && xi < hi)) throw std::logic_error("matched pool left its interval");
  }
  return x;
}

}  // namespace

Matrix3 p_hat() { return rows({0.37, 0.38, 0.25, 0.11, 0.38, 0.51, 0.01, 0.03, 0.96}); }
Matrix3 lambda_hat() { return rows({-0.59, 0.58, 0.01, 0.17, -0.59, 0.42, 0.00, 0.02, -0.02}); }
Matrix3 p_hat_forecast() { return rows({0.32, 0.41, 0.27, 0.12, 0.37, 0.51, 0.01, 0.02, 0.97}); }
Matrix3 lambda_hat_forecast() {
  return rows({-0.70, 0.69, 0.01, 0.20, -0.63, 0.43, 0.00, 0.02, -0.02});
}

PovertyThresholds thresholds() { return PovertyThresholds(kYep, kYp); }

std::vector<int> waves() { return {1998, 2000, 2002, 2004, 2006, 2008, 2010, 2012}; }

ThresholdTable threshold_table() {
  static constexpr double table[8][7] = {
      {5479.50, 9147.74, 12212.24, 14929.12, 17426.45, 19667.65, 21963.74},
      {5833.54, 9722.56, 12931.00, 15847.76, 18472.86, 21000.72, 23334.13},
      {5919.60, 9866.04, 13121.88, 16081.68, 18745.44, 21310.68, 23678.52},
      {6623.88, 11039.76, 14682.84, 17994.84, 20975.52, 23845.92, 26495.40},
      {6986.40, 11644.08, 15486.60, 18979.80, 22123.80, 25151.16, 27945.84},
      {7197.60, 11996.04, 15954.72, 19553.52, 22792.44, 25911.48, 28790.52},
      {7145.76, 11909.52, 15839.64, 19412.52, 22628.04, 25724.52, 28582.80},
      {7134.36, 11890.56, 15814.44, 19381.56, 22592.04, 25683.60, 28537.32},
  };
  ThresholdTable t;
  const auto years = waves();
  for (std::size_t y = 0; y < years.size(); ++y) {
    for (int c = 1; c <= 7; ++c) t.set(c, years[y], table[y][c - 1]);
  }
  return t;
}

std::vector<double> pool_c1() {
  static const std::vector<double> pool = matched_pool(182, kY1, 977.95, 0.0, kYep);
  return pool;
}

std::vector<double> pool_c2() {
  static const std::vector<double> pool = matched_pool(416, kY2, 613.02, kYep, kYp);
  return pool;
}

ClassIncomeMoments pool_moments() {
  const auto c1 = pool_c1();
  const auto c2 = pool_c2();
  const LawMoments a = sample_moments(c1);
  const LawMoments b = sample_moments(c2);
  return {a.mean, b.mean, a.second, b.second, a.zbar, b.zbar, a.q, b.q};
}

ModelParams published_params() {
  ModelParams p;
  p.mu = Distribution3(kMu);
  p.lambda = GeneratorMatrix(lambda_hat());
  p.thresholds = thresholds();
  p.moments = pool_moments();
  return p;
}

CountMatrix counts_from_percent(const Matrix3& p, std::array<std::uint64_t, 3> row_units) {
  CountMatrix k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      k[i][j] = row_units[i] * static_cast<std::uint64_t>(std::llround(100.0 * p(i, j)));
    }
  }
  return k;
}

std::vector<std::vector<int>> walks_from_counts(const CountMatrix& counts, std::size_t length) {
  if (length == 0) throw std::invalid_argument("walk length must be positive");
  CountMatrix edges = counts;
  std::array<std::uint64_t, 3> loops{};
  for (int i = 0; i < 3; ++i) {
    loops[i] = edges[i][i];
    edges[i][i] = 0;
  }
  auto out_left = [&](int i) { return edges[i][0] + edges[i][1] + edges[i][2]; };
  auto in_left = [&](int j) { return edges[0][j] + edges[1][j] + edges[2][j]; };

  // Greedy trails over the off-diagonal edges, starting where out-degree
  // exceeds in-degree when possible.
  std::vector<std::vector<int>> trails;
  for (;;) {
    int start = -1;
    long long best = 0;
    for (int i = 0; i < 3; ++i) {
      const long long surplus =
          static_cast<long long>(out_left(i)) - static_cast<long long>(in_left(i));
      if (out_left(i) > 0 && surplus > best) {
        best = surplus;
        start = i;
      }
    }
    if (start < 0) {
      for (int i = 0; i < 3 && start < 0; ++i) {
        if (out_left(i) > 0) start = i;
      }
    }
    if (start < 0) break;
    std::vector<int> trail{start};
    int cur = start;
    while (out_left(cur) > 0) {
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        if (j != cur && edges[cur][j] > 0 && (next < 0 || edges[cur][j] > edges[cur][next])) {
          next = j;
        }
      }
      --edges[cur][next];
      cur = next;
      trail.push_back(cur);
    }
    trails.push_back(std::move(trail));
  }

  struct Piece {
    std::vector<int> nodes;
    std::array<std::uint64_t, 3> pad{};
    bool visits(int v) const { return std::find(nodes.begin(), nodes.end(), v) != nodes.end(); }
  };
  std::vector<Piece> pieces;
  for (const auto& trail : trails) {
    const std::size_t steps = trail.size() - 1;
    for (std::size_t from = 0; from < steps; from += length) {
      const std::size_t to = std::min(from + length, steps);
      pieces.push_back({std::vector<int>(trail.begin() + static_cast<std::ptrdiff_t>(from),
                                         trail.begin() + static_cast<std::ptrdiff_t>(to) + 1),
                        {}});
    }
  }

  // Pad every piece to `length` steps with self-loops at nodes it visits.
  for (auto& piece : pieces) {
    std::uint64_t need = length - (piece.nodes.size() - 1);
    while (need > 0) {
      int v = -1;
      for (int node : piece.nodes) {
        if (loops[node] > 0 && (v < 0 || loops[node] > loops[v])) v = node;
      }
      if (v < 0) throw std::logic_error("not enough self-loops to pad a walk");
      const std::uint64_t take = std::min(need, loops[v]);
      piece.pad[v] += take;
      loops[v] -= take;
      need -= take;
    }
  }

  // Leftover loops become households that never move, so each node's leftover
  // must be a multiple of `length`. Shift padding from C3 to fix C1 and C2.
  for (int target = 0; target < 2; ++target) {
    while (loops[target] % length != 0) {
      bool moved = false;
      for (auto& piece : pieces) {
        if (piece.pad[2] > 0 && piece.visits(target) && loops[target] > 0) {
          --piece.pad[2];
          ++piece.pad[target];
          --loops[target];
          ++loops[2];
          moved = true;
          break;
        }
      }
      if (!moved) throw std::logic_error("cannot balance leftover self-loops");
    }
  }
  if (loops[2] % length != 0) throw std::logic_error("total counts not a multiple of length");

  std::vector<std::vector<int>> walks;
  for (const auto& piece : pieces) {
    std::vector<int> walk;
    std::array<bool, 3> padded{};
    for (int node : piece.nodes) {
      walk.push_back(node);
      if (!padded[node]) {
        walk.insert(walk.end(), piece.pad[node], node);
        padded[node] = true;
      }
    }
    walks.push_back(std::move(walk));
  }
  for (int i = 0; i < 3; ++i) {
    for (std::uint64_t k = 0; k < loops[i] / length; ++k) walks.emplace_back(length + 1, i);
  }
  return walks;
}

std::vector<PanelRecord> panel_from_walks(const std::vector<std::vector<int>>& walks,
                                          const std::vector<int>& years) {
  const auto c1 = pool_c1();
  const auto c2 = pool_c2();
  const ThresholdTable table = threshold_table();
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::vector<PanelRecord> records;
  for (std::size_t h = 0; h < walks.size(); ++h) {
    const int components = 1 + static_cast<int>(h % 8);
    std::string id = std::to_string(h);
    id.insert(0, 5 - std::min<std::size_t>(5, id.size()), '0');
    for (std::size_t w = 0; w < years.size(); ++w) {
      double standardized = 0.0;
      switch (walks[h][w]) {
        case 0: standardized = c1[(101 * k1++) % c1.size()]; break;
        case 1: standardized = c2[(101 * k2++) % c2.size()]; break;
        default:
          standardized = kYp * (1.05 + 0.009 * static_cast<double>((7 * h + 3 * w) % 100));
      }
      const double raw = standardized * table.at(components, years[w]) / kYp;
      records.push_back({"hh" + id, years[w], components, raw});
    }
  }
  return records;
}

PanelFixture full_panel() {
  PanelFixture f;
  f.counts = counts_from_percent(p_hat(), {2, 4, 57});
  f.walks = walks_from_counts(f.counts, waves().size() - 1);
  f.records = panel_from_walks(f.walks, waves());
  return f;
}

PanelFixture reduced_panel() {
  PanelFixture f;
  f.counts = counts_from_percent(p_hat_forecast(), {1, 2, 47});
  f.walks = walks_from_counts(f.counts, 2);
  for (auto& walk : f.walks) walk.resize(waves().size(), walk.back());
  f.records = panel_from_walks(f.walks, waves());
  return f;
}

}  // namespace dynpov::fixtures
