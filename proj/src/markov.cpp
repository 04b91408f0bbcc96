#include "dynpov/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

constexpr double kNonDiagonalizableCondition = 1e12;
constexpr double kExpFallbackCondition = 1e8;
constexpr double kImagTol = 1e-9;

bool all_finite(const Matrix3& m) { return m.allFinite(); }

std::string describe(const Matrix3& m) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < 3; ++i) {
    os << (i ? "; " : "") << m(i, 0) << ' ' << m(i, 1) << ' ' << m(i, 2);
  }
  os << ']';
  return os.str();
}

// Decomposition without the diagonalizability gate, for callers that pick
// their own threshold.
EigenSystem decompose(const Matrix3& m) {
  Eigen::EigenSolver<Matrix3> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonDiagonalizable, "eigen solver did not converge");
  }
  const auto values = solver.eigenvalues();
  const auto vectors = solver.eigenvectors();

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    return values(a).imag() > values(b).imag();
  });

  EigenSystem es;
  for (int k = 0; k < 3; ++k) {
    es.values[static_cast<std::size_t>(k)] = values(order[static_cast<std::size_t>(k)]);
    es.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  Eigen::JacobiSVD<Eigen::Matrix3cd> svd(es.vectors);
  const auto& sv = svd.singularValues();
  es.condition = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  if (std::isfinite(es.condition)) es.inverse = es.vectors.inverse();
  return es;
}

Matrix3 spectral_apply(const EigenSystem& es, auto&& fn) {
  Eigen::Vector3cd d;
  for (int k = 0; k < 3; ++k) d(k) = fn(es.values[static_cast<std::size_t>(k)]);
  return (es.vectors * d.asDiagonal() * es.inverse).real();
}

}  // namespace

TransitionMatrix::TransitionMatrix(const Matrix3& m) : m_(m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "transition matrix is not finite");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (m(i, j) < -kProbabilityTol || m(i, j) > 1.0 + kProbabilityTol) {
        throw Error(ErrorKind::InvalidArgument,
                    "transition matrix entry out of [0,1]: " + describe(m));
      }
    }
    if (std::abs(m.row(i).sum() - 1.0) > kRowSumTol) {
      throw Error(ErrorKind::InvalidArgument,
                  "transition matrix row does not sum to 1: " + describe(m));
    }
  }
}

GeneratorMatrix::GeneratorMatrix(const Matrix3& m) : m_(m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "generator is not finite");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j && m(i, j) < -kGeneratorNegativeTol) {
        throw Error(ErrorKind::InvalidArgument,
                    "generator has a negative off-diagonal rate: " + describe(m));
      }
    }
    if (std::abs(m.row(i).sum()) > kRowSumTol) {
      throw Error(ErrorKind::InvalidArgument, "generator row does not sum to 0: " + describe(m));
    }
  }
}

Distribution3::Distribution3(std::array<double, 3> weights) : w_(weights) {
  for (double w : w_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "distribution weights must be finite and >= 0");
    }
  }
  if (std::abs(w_[0] + w_[1] + w_[2] - 1.0) > kRowSumTol) {
    throw Error(ErrorKind::InvalidArgument, "distribution weights must sum to 1");
  }
}

Matrix3 EigenSystem::reconstruct() const {
  return spectral_apply(*this, [](std::complex<double> z) { return z; });
}

EigenSystem eigen_decompose(const Matrix3& m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidArgument, "matrix is not finite");
  EigenSystem es = decompose(m);
  if (!(es.condition <= kNonDiagonalizableCondition)) {
    throw Error(ErrorKind::NonDiagonalizable,
                "eigenvector matrix is numerically singular (condition " +
                    std::to_string(es.condition) + ")");
  }
  return es;
}

Matrix3 expm_taylor(const Matrix3& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix3 scaled = a / std::ldexp(1.0, squarings);

  Matrix3 result = Matrix3::Identity();
  Matrix3 term = Matrix3::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

TransitionMatrix matrix_exp(const GeneratorMatrix& generator, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "matrix_exp requires finite t >= 0");
  }
  if (t == 0.0) return TransitionMatrix{};

  const EigenSystem es = decompose(generator.matrix());
  Matrix3 p;
  if (es.condition <= kExpFallbackCondition) {
    p = spectral_apply(es, [t](std::complex<double> z) { return std::exp(t * z); });
  } else {
    p = expm_taylor(t * generator.matrix());
  }
  // Round-off can leave entries a hair below zero.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (p(i, j) < 0.0 && p(i, j) >= -kGeneratorNegativeTol) p(i, j) = 0.0;
    }
  }
  return TransitionMatrix(p);
}

GeneratorMatrix matrix_log_generator(const TransitionMatrix& p, double eta) {
  if (!std::isfinite(eta) || eta <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "observation period eta must be > 0");
  }
  const EigenSystem es = decompose(p.matrix());
  for (const auto& z : es.values) {
    if (std::abs(z.imag()) > kImagTol || z.real() <= 0.0) {
      std::ostringstream os;
      os << "transition matrix has eigenvalue " << z.real() << (z.imag() < 0 ? "-" : "+")
         << std::abs(z.imag()) << "i; need real and strictly positive";
      throw Error(ErrorKind::NotEmbeddable, os.str());
    }
  }
  if (!(es.condition <= kNonDiagonalizableCondition)) {
    throw Error(ErrorKind::NonDiagonalizable, "transition matrix is not diagonalizable");
  }

  Matrix3 g = spectral_apply(es, [](std::complex<double> z) {
    return std::complex<double>(std::log(z.real()), 0.0);
  }) / eta;

  for (int i = 0; i < 3; ++i) {
    double off = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      if (g(i, j) < -kGeneratorNegativeTol) {
        throw Error(ErrorKind::NotEmbeddable,
                    "matrix logarithm has a negative off-diagonal rate: " + describe(g));
      }
      g(i, j) = std::max(g(i, j), 0.0);
      off += g(i, j);
    }
    g(i, i) = -off;
  }
  return GeneratorMatrix(g);
}

Distribution3 stationary_distribution(const GeneratorMatrix& generator) {
  if (!is_irreducible(generator)) {
    throw Error(ErrorKind::NotIrreducible, "generator is not irreducible");
  }
  Matrix3 a = generator.matrix().transpose();
  a.row(2).setOnes();
  const Vector3 pi = a.fullPivLu().solve(Vector3(0.0, 0.0, 1.0));

  std::array<double, 3> w{};
  for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = std::max(pi(i), 0.0);
  const double total = w[0] + w[1] + w[2];
  for (double& x : w) x /= total;
  return Distribution3(w);
}

bool is_irreducible(const Matrix3& m) {
  std::array<std::array<bool, 3>, 3> reach{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i == j) || m(i, j) > 0.0;
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
      }
    }
  }
  for (const auto& row : reach) {
    if (!std::all_of(row.begin(), row.end(), [](bool b) { return b; })) return false;
  }
  return true;
}

double max_abs_diff(const Matrix3& a, const Matrix3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace dynpov
