#pragma once

// Dense 3x3 Markov numerics: eigendecomposition, matrix exponential and
// logarithm, irreducibility and stationary distributions.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace dynpov {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

inline constexpr double kRowSumTol = 1e-9;
inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kGeneratorNegativeTol = 1e-9;

/// Row-stochastic 3x3 matrix P(t) or an estimate of it.
class TransitionMatrix {
 public:
  TransitionMatrix() : m_(Matrix3::Identity()) {}
  /// Throws Error(InvalidArgument) if an entry leaves [0,1] by more than
  /// kProbabilityTol or a row sum is off by more than kRowSumTol.
  explicit TransitionMatrix(const Matrix3& m);

  const Matrix3& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix3 m_;
};

/// Infinitesimal generator (rates per year).
class GeneratorMatrix {
 public:
  GeneratorMatrix() : m_(Matrix3::Zero()) {}
  /// Off-diagonals must be >= -kGeneratorNegativeTol and rows must sum to 0
  /// within kRowSumTol.
  explicit GeneratorMatrix(const Matrix3& m);

  const Matrix3& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix3 m_;
};

/// Probability vector over the three classes, e.g. mu or pi.
class Distribution3 {
 public:
  Distribution3() : w_{0.0, 0.0, 1.0} {}
  explicit Distribution3(std::array<double, 3> weights);

  double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  const std::array<double, 3>& weights() const noexcept { return w_; }
  Eigen::RowVector3d row() const { return {w_[0], w_[1], w_[2]}; }

 private:
  std::array<double, 3> w_;
};

struct EigenSystem {
  /// Sorted by descending real part, then descending imaginary part.
  std::array<std::complex<double>, 3> values;
  Eigen::Matrix3cd vectors;  // columns are right eigenvectors
  Eigen::Matrix3cd inverse;
  double condition = 0.0;  // 2-norm condition number of `vectors`

  Matrix3 reconstruct() const;
};

/// Throws Error(NonDiagonalizable) when the eigenvector matrix has condition
/// number above 1e12.
EigenSystem eigen_decompose(const Matrix3& m);

/// P(t) = exp(t * generator). Uses the eigendecomposition when the
/// eigenvector matrix is well conditioned (<= 1e8) and scaling-and-squaring
/// with a Taylor series otherwise.
TransitionMatrix matrix_exp(const GeneratorMatrix& generator, double t);

/// log(P) / eta via the eigendecomposition. All eigenvalues must be real and
/// strictly positive. Off-diagonal entries in [-1e-9, 0) are clamped to zero
/// and the diagonal re-balanced; anything more negative is NotEmbeddable.
/// Irreducibility is not checked here; see estimation::estimate_generator.
GeneratorMatrix matrix_log_generator(const TransitionMatrix& p, double eta);

/// Solves pi' * generator = 0 with sum(pi) = 1.
Distribution3 stationary_distribution(const GeneratorMatrix& generator);

/// True iff the graph of strictly positive off-diagonal entries is strongly
/// connected. Valid for both transition and generator matrices.
bool is_irreducible(const Matrix3& m);
inline bool is_irreducible(const TransitionMatrix& p) { return is_irreducible(p.matrix()); }
inline bool is_irreducible(const GeneratorMatrix& g) { return is_irreducible(g.matrix()); }

/// Scaling-and-squaring Taylor exponential of an arbitrary 3x3 matrix.
Matrix3 expm_taylor(const Matrix3& a);

double max_abs_diff(const Matrix3& a, const Matrix3& b);

}  // namespace dynpov
