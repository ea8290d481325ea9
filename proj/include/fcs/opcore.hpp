#pragma once

// Dense complex linear algebra shared by every other part of the library.
//
// The operator wrappers (HermitianOperator, UnitaryOperator,
// ProjectionOperator) check their defining property once, at construction,
// and are immutable afterwards. A failed check raises IntegrityError naming
// the property.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fcs/errors.hpp"

namespace fcs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

namespace tolerance {
inline constexpr double hermitian_relative = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr double projection = 1e-10;
inline constexpr double reconstruction = 1e-10;
}  // namespace tolerance

/// Largest entry modulus, ||A||_max.
double max_abs(const Matrix& a);

Matrix identity(Index n);

Matrix commutator(const Matrix& a, const Matrix& b);

/// (A + A^*) / 2.
Matrix hermitian_part(const Matrix& a);

void require_square(const Matrix& a, const char* what);
void require_finite(const Matrix& a, const char* what);

class HermitianOperator {
 public:
  /// Checks ||A - A^*||_max <= 1e-12 ||A||_max and stores the exact
  /// Hermitian part.
  explicit HermitianOperator(const Matrix& a);

  /// For operators assembled from products that are Hermitian only up to
  /// roundoff (e.g. NQ with [N,Q] ~ 1e-15). Skips the relative gate.
  static HermitianOperator from_hermitian_part(const Matrix& a);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  struct Unchecked {};
  HermitianOperator(Matrix a, Unchecked) : m_(std::move(a)) {}
  Matrix m_;
};

class UnitaryOperator {
 public:
  /// Checks ||U^*U - 1||_max <= 1e-10.
  explicit UnitaryOperator(Matrix u);

  static UnitaryOperator identity(Index n);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

class ProjectionOperator {
 public:
  /// Checks Hermiticity, ||P^2 - P||_max <= 1e-10 and that every eigenvalue
  /// lies within 1e-10 of 0 or 1.
  explicit ProjectionOperator(const Matrix& p);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Index rank() const noexcept { return rank_; }

 private:
  Matrix m_;
  Index rank_ = 0;
};

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, eigenvectors as columns

  Matrix reconstruct() const;

  /// V f(Lambda) V^* for a scalar function of the eigenvalues.
  template <class F>
  Matrix apply(F&& f) const {
    ComplexVector d(eigenvalues.size());
    for (Index k = 0; k < eigenvalues.size(); ++k) d(k) = Complex(f(eigenvalues(k)));
    return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
  }
};

SpectralDecomposition hermitian_eig(const HermitianOperator& a);

/// exp(-i A t).
UnitaryOperator unitary_exp(const HermitianOperator& a, double t);

/// exp(i lambda P) = 1 + (e^{i lambda} - 1) P for a projection P.
Matrix exp_i_projection(const ProjectionOperator& p, double lambda);
Matrix exp_i_projection(const Matrix& p, double lambda);

/// det(A) by LU with partial pivoting. Returns exactly 0 when a pivot is zero
/// or subnormal.
Complex determinant(const Matrix& a);

/// Singular values in descending order; min(rows, cols) of them.
RealVector singular_values(const Matrix& a);

/// ||A||_p = (sum_i sigma_i^p)^{1/p}, p >= 1.
double schatten_norm(const Matrix& a, double p);

inline double trace_norm(const Matrix& a) { return schatten_norm(a, 1.0); }
inline double hilbert_schmidt_norm(const Matrix& a) { return schatten_norm(a, 2.0); }

/// U^* A U.
Matrix conjugate_by(const UnitaryOperator& u, const Matrix& a);

}  // namespace fcs
