#include "fcs/opcore.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

namespace fcs {

DegeneracyError::DegeneracyError(double level, double mu)
    : ContractError([&] {
        std::ostringstream os;
        os.precision(17);
        os << "one-particle level " << level << " lies within the degeneracy gate of mu = " << mu;
        return os.str();
      }()),
      level_(level) {}

ConvergenceError::ConvergenceError(const std::string& routine, long iterations)
    : IntegrityError("convergence", routine + " did not converge within " +
                                        std::to_string(iterations) + " iterations"),
      iterations_(iterations) {}

AccuracyError::AccuracyError(const std::string& invariant, double estimate, double gate)
    : IntegrityError(invariant, [&] {
        std::ostringstream os;
        os << "error estimate " << estimate << " exceeds gate " << gate;
        return os.str();
      }()),
      estimate_(estimate) {}

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

void require_square(const Matrix& a, const char* what) {
  if (a.rows() < 1 || a.rows() != a.cols()) {
    throw ContractError(std::string(what) + ": expected a non-empty square matrix, got " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw IntegrityError("finite", std::string(what) + " has non-finite entries");
}

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& a) {
  require_square(a, "HermitianOperator");
  require_finite(a, "HermitianOperator");
  const double defect = max_abs(a - a.adjoint());
  if (defect > tolerance::hermitian_relative * max_abs(a)) {
    throw IntegrityError("hermitian", "||A - A^*||_max = " + sci(defect));
  }
  m_ = hermitian_part(a);
}

HermitianOperator HermitianOperator::from_hermitian_part(const Matrix& a) {
  require_square(a, "HermitianOperator");
  require_finite(a, "HermitianOperator");
  return HermitianOperator(hermitian_part(a), Unchecked{});
}

UnitaryOperator::UnitaryOperator(Matrix u) : m_(std::move(u)) {
  require_square(m_, "UnitaryOperator");
  require_finite(m_, "UnitaryOperator");
  const double defect = max_abs(m_.adjoint() * m_ - fcs::identity(m_.rows()));
  if (defect > tolerance::unitary) {
    throw IntegrityError("unitary", "||U^*U - 1||_max = " + sci(defect));
  }
}

UnitaryOperator UnitaryOperator::identity(Index n) { return UnitaryOperator(fcs::identity(n)); }

ProjectionOperator::ProjectionOperator(const Matrix& p) {
  require_square(p, "ProjectionOperator");
  require_finite(p, "ProjectionOperator");
  const double asym = max_abs(p - p.adjoint());
  if (asym > tolerance::projection) {
    throw IntegrityError("projection", "not Hermitian, ||P - P^*||_max = " + sci(asym));
  }
  m_ = hermitian_part(p);
  const double idem = max_abs(m_ * m_ - m_);
  if (idem > tolerance::projection) {
    throw IntegrityError("projection", "||P^2 - P||_max = " + sci(idem));
  }
  const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(m_));
  for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
    const double ev = spec.eigenvalues(k);
    const double dist = std::min(std::abs(ev), std::abs(ev - 1.0));
    if (dist > tolerance::projection) {
      throw IntegrityError("projection", "eigenvalue " + sci(ev) + " is not in {0, 1}");
    }
    if (ev > 0.5) ++rank_;
  }
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition hermitian_eig(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    // Eigen's tridiagonal QR gives up after 30 sweeps per eigenvalue.
    throw ConvergenceError("hermitian_eig", 30L * static_cast<long>(a.dim()));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

UnitaryOperator unitary_exp(const HermitianOperator& a, double t) {
  if (t == 0.0 || a.matrix().isZero(0.0)) return UnitaryOperator::identity(a.dim());
  const auto spec = hermitian_eig(a);
  return UnitaryOperator(spec.apply([t](double e) { return std::exp(-kI * e * t); }));
}

Matrix exp_i_projection(const ProjectionOperator& p, double lambda) {
  return exp_i_projection(p.matrix(), lambda);
}

Matrix exp_i_projection(const Matrix& p, double lambda) {
  return identity(p.rows()) + (std::exp(kI * lambda) - 1.0) * p;
}

Complex determinant(const Matrix& a) {
  require_square(a, "determinant");
  const Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& factors = lu.matrixLU();
  Complex det = static_cast<double>(lu.permutationP().determinant());
  for (Index k = 0; k < factors.rows(); ++k) {
    const Complex pivot = factors(k, k);
    if (std::abs(pivot) < DBL_MIN) return Complex(0.0, 0.0);
    det *= pivot;
  }
  return det;
}

RealVector singular_values(const Matrix& a) {
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) {
    throw ConvergenceError("singular_values", static_cast<long>(std::min(a.rows(), a.cols())));
  }
  return svd.singularValues();
}

double schatten_norm(const Matrix& a, double p) {
  if (!(p >= 1.0)) throw ContractError("schatten_norm: p must be >= 1, got " + std::to_string(p));
  const RealVector s = singular_values(a);
  if (p == 1.0) return s.sum();
  if (p == 2.0) return std::sqrt(s.squaredNorm());
  double acc = 0.0;
  for (Index k = 0; k < s.size(); ++k) acc += std::pow(s(k), p);
  return std::pow(acc, 1.0 / p);
}

Matrix conjugate_by(const UnitaryOperator& u, const Matrix& a) {
  if (a.rows() != u.dim() || a.cols() != u.dim()) {
    throw ContractError("conjugate_by: dimension mismatch (" + std::to_string(u.dim()) + " vs " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
  }
  return u.matrix().adjoint() * a * u.matrix();
}

}  // namespace fcs
