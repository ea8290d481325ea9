#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "fcs/opcore.hpp"
#include "support/test_support.hpp"

using namespace fcs;
using fcs::testing::Random;

TEST_CASE("hermitian_eig") {
  SUBCASE("diagonal input sorts ascending") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 3;
    a(1, 1) = 1;
    a(2, 2) = 2;
    const auto s = hermitian_eig(HermitianOperator(a));
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(s.eigenvalues(2) == doctest::Approx(3.0));
  }
  SUBCASE("identity") {
    const auto s = hermitian_eig(HermitianOperator(identity(4)));
    for (Index k = 0; k < 4; ++k) CHECK(s.eigenvalues(k) == doctest::Approx(1.0));
    CHECK(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - identity(4)) < 1e-12);
  }
  SUBCASE("random 6x6 reconstruction") {
    Random rnd(11);
    const Matrix a = rnd.hermitian(6);
    const auto s = hermitian_eig(HermitianOperator(a));
    CHECK(max_abs(s.reconstruct() - a) <= 1e-10 * (1.0 + max_abs(a)));
    CHECK(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - identity(6)) < 1e-10);
    for (Index k = 1; k < 6; ++k) CHECK(s.eigenvalues(k) >= s.eigenvalues(k - 1));
  }
}

TEST_CASE("operator construction gates") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator{a}, IntegrityError);
  CHECK_THROWS_AS(UnitaryOperator{2.0 * identity(2)}, IntegrityError);
  CHECK_THROWS_AS(ProjectionOperator{0.5 * identity(2)}, IntegrityError);
  Matrix bad = identity(2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianOperator{bad}, IntegrityError);
  CHECK_THROWS_AS(HermitianOperator{Matrix::Zero(2, 3)}, ContractError);
}

TEST_CASE("unitary_exp") {
  Random rnd(5);
  SUBCASE("t = 0 gives identity") {
    const auto u = unitary_exp(HermitianOperator(rnd.hermitian(4)), 0.0);
    CHECK(max_abs(u.matrix() - identity(4)) == 0.0);
  }
  SUBCASE("diag(pi), t = 1") {
    const auto u = unitary_exp(HermitianOperator(std::numbers::pi * identity(1)), 1.0);
    CHECK(std::abs(u.matrix()(0, 0) - Complex(-1.0, 0.0)) < 1e-15);
  }
  SUBCASE("random 5x5 against Taylor/squaring") {
    const Matrix h = rnd.hermitian(5);
    const auto u = unitary_exp(HermitianOperator(h), 0.7);
    const Matrix ref = testing::taylor_exp(Complex(0.0, -0.7) * h);
    CHECK(max_abs(u.matrix() - ref) < 1e-9);
    CHECK(max_abs(u.matrix().adjoint() * u.matrix() - identity(5)) < 1e-10);
  }
}

TEST_CASE("determinant") {
  CHECK(std::abs(determinant(identity(7)) - 1.0) < 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(0.0, 3.0);
  CHECK(std::abs(determinant(d) - Complex(0.0, 6.0)) < 1e-15);

  Random rnd(3);
  const Matrix a = rnd.matrix(5, 5);
  const Complex ref = testing::cofactor_det(a);
  CHECK(std::abs(determinant(a) - ref) <= 1e-10 * std::abs(ref));

  const Matrix b = rnd.matrix(5, 5);
  const Complex ab = determinant(a * b);
  CHECK(std::abs(ab - determinant(a) * determinant(b)) <= 1e-9 * std::abs(ab));

  Matrix singular = rnd.matrix(4, 4);
  singular.row(2) = singular.row(1);
  singular.row(3).setZero();
  CHECK(determinant(singular) == Complex(0.0, 0.0));
}

TEST_CASE("singular values and Schatten norms") {
  SUBCASE("rank-3 projection") {
    Matrix p = Matrix::Zero(5, 5);
    for (Index k = 0; k < 3; ++k) p(k, k) = 1.0;
    const RealVector s = singular_values(p);
    CHECK(s.size() == 5);
    CHECK(s(0) == doctest::Approx(1.0));
    CHECK(s(2) == doctest::Approx(1.0));
    CHECK(s(3) == doctest::Approx(0.0));
    CHECK(schatten_norm(p, 1.0) == doctest::Approx(3.0));
  }
  SUBCASE("diag(-4, 3)") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -4;
    a(1, 1) = 3;
    const RealVector s = singular_values(a);
    CHECK(s(0) == doctest::Approx(4.0));
    CHECK(s(1) == doctest::Approx(3.0));
    CHECK(trace_norm(a) == doctest::Approx(7.0));
  }
  SUBCASE("random 4x6 Frobenius identity") {
    Random rnd(8);
    const Matrix a = rnd.matrix(4, 6);
    const RealVector s = singular_values(a);
    CHECK(s.size() == 4);
    const double f = testing::frobenius_entrywise(a);
    CHECK(std::abs(s.squaredNorm() - f * f) <= 1e-10 * f * f);
    for (Index k = 1; k < s.size(); ++k) CHECK(s(k) <= s(k - 1));
  }
  SUBCASE("random 5x5, p = 2 is Frobenius") {
    Random rnd(9);
    const Matrix a = rnd.matrix(5, 5);
    const double f = testing::frobenius_entrywise(a);
    CHECK(std::abs(hilbert_schmidt_norm(a) - f) <= 1e-12 * f);
    CHECK(trace_norm(a) >= std::abs(a.trace()));
  }
  CHECK_THROWS_AS(schatten_norm(identity(2), 0.5), ContractError);
}

TEST_CASE("conjugate_by") {
  Random rnd(21);
  const UnitaryOperator u(rnd.unitary(5));
  CHECK(max_abs(conjugate_by(u, identity(5)) - identity(5)) < 1e-12);
  const Matrix a = rnd.hermitian(5);
  CHECK(max_abs(conjugate_by(UnitaryOperator::identity(5), a) - a) == 0.0);

  const Matrix c = conjugate_by(u, a);
  CHECK(max_abs(c - c.adjoint()) < 1e-12);
  const auto ea = hermitian_eig(HermitianOperator(a)).eigenvalues;
  const auto ec = hermitian_eig(HermitianOperator::from_hermitian_part(c)).eigenvalues;
  CHECK((ea - ec).cwiseAbs().maxCoeff() < 1e-10);

  const Matrix g = rnd.matrix(5, 5);
  for (double p : {1.0, 2.0, 4.0}) {
    const double before = schatten_norm(g, p);
    CHECK(std::abs(schatten_norm(conjugate_by(u, g), p) - before) <= 1e-10 * before);
  }
  CHECK_THROWS_AS(conjugate_by(u, identity(3)), ContractError);
}

TEST_CASE("projection exponential identity") {
  Random rnd(4);
  const Matrix v = rnd.unitary(6);
  Matrix d = Matrix::Zero(6, 6);
  d(0, 0) = d(3, 3) = 1.0;
  const ProjectionOperator p(v * d * v.adjoint());
  CHECK(p.rank() == 2);
  for (double lambda : {0.3, 1.7, std::numbers::pi}) {
    const Matrix ref = testing::taylor_exp(Complex(0.0, lambda) * p.matrix());
    CHECK(max_abs(exp_i_projection(p, lambda) - ref) < 1e-12);
  }
}
