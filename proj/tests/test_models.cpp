#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "fcs/models.hpp"
#include "support/test_support.hpp"

using namespace fcs;
using fcs::testing::Random;

namespace {

TwoLeadLattice lattice(Index nl, Index nr, double coupling) {
  TwoLeadLattice l;
  l.sites_left = nl;
  l.sites_right = nr;
  l.hopping = 1.0;
  l.coupling = coupling;
  return l;
}

}  // namespace

TEST_CASE("build_two_lead") {
  SUBCASE("1+1 sites, no coupling") {
    TwoLeadLattice l = lattice(1, 1, 0.0);
    l.onsite_left = 0.3;
    l.onsite_right = -0.2;
    const auto ops = build_two_lead(l);
    CHECK(max_abs(ops.h.matrix() - ops.h0.matrix()) == 0.0);
    CHECK(ops.h0.matrix()(0, 0).real() == 0.3);
    CHECK(ops.h0.matrix()(1, 1).real() == -0.2);
    CHECK(ops.q.matrix()(0, 0).real() == 0.0);
    CHECK(ops.q.matrix()(1, 1).real() == 1.0);
  }
  SUBCASE("2+2 sites, coupling 0.5") {
    const auto ops = build_two_lead(lattice(2, 2, 0.5));
    const Matrix diff = ops.h.matrix() - ops.h0.matrix();
    int nonzero = 0;
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 4; ++j) {
        if (diff(i, j) != Complex(0.0, 0.0)) {
          ++nonzero;
          CHECK(std::abs(diff(i, j)) == doctest::Approx(0.5));
        }
      }
    }
    CHECK(nonzero == 2);
    CHECK(max_abs(commutator(ops.q.matrix(), ops.h0.matrix())) == 0.0);
  }
  SUBCASE("20+20 spectrum within the band") {
    const auto ops = build_two_lead(lattice(20, 20, 1.0));
    const auto e = hermitian_eig(ops.h).eigenvalues;
    CHECK(e.minCoeff() >= -2.0 - 1e-10);
    CHECK(e.maxCoeff() <= 2.0 + 1e-10);
  }
  CHECK_THROWS_AS(build_two_lead(lattice(0, 2, 1.0)), ContractError);
}

TEST_CASE("fermi_occupation") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = -1;
  h(1, 1) = 1;
  const HermitianOperator h0(h);
  const auto n = fermi_occupation(h0, 0.0);
  CHECK(n.is_pure());
  CHECK(std::abs(n.matrix()(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(n.matrix()(1, 1)) < 1e-14);
  CHECK(max_abs(fermi_occupation(h0, -5.0).matrix()) == 0.0);
  CHECK(max_abs(fermi_occupation(h0, 5.0).matrix() - identity(2)) < 1e-14);
  CHECK_THROWS_AS(fermi_occupation(h0, 1.0 + 1e-9), DegeneracyError);

  const auto ops = build_two_lead(lattice(5, 5, 1.0));
  const auto sea = fermi_occupation(ops.h0, 0.1);
  CHECK(std::llround(sea.matrix().trace().real()) == 6);  // odd chains have a zero mode
  const auto half = fermi_occupation(build_two_lead(lattice(6, 4, 1.0)).h0, 0.0);
  CHECK(std::llround(half.matrix().trace().real()) == 5);
  CHECK(commutator_defect(ops.q, sea) < 1e-10);

  const auto again = fermi_occupation(ops.h0, 0.1);
  CHECK(max_abs(again.matrix() - sea.matrix()) == 0.0);
}

TEST_CASE("thermal_occupation") {
  const auto ops = build_two_lead(lattice(6, 6, 1.0));
  SUBCASE("large beta approaches the Fermi sea") {
    const auto nt = thermal_occupation(ops.h0, 200.0, 0.1, 0.1, ops.q);
    const auto nf = fermi_occupation(ops.h0, 0.1);
    CHECK(max_abs(nt.matrix() - nf.matrix()) <= 1e-6);
  }
  SUBCASE("H0 = 0 gives one half") {
    const HermitianOperator zero(Matrix::Zero(4, 4));
    ChargeProjection q({false, false, true, true});
    const auto n = thermal_occupation(zero, 3.0, 0.0, 0.0, q);
    CHECK(max_abs(n.matrix() - 0.5 * identity(4)) < 1e-15);
    CHECK(n.gap() == doctest::Approx(0.5));
  }
  SUBCASE("single mode Fermi function") {
    const double eps = 0.8;
    const HermitianOperator h(eps * identity(1));
    ChargeProjection q({true});
    const auto n = thermal_occupation(h, 1.0, 0.0, 0.0, q);
    CHECK(n.matrix()(0, 0).real() == doctest::Approx(1.0 / (1.0 + std::exp(eps))).epsilon(1e-14));
  }
  SUBCASE("particle-hole relation on a symmetric spectrum") {
    const auto a = thermal_occupation(ops.h0, 2.0, 0.3, -0.2, ops.q);
    const HermitianOperator minus(-ops.h0.matrix());
    const auto b = thermal_occupation(minus, 2.0, -0.3, 0.2, ops.q);
    CHECK(max_abs(a.matrix() + b.matrix() - identity(12)) < 1e-10);
  }
  SUBCASE("block structure gate") {
    CHECK_THROWS_AS(thermal_occupation(ops.h, 1.0, 0.0, 0.0, ops.q), ContractError);
    CHECK_THROWS_AS(thermal_occupation(ops.h0, -1.0, 0.0, 0.0, ops.q), ContractError);
  }
  SUBCASE("spectrum strictly inside (0, 1)") {
    const auto n = thermal_occupation(ops.h0, 1.0, 0.5, -0.5, ops.q);
    const auto e = hermitian_eig(HermitianOperator(n.matrix())).eigenvalues;
    CHECK(e.minCoeff() > n.gap() - 1e-12);
    CHECK(e.maxCoeff() < 1.0 - n.gap() + 1e-12);
    CHECK(n.gap() > 0.0);
    CHECK(commutator_defect(ops.q, n) == 0.0);
  }
}

TEST_CASE("scenario gates") {
  const auto ops = build_two_lead(lattice(3, 3, 1.0));
  const auto nf = fermi_occupation(ops.h, 0.1);  // sea of the coupled chain
  CHECK_THROWS_AS(Scenario(nf, ops.q, UnitaryOperator::identity(6)), IntegrityError);
  const auto ok = fermi_occupation(ops.h0, 0.1);
  CHECK_THROWS_AS(Scenario(ok, ops.q, UnitaryOperator::identity(4)), ContractError);
}

TEST_CASE("propagate") {
  Random rnd(2);
  const HermitianOperator h(rnd.hermitian(4));
  PropagatorSpec zero;
  CHECK(max_abs(propagate(zero, h).matrix() - identity(4)) == 0.0);

  SUBCASE("stationary diagonal") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 0.5;
    d(1, 1) = -1.0;
    d(2, 2) = 2.0;
    PropagatorSpec spec;
    spec.total_time = 1.3;
    const Matrix u = propagate(spec, HermitianOperator(d)).matrix();
    for (Index k = 0; k < 3; ++k) {
      CHECK(std::abs(u(k, k) - std::exp(Complex(0.0, -1.3) * d(k, k))) < 1e-14);
    }
  }
  SUBCASE("constant drive equals the static closed form") {
    const HermitianOperator v(rnd.hermitian(4));
    PropagatorSpec spec;
    spec.mode = PropagationMode::driven;
    spec.total_time = 1.0;
    spec.steps = 64;
    spec.drive = Drive({{v, Envelope{}}});
    const Matrix driven = propagate(spec, h).matrix();
    const Matrix closed = testing::taylor_exp(Complex(0.0, -1.0) * (h.matrix() + v.matrix()));
    CHECK(max_abs(driven - closed) < 1e-8);
  }
  SUBCASE("second-order convergence and accuracy gate") {
    const HermitianOperator v(rnd.hermitian(4));
    Envelope env;
    env.shape = Envelope::Shape::gaussian;
    env.center = 1.0;
    env.width = 0.4;
    PropagatorSpec spec;
    spec.mode = PropagationMode::driven;
    spec.total_time = 2.0;
    spec.drive = Drive({{v, env}});
    spec.steps = 8;
    CHECK_THROWS_AS(propagate(spec, h), AccuracyError);
    spec.steps = 4000;
    const Matrix u1 = propagate(spec, h).matrix();
    spec.steps = 8000;
    const Matrix u2 = propagate(spec, h).matrix();
    spec.steps = 16000;
    const Matrix u3 = propagate(spec, h).matrix();
    CHECK(max_abs(u2 - u1) >= 3.0 * max_abs(u3 - u2));
    CHECK(max_abs(u3.adjoint() * u3 - identity(4)) < 1e-9);
  }
}

TEST_CASE("dyson_first_term") {
  Random rnd(17);
  const HermitianOperator h0(rnd.hermitian(4));
  CHECK(max_abs(dyson_first_term(h0, Drive{}, 0.0, 1.0, 16)) == 0.0);

  const Matrix hd = rnd.hermitian(4);
  const auto spec = hermitian_eig(HermitianOperator(hd));
  const Matrix commuting = spec.apply([](double e) { return std::cos(e); });
  const HermitianOperator hc(hd);
  const HermitianOperator vc = HermitianOperator::from_hermitian_part(commuting);
  const Matrix first = dyson_first_term(hc, Drive({{vc, Envelope{}}}), -0.5, 1.5, 16);
  CHECK(max_abs(first - Complex(0.0, -2.0) * vc.matrix()) < 1e-12);

  Envelope env;
  env.shape = Envelope::Shape::gaussian;
  env.width = 0.5;
  const Drive drive({{HermitianOperator(rnd.hermitian(4)), env}});
  // Midpoint rule: successive differences shrink by ~4.
  const Matrix q1 = dyson_first_term(h0, drive, -2.0, 2.0, 64);
  const Matrix q2 = dyson_first_term(h0, drive, -2.0, 2.0, 128);
  const Matrix q3 = dyson_first_term(h0, drive, -2.0, 2.0, 256);
  const double ratio = (q2 - q1).norm() / (q3 - q2).norm();
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
  CHECK((q3 - q2).norm() < 1e-6);
  CHECK_THROWS_AS(dyson_first_term(h0, drive, 0.0, 1.0, 4), ContractError);
  CHECK_THROWS_AS(dyson_first_term(h0, drive, 1.0, 1.0, 16), ContractError);
}

TEST_CASE("lattice recipe") {
  LatticeScenarioSpec spec;
  spec.lattice = lattice(4, 4, 1.0);
  spec.evolution.total_time = 3.0;
  const Scenario s = build_lattice_scenario(spec);
  CHECK(s.dim() == 8);
  CHECK(commutator_defect(s.q(), s.n()) <= 1e-10);

  spec.evolution.coupled = false;
  const Scenario free = build_lattice_scenario(spec);
  CHECK(max_abs(commutator(free.u().matrix(), free.n().matrix())) < 1e-12);

  spec.lattice.bias = 0.5;
  CHECK_THROWS_AS(build_lattice_scenario(spec), ContractError);
  spec.state.kind = OccupationKind::thermal;
  spec.state.beta = 2.0;
  const Scenario biased = build_lattice_scenario(spec);
  CHECK(biased.n().mu_left() == doctest::Approx(0.25));
  CHECK(biased.n().mu_right() == doctest::Approx(-0.25));

  DriveTermSpec bond;
  bond.kind = DriveTermSpec::Kind::bond;
  bond.site = -1;
  bond.strength = 0.3;
  const Matrix g = drive_generator(bond, spec.lattice).matrix();
  CHECK(g(3, 4).real() == doctest::Approx(-0.3));
  bond.site = 3;
  CHECK_THROWS_AS(drive_generator(bond, spec.lattice), ContractError);
}

// ---------------------------------------------------------------------------
// Chiral model

namespace {

ChiralModel phase_model(Index grid_points, double window) {
  ChiralModel m;
  m.grid_points = grid_points;
  m.energy_cutoff = std::numbers::pi * static_cast<double>(grid_points) / window;
  m.scatter.kind = ChiralScatter::Kind::phase;
  m.scatter.amplitude = 1.0;
  m.scatter.phase_ratio = 0.5;
  m.scatter.width = 2.0;
  return m;
}

// Continuum Hilbert-Schmidt norm of [N, U] for a diagonal U(t):
// ||[N, U]||_2^2 = (4 pi^2)^{-1} sum_c int |w| |u_c(w)|^2 dw with u_c the
// Fourier transform of U_c(t) - 1.
double continuum_hs_commutator(const ChiralScatter& sc) {
  const int nt = 3001, nw = 4001;
  const double t_lo = sc.center - sc.width, t_hi = sc.center + sc.width;
  const double dt = (t_hi - t_lo) / (nt - 1);
  const double w_max = 60.0, dw = 2.0 * w_max / (nw - 1);
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    std::vector<Complex> f(nt);
    for (int j = 0; j < nt; ++j) {
      const double t = t_lo + j * dt;
      const double phase = sc.generator(t)(c, c).real();
      f[j] = std::exp(Complex(0.0, -phase)) - 1.0;
    }
    for (int k = 0; k < nw; ++k) {
      const double w = -w_max + k * dw;
      Complex ft = 0.0;
      for (int j = 0; j < nt; ++j) ft += f[j] * std::exp(Complex(0.0, w * (t_lo + j * dt)));
      total += std::abs(w) * std::norm(ft * dt) * dw;
    }
  }
  return std::sqrt(total / (4.0 * std::numbers::pi * std::numbers::pi));
}

}  // namespace

TEST_CASE("build_chiral") {
  SUBCASE("identity scatter") {
    ChiralModel m;
    m.grid_points = 16;
    const auto ops = build_chiral(m);
    CHECK(max_abs(ops.scenario.u().matrix() - identity(32)) < 1e-14);
  }
  SUBCASE("N and Q are projections, Parseval holds") {
    for (double cutoff : {8.0, 16.0}) {
      ChiralModel m = phase_model(64, 24.0);
      m.energy_cutoff = cutoff;
      m.scatter.width = 1.0;
      const auto ops = build_chiral(m);
      const Matrix& n = ops.scenario.n().matrix();
      const auto e = hermitian_eig(HermitianOperator(n)).eigenvalues;
      for (Index k = 0; k < e.size(); ++k) {
        CHECK(std::min(std::abs(e(k)), std::abs(e(k) - 1.0)) < 1e-10);
      }
      CHECK(max_abs(ops.fourier.adjoint() * ops.fourier - identity(64)) < 1e-10);
      CHECK(commutator_defect(ops.scenario.q(), ops.scenario.n()) < 1e-10);
    }
  }
  SUBCASE("phase scatter matches the continuum commutator norm") {
    const ChiralModel m = phase_model(128, 24.0);
    const auto ops = build_chiral(m);
    const Matrix c = commutator(ops.scenario.n().matrix(), ops.scenario.u().matrix());
    const double discrete = hilbert_schmidt_norm(c);
    const double continuum = continuum_hs_commutator(m.scatter);
    CHECK(std::abs(discrete - continuum) <= 0.05 * continuum);
  }
  SUBCASE("support outside the window") {
    ChiralModel m = phase_model(16, 8.0);
    m.scatter.width = 5.0;
    CHECK_THROWS_AS(build_chiral(m), ContractError);
  }
  SUBCASE("window is exact on the inner half of the band") {
    CHECK(chiral_energy_window(0.49, 1.0) == 1.0);
    CHECK(chiral_energy_window(0.91, 1.0) == 0.0);
    const double mid = chiral_energy_window(0.7, 1.0);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
  }
}
