#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "fcs/engine.hpp"
#include "fcs/oracle.hpp"
#include "support/test_support.hpp"

using namespace fcs;
using fcs::testing::Random;

namespace {

Scenario identity_scenario(Random& rnd, Index dim) {
  const Scenario s = testing::random_scenario(rnd, dim, false);
  return Scenario(s.n(), s.q(), UnitaryOperator::identity(dim));
}

GeneratingFunctionSamples synthetic(Index k, const std::function<Complex(double)>& chi) {
  GeneratingFunctionSamples s;
  for (Index j = 0; j < k; ++j) s.values.push_back(chi(2.0 * std::numbers::pi * j / k));
  return s;
}

Complex brute_chi(const Scenario& s, double lambda) {
  const oracle::FockBasis basis(static_cast<int>(s.dim()));
  const auto state = oracle::quasi_free_state(s.n().matrix(), basis);
  return oracle::chi_bruteforce(s.u().matrix(), s.q().matrix(), state, basis, lambda);
}

}  // namespace

TEST_CASE("kernels at trivial points") {
  Random rnd(1);
  const Scenario s = testing::random_scenario(rnd, 6, false);
  for (auto v : {KernelVariant::naive, KernelVariant::regularized, KernelVariant::zero_temperature}) {
    CHECK(max_abs(counting_kernel(s, v, 0.0).matrix - identity(6)) < 1e-12);
  }
  const Scenario id = identity_scenario(rnd, 6);
  for (auto v : {KernelVariant::naive, KernelVariant::regularized, KernelVariant::zero_temperature}) {
    CHECK(max_abs(counting_kernel(id, v, 1.3).matrix - identity(6)) < 1e-12);
  }
  CHECK(counting_kernel(s, KernelVariant::regularized, 0.9).defect_trace_norm() >= 0.0);
}

TEST_CASE("levitov kernel against the Fock oracle") {
  Random rnd(2);
  const Scenario s = testing::random_scenario(rnd, 6, false);
  const double lambda = std::numbers::pi / 3.0;
  const Complex brute = brute_chi(s, lambda);
  CHECK(std::abs(levitov_kernel(s, lambda).matrix.determinant() - brute) <= 1e-10);
  CHECK(std::abs(KernelEvaluator(s, KernelVariant::naive).chi(lambda) - brute) <= 1e-10);

  const Scenario t = testing::random_scenario(rnd, 6, true);
  const Complex brute_t = brute_chi(t, 2.2);
  CHECK(std::abs(KernelEvaluator(t, KernelVariant::regularized).chi(2.2) - brute_t) <= 1e-10);
}

TEST_CASE("variant agreement") {
  Random rnd(3);
  for (int trial = 0; trial < 4; ++trial) {
    const bool thermal = trial % 2 == 1;
    const Scenario s = testing::random_scenario(rnd, 7, thermal);
    const Index k = minimum_grid_size(7);
    const auto naive = generating_function(s, KernelVariant::naive, k);
    const auto reg = generating_function(s, KernelVariant::regularized, k);
    for (Index j = 0; j < k; ++j) {
      const Complex d = naive.values[j];
      CHECK(std::abs(d - reg.values[j]) <= 1e-9 * (1.0 + std::abs(d)));
    }
    if (!thermal) {
      const auto zt = generating_function(s, KernelVariant::zero_temperature, k);
      for (Index j = 0; j < k; ++j) CHECK(std::abs(zt.values[j] - reg.values[j]) <= 1e-10);
      const Matrix a = regularized_kernel(s, std::numbers::pi).matrix;
      const Matrix b = zero_temperature_kernel(s, std::numbers::pi).matrix;
      CHECK(max_abs(a - b) <= 1e-10);
    } else {
      CHECK_THROWS_AS(zero_temperature_kernel(s, 1.0), ContractError);
    }
  }
}

TEST_CASE("zero-temperature kernel under free evolution") {
  LatticeScenarioSpec spec;
  spec.lattice.sites_left = 4;
  spec.lattice.sites_right = 4;
  spec.lattice.coupling = 1.0;
  spec.evolution.total_time = 3.0;
  spec.evolution.coupled = false;
  const Scenario s = build_lattice_scenario(spec);
  const auto k = zero_temperature_kernel(s, 1.1);
  CHECK(max_abs(k.matrix - identity(8)) < 1e-12);
  CHECK(std::abs(determinant(k.matrix) - 1.0) < 1e-12);
}

TEST_CASE("generating function contracts") {
  Random rnd(4);
  const Scenario s = testing::random_scenario(rnd, 5, false);
  CHECK_THROWS_AS(generating_function(s, KernelVariant::regularized, 10), ContractError);
  CHECK_THROWS_AS(generating_function(s, KernelVariant::regularized, 9), ContractError);
  const auto g = generating_function(s, KernelVariant::regularized, 11);
  CHECK(std::abs(g.values[0] - 1.0) < 1e-12);
  const auto threaded = generating_function(s, KernelVariant::regularized, 11, 3);
  for (Index j = 0; j < 11; ++j) CHECK(threaded.values[j] == g.values[j]);

  const Scenario id = identity_scenario(rnd, 5);
  for (const Complex& c : generating_function(id, KernelVariant::naive, 11).values) {
    CHECK(std::abs(c - 1.0) < 1e-12);
  }
}

TEST_CASE("charge_distribution") {
  SUBCASE("chi = 1") {
    const auto d = charge_distribution(synthetic(9, [](double) { return Complex(1.0, 0.0); }));
    CHECK(d.n_min == -4);
    CHECK(d.at(0) == doctest::Approx(1.0));
    for (long n = -4; n <= 4; ++n) {
      if (n != 0) CHECK(std::abs(d.at(n)) < 1e-15);
    }
  }
  SUBCASE("chi = e^{i lambda}") {
    const auto d = charge_distribution(
        synthetic(9, [](double l) { return std::exp(Complex(0.0, l)); }));
    CHECK(d.at(1) == doctest::Approx(1.0));
    CHECK(std::abs(d.at(0)) < 1e-15);
  }
  SUBCASE("gates") {
    CHECK_THROWS_AS(charge_distribution(synthetic(9, [](double) { return Complex(0.9, 0.0); })),
                    IntegrityError);
    // Violates conjugate symmetry (p_n would be complex).
    CHECK_THROWS_AS(charge_distribution(synthetic(9, [](double l) {
                      return Complex(1.0, 0.01 * (1.0 - std::cos(l)));
                    })),
                    IntegrityError);
    // Real and normalized but p_1 = p_-1 = -0.1.
    CHECK_THROWS_AS(charge_distribution(synthetic(9, [](double l) {
                      return Complex(1.2 - 0.2 * std::cos(l), 0.0);
                    })),
                    IntegrityError);
  }
  SUBCASE("engine against oracle distribution on a random scenario") {
    Random rnd(5);
    const Scenario s = testing::random_scenario(rnd, 7, true);
    const auto d = charge_distribution(generating_function(s, KernelVariant::regularized, 15));
    const oracle::FockBasis basis(7);
    const auto state = oracle::quasi_free_state(s.n().matrix(), basis);
    const auto ref = oracle::distribution_bruteforce(s.u().matrix(), s.q().matrix(), state, basis);
    CHECK(max_abs_difference(d, ref) <= 1e-9);
    CHECK(d.min_probability() >= -1e-10);
    CHECK(std::abs(d.total() - 1.0) <= 1e-9);
    CHECK(d.imaginary_residue <= 1e-9);
  }
}

TEST_CASE("cumulants") {
  ChargeDistribution point;
  point.n_min = -2;
  point.probabilities = {0, 0, 1, 0, 0};
  const auto c0 = cumulants(point, 6);
  for (int j = 1; j <= 6; ++j) CHECK(c0[j] == 0.0);

  ChargeDistribution bern;
  bern.n_min = 0;
  bern.probabilities = {0.5, 0.5};
  const auto cb = cumulants(bern, 4);
  CHECK(cb[1] == doctest::Approx(0.5));
  CHECK(cb[2] == doctest::Approx(0.25));
  CHECK(cb[3] == doctest::Approx(0.0));
  CHECK(cb[4] == doctest::Approx(-0.125));

  CHECK_THROWS_AS(cumulants(bern, 7), ContractError);

  Random rnd(6);
  for (bool thermal : {false, true}) {
    const Scenario s = testing::random_scenario(rnd, 6, thermal);
    const auto d = charge_distribution(generating_function(s, KernelVariant::regularized, 13));
    const auto c = cumulants(d, 4);
    CHECK(std::abs(c[1] - mean_transport_direct(s)) <= 1e-8);
    CHECK(c[2] >= -1e-9);
  }
}

TEST_CASE("mean transport") {
  Random rnd(7);
  const Scenario id = identity_scenario(rnd, 6);
  CHECK(mean_transport_direct(id) == 0.0);
  CHECK(naive_mean(id) == 0.0);
  for (bool thermal : {false, true}) {
    const Scenario s = testing::random_scenario(rnd, 8, thermal);
    CHECK(std::abs(naive_mean(s) - mean_transport_direct(s)) <= 1e-10);
  }

  // Moment cross-check: -i chi'(0) from the oracle distribution.
  const Scenario s = testing::random_scenario(rnd, 8, false);
  const oracle::FockBasis basis(8);
  const auto state = oracle::quasi_free_state(s.n().matrix(), basis);
  const auto ref = oracle::distribution_bruteforce(s.u().matrix(), s.q().matrix(), state, basis);
  double mean = 0.0;
  for (long n = ref.n_min; n <= ref.n_max(); ++n) mean += static_cast<double>(n) * ref.at(n);
  CHECK(std::abs(mean - mean_transport_direct(s)) <= 1e-8);
}

TEST_CASE("particle-hole symmetry") {
  Random rnd(8);
  CHECK(particle_hole_check(identity_scenario(rnd, 5), 11) < 1e-12);
  const Scenario s = testing::random_scenario(rnd, 8, false);
  CHECK(particle_hole_check(s, 65) <= 1e-9);
  CHECK(particle_hole_check(s, 65, KernelVariant::zero_temperature) <= 1e-9);

  // N = 1/2 is its own complement.
  const HermitianOperator zero(Matrix::Zero(4, 4));
  ChargeProjection q({false, false, true, true});
  const auto half = thermal_occupation(zero, 1.0, 0.0, 0.0, q);
  const Scenario h(half, q, UnitaryOperator(rnd.unitary(4)));
  const KernelEvaluator ev(h, KernelVariant::regularized);
  for (double l : {0.4, 1.9, 3.0}) CHECK(std::abs(ev.chi(l) - ev.chi(-l)) <= 1e-10);
}

TEST_CASE("moment consistency through the Fourier series of log chi") {
  // kappa_1 = -i d/dl log chi at 0; evaluate chi'(0) from the Fourier series of
  // the sampled chi and compare with the cumulant from p_n.
  Random rnd(9);
  const Scenario s = testing::random_scenario(rnd, 6, true);
  const Index k = 13;
  const auto g = generating_function(s, KernelVariant::regularized, k);
  const auto d = charge_distribution(g);
  Complex derivative = 0.0;
  for (long n = d.n_min; n <= d.n_max(); ++n) {
    Complex coeff = 0.0;
    for (Index j = 0; j < k; ++j) {
      coeff += g.values[j] * std::exp(Complex(0.0, -g.lambda(j) * static_cast<double>(n)));
    }
    derivative += Complex(0.0, static_cast<double>(n)) * coeff / static_cast<double>(k);
  }
  const double kappa1 = (derivative / Complex(0.0, 1.0)).real();
  CHECK(std::abs(kappa1 - cumulants(d, 1)[1]) <= 1e-7);
}
