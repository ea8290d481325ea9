#pragma once

// Brute-force Fock-space validator. Builds second-quantized operators on the
// full 2^M-dimensional space and evaluates the counting statistics as Fock
// traces. Shares nothing with the engine beyond opcore; it is slow on
// purpose.
//
// Every operator used here conserves particle number, so Fock operators are
// stored as one dense block per particle-number sector. Within a sector,
// states are occupation bitmasks (bit i = mode i) in increasing order, and
// |S> = a*_{s1} a*_{s2} ... |vac> with s1 < s2 < ...

#include <cstdint>
#include <vector>

#include "fcs/charge_distribution.hpp"
#include "fcs/opcore.hpp"

namespace fcs::oracle {

inline constexpr int kMaxModes = 14;

class FockBasis {
 public:
  /// Throws ContractError for modes outside [1, 14].
  explicit FockBasis(int modes);

  int modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return std::size_t{1} << modes_; }
  int sector_count() const noexcept { return modes_ + 1; }
  const std::vector<std::uint32_t>& sector(int particles) const {
    return sectors_[static_cast<std::size_t>(particles)];
  }
  /// Position of a bitmask inside its particle-number sector.
  Index position(std::uint32_t state) const { return position_[state]; }

 private:
  int modes_;
  std::vector<std::vector<std::uint32_t>> sectors_;
  std::vector<Index> position_;
};

/// Particle-number-conserving operator on Fock space, one block per sector.
class FockOperator {
 public:
  FockOperator() = default;
  explicit FockOperator(std::vector<Matrix> sectors) : sectors_(std::move(sectors)) {}

  int sector_count() const noexcept { return static_cast<int>(sectors_.size()); }
  const Matrix& sector(int k) const { return sectors_.at(static_cast<std::size_t>(k)); }
  Matrix& sector(int k) { return sectors_.at(static_cast<std::size_t>(k)); }

  FockOperator operator*(const FockOperator& other) const;
  FockOperator operator*(Complex c) const;
  FockOperator adjoint() const;
  Complex trace() const;
  double max_abs_difference(const FockOperator& other) const;

  /// Dense 2^M x 2^M matrix in lexicographic (bitmask) order.
  Matrix to_dense(const FockBasis& basis) const;

 private:
  std::vector<Matrix> sectors_;
};

FockOperator fock_identity(const FockBasis& basis);

/// Gamma(A): on the k-particle sector <T|Gamma(A)|S> = det A[T, S].
FockOperator gamma(const Matrix& a, const FockBasis& basis);

/// dGamma(A) = sum_ij A_ij a*_i a_j.
FockOperator dgamma(const Matrix& a, const FockBasis& basis);

/// exp(i lambda X) for a Hermitian X, sector by sector.
FockOperator exp_i(const FockOperator& hermitian, double lambda);

/// A normalized, gauge-invariant many-body state.
struct GibbsState {
  FockOperator density;        // P, trace one
  Matrix one_particle_weight;  // M of P = Gamma(M)/det(1+M); empty for a pure Fermi sea
  Matrix occupation;           // N = M(1+M)^{-1}, or the Fermi-sea projection
  bool pure = false;
};

/// P = Gamma(weight) / det(1 + weight). weight must be Hermitian PSD.
GibbsState gibbs_state(const Matrix& weight, const FockBasis& basis);

/// Slater determinant filling the range of the projection n.
GibbsState fermi_sea_state(const Matrix& n, const FockBasis& basis);

/// Fermi sea when n is a projection, otherwise the Gibbs state with
/// weight n(1-n)^{-1}; n must then have spectrum strictly inside (0, 1).
GibbsState quasi_free_state(const Matrix& n, const FockBasis& basis);

/// N_ji = Tr(a*_i a_j P), read off the Fock-space density matrix.
Matrix reduced_density(const GibbsState& state, const FockBasis& basis);

/// Evaluates chi and the two-measurement distribution for fixed (U, Q, P).
class BruteForceCounter {
 public:
  /// Throws ContractError if the state's one-particle data do not commute
  /// with Q to 1e-10.
  BruteForceCounter(const Matrix& u, const Matrix& q, const GibbsState& state,
                    const FockBasis& basis);

  /// Tr(Gamma(U)^* e^{i l dGamma(Q)} Gamma(U) e^{-i l dGamma(Q)} P).
  Complex chi(double lambda) const;

  /// p(m - n) = sum over joint eigenstates alpha of P and dGamma(Q) with
  /// charge n of rho_alpha |<beta|Gamma(U)|alpha>|^2, beta of charge m.
  ChargeDistribution distribution() const;

 private:
  const FockBasis& basis_;
  FockOperator gamma_u_;
  FockOperator density_;
  std::vector<SpectralDecomposition> charge_;  // dGamma(Q) per sector
  // In the dGamma(Q) eigenbasis, chi(l) = sum_bc e^{il(q_b - q_c)} X_bc with
  // X_bc = W_bc (R W^*)_cb, W = Gamma(U) and R = P in that basis.
  std::vector<Matrix> trace_weights_;
};

Complex chi_bruteforce(const Matrix& u, const Matrix& q, const GibbsState& state,
                       const FockBasis& basis, double lambda);

ChargeDistribution distribution_bruteforce(const Matrix& u, const Matrix& q,
                                           const GibbsState& state, const FockBasis& basis);

/// |Tr(e^{i l dGamma(A)} P) - det(1 - N + e^{i l A} N)|.
double trdet_identity_check(const Matrix& a, const GibbsState& state, const FockBasis& basis,
                            double lambda);

/// |Tr(Gamma(U) P) - det(1 - N + U N)| for the quasi-free state with
/// reduced density n. Dimension at most 10.
double omega_gamma_check(const Matrix& u, const Matrix& n);

}  // namespace fcs::oracle
