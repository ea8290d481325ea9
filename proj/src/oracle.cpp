#include "fcs/oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace fcs::oracle {

namespace {

int sign_below(std::uint32_t state, int mode) {
  const std::uint32_t below = state & ((std::uint32_t{1} << mode) - 1u);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

std::vector<int> occupied_modes(std::uint32_t state) {
  std::vector<int> out;
  for (int i = 0; state != 0; ++i, state >>= 1) {
    if (state & 1u) out.push_back(i);
  }
  return out;
}

void require_modes(const Matrix& a, const FockBasis& basis, const char* what) {
  if (a.rows() != basis.modes() || a.cols() != basis.modes()) {
    throw ContractError(std::string(what) + ": one-particle matrix is " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        ", basis has " + std::to_string(basis.modes()) + " modes");
  }
}

}  // namespace

FockBasis::FockBasis(int modes) : modes_(modes) {
  if (modes < 1 || modes > kMaxModes) {
    throw ContractError("FockBasis: " + std::to_string(modes) + " modes outside [1, " +
                        std::to_string(kMaxModes) + "]");
  }
  sectors_.resize(static_cast<std::size_t>(modes + 1));
  position_.assign(size(), 0);
  for (std::uint32_t s = 0; s < size(); ++s) {
    auto& sec = sectors_[static_cast<std::size_t>(std::popcount(s))];
    position_[s] = static_cast<Index>(sec.size());
    sec.push_back(s);
  }
}

// ---------------------------------------------------------------------------

FockOperator FockOperator::operator*(const FockOperator& other) const {
  if (other.sector_count() != sector_count()) throw ContractError("FockOperator: basis mismatch");
  std::vector<Matrix> out(sectors_.size());
  for (std::size_t k = 0; k < sectors_.size(); ++k) out[k] = sectors_[k] * other.sectors_[k];
  return FockOperator(std::move(out));
}

FockOperator FockOperator::operator*(Complex c) const {
  std::vector<Matrix> out(sectors_.size());
  for (std::size_t k = 0; k < sectors_.size(); ++k) out[k] = c * sectors_[k];
  return FockOperator(std::move(out));
}

FockOperator FockOperator::adjoint() const {
  std::vector<Matrix> out(sectors_.size());
  for (std::size_t k = 0; k < sectors_.size(); ++k) out[k] = sectors_[k].adjoint();
  return FockOperator(std::move(out));
}

Complex FockOperator::trace() const {
  Complex t = 0.0;
  for (const auto& s : sectors_) t += s.trace();
  return t;
}

double FockOperator::max_abs_difference(const FockOperator& other) const {
  if (other.sector_count() != sector_count()) throw ContractError("FockOperator: basis mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < sectors_.size(); ++k) {
    worst = std::max(worst, max_abs(sectors_[k] - other.sectors_[k]));
  }
  return worst;
}

Matrix FockOperator::to_dense(const FockBasis& basis) const {
  const auto n = static_cast<Index>(basis.size());
  Matrix dense = Matrix::Zero(n, n);
  for (int k = 0; k < sector_count(); ++k) {
    const auto& states = basis.sector(k);
    const Matrix& blk = sector(k);
    for (std::size_t a = 0; a < states.size(); ++a) {
      for (std::size_t b = 0; b < states.size(); ++b) {
        dense(states[a], states[b]) = blk(static_cast<Index>(a), static_cast<Index>(b));
      }
    }
  }
  return dense;
}

FockOperator fock_identity(const FockBasis& basis) {
  std::vector<Matrix> out;
  for (int k = 0; k < basis.sector_count(); ++k) {
    out.push_back(identity(static_cast<Index>(basis.sector(k).size())));
  }
  return FockOperator(std::move(out));
}

FockOperator gamma(const Matrix& a, const FockBasis& basis) {
  require_modes(a, basis, "gamma");
  std::vector<Matrix> out;
  for (int k = 0; k < basis.sector_count(); ++k) {
    const auto& states = basis.sector(k);
    const auto dim = static_cast<Index>(states.size());
    Matrix blk(dim, dim);
    if (k == 0) {
      blk(0, 0) = 1.0;
      out.push_back(std::move(blk));
      continue;
    }
    std::vector<std::vector<int>> modes;
    modes.reserve(states.size());
    for (auto s : states) modes.push_back(occupied_modes(s));
    Matrix minor(k, k);
    for (Index t = 0; t < dim; ++t) {
      for (Index s = 0; s < dim; ++s) {
        const auto& rows = modes[static_cast<std::size_t>(t)];
        const auto& cols = modes[static_cast<std::size_t>(s)];
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) minor(r, c) = a(rows[r], cols[c]);
        }
        blk(t, s) = determinant(minor);
      }
    }
    out.push_back(std::move(blk));
  }
  return FockOperator(std::move(out));
}

FockOperator dgamma(const Matrix& a, const FockBasis& basis) {
  require_modes(a, basis, "dgamma");
  const int m = basis.modes();
  std::vector<Matrix> out;
  for (int k = 0; k < basis.sector_count(); ++k) {
    const auto& states = basis.sector(k);
    const auto dim = static_cast<Index>(states.size());
    Matrix blk = Matrix::Zero(dim, dim);
    for (Index col = 0; col < dim; ++col) {
      const std::uint32_t s = states[static_cast<std::size_t>(col)];
      for (int j = 0; j < m; ++j) {
        if (!(s & (std::uint32_t{1} << j))) continue;
        const int sign_j = sign_below(s, j);
        const std::uint32_t removed = s & ~(std::uint32_t{1} << j);
        for (int i = 0; i < m; ++i) {
          if (removed & (std::uint32_t{1} << i)) continue;
          const Complex aij = a(i, j);
          if (aij == Complex(0.0, 0.0)) continue;
          const std::uint32_t t = removed | (std::uint32_t{1} << i);
          const int sign = sign_j * sign_below(removed, i);
          blk(basis.position(t), col) += static_cast<double>(sign) * aij;
        }
      }
    }
    out.push_back(std::move(blk));
  }
  return FockOperator(std::move(out));
}

FockOperator exp_i(const FockOperator& hermitian, double lambda) {
  std::vector<Matrix> out;
  for (int k = 0; k < hermitian.sector_count(); ++k) {
    out.push_back(
        unitary_exp(HermitianOperator::from_hermitian_part(hermitian.sector(k)), -lambda).matrix());
  }
  return FockOperator(std::move(out));
}

// ---------------------------------------------------------------------------
// States

GibbsState gibbs_state(const Matrix& weight, const FockBasis& basis) {
  require_modes(weight, basis, "gibbs_state");
  const HermitianOperator w(weight);
  const auto spec = hermitian_eig(w);
  if (spec.eigenvalues.minCoeff() < -1e-10) {
    throw ContractError("gibbs_state: weight is not positive semidefinite (eigenvalue " +
                        std::to_string(spec.eigenvalues.minCoeff()) + ")");
  }
  const Index m = weight.rows();
  const Complex z = determinant(identity(m) + w.matrix());
  if (std::abs(z) < 1e-300) throw IntegrityError("gibbs.underflow", "det(1 + M) underflows");

  GibbsState state;
  state.density = gamma(w.matrix(), basis) * (1.0 / z);
  state.one_particle_weight = w.matrix();
  state.occupation = spec.apply([](double x) { return x / (1.0 + x); });
  state.pure = false;

  const double trace_defect = std::abs(state.density.trace() - 1.0);
  if (trace_defect > 1e-10) {
    throw IntegrityError("gibbs.trace", "Tr P - 1 = " + std::to_string(trace_defect));
  }
  return state;
}

GibbsState fermi_sea_state(const Matrix& n, const FockBasis& basis) {
  require_modes(n, basis, "fermi_sea_state");
  const ProjectionOperator p(n);
  const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(p.matrix()));
  const Index m = n.rows();
  const Index r = p.rank();
  // Occupied orbitals are the eigenvectors with eigenvalue 1 (the last r).
  const Matrix phi = spec.eigenvectors.rightCols(r);

  std::vector<Matrix> sectors;
  for (int k = 0; k < basis.sector_count(); ++k) {
    const auto dim = static_cast<Index>(basis.sector(k).size());
    sectors.push_back(Matrix::Zero(dim, dim));
  }
  const auto& states = basis.sector(static_cast<int>(r));
  ComplexVector psi(static_cast<Index>(states.size()));
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (r == 0) {
      psi(0) = 1.0;
      break;
    }
    const auto rows = occupied_modes(states[t]);
    Matrix minor(r, r);
    for (Index a = 0; a < r; ++a) minor.row(a) = phi.row(rows[static_cast<std::size_t>(a)]);
    psi(static_cast<Index>(t)) = determinant(minor);
  }
  sectors[static_cast<std::size_t>(r)] = psi * psi.adjoint();

  GibbsState state;
  state.density = FockOperator(std::move(sectors));
  state.occupation = p.matrix();
  state.pure = true;
  (void)m;
  return state;
}

GibbsState quasi_free_state(const Matrix& n, const FockBasis& basis) {
  require_modes(n, basis, "quasi_free_state");
  const HermitianOperator h = HermitianOperator::from_hermitian_part(n);
  if (max_abs(h.matrix() * h.matrix() - h.matrix()) <= tolerance::projection) {
    return fermi_sea_state(h.matrix(), basis);
  }
  const auto spec = hermitian_eig(h);
  if (spec.eigenvalues.minCoeff() <= 1e-12 || spec.eigenvalues.maxCoeff() >= 1.0 - 1e-12) {
    throw ContractError(
        "quasi_free_state: occupation is neither a projection nor strictly inside (0, 1)");
  }
  return gibbs_state(spec.apply([](double x) { return x / (1.0 - x); }), basis);
}

Matrix reduced_density(const GibbsState& state, const FockBasis& basis) {
  const int m = basis.modes();
  Matrix n(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Matrix e = Matrix::Zero(m, m);
      e(i, j) = 1.0;
      n(j, i) = (dgamma(e, basis) * state.density).trace();
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Counting

BruteForceCounter::BruteForceCounter(const Matrix& u, const Matrix& q, const GibbsState& state,
                                     const FockBasis& basis)
    : basis_(basis) {
  require_modes(u, basis, "BruteForceCounter");
  require_modes(q, basis, "BruteForceCounter");
  const Matrix& one_particle = state.pure ? state.occupation : state.one_particle_weight;
  const double defect = max_abs(commutator(one_particle, q));
  if (defect > 1e-10) {
    throw ContractError("BruteForceCounter: hypothesis violated, ||[M, Q]||_max = " +
                        std::to_string(defect) + " (charge is not a good quantum number)");
  }
  gamma_u_ = gamma(u, basis);
  density_ = state.density;
  const FockOperator dq = dgamma(q, basis);
  for (int k = 0; k < dq.sector_count(); ++k) {
    charge_.push_back(hermitian_eig(HermitianOperator::from_hermitian_part(dq.sector(k))));
    const Matrix& v = charge_.back().eigenvectors;
    const Matrix w = v.adjoint() * gamma_u_.sector(k) * v;
    const Matrix rw = v.adjoint() * density_.sector(k) * v * w.adjoint();
    trace_weights_.push_back(w.cwiseProduct(rw.transpose()));
  }
}

Complex BruteForceCounter::chi(double lambda) const {
  Complex total = 0.0;
  for (int k = 0; k < gamma_u_.sector_count(); ++k) {
    const RealVector& q = charge_[static_cast<std::size_t>(k)].eigenvalues;
    const Matrix& x = trace_weights_[static_cast<std::size_t>(k)];
    ComplexVector phase(q.size());
    for (Index b = 0; b < q.size(); ++b) phase(b) = std::exp(kI * lambda * q(b));
    total += (phase.transpose() * x * phase.conjugate()).value();
  }
  return total;
}

ChargeDistribution BruteForceCounter::distribution() const {
  const int m = basis_.modes();
  ChargeDistribution dist;
  dist.n_min = -m;
  dist.probabilities.assign(static_cast<std::size_t>(2 * m + 1), 0.0);

  for (int k = 0; k < gamma_u_.sector_count(); ++k) {
    const auto& ch = charge_[static_cast<std::size_t>(k)];
    // Group the dGamma(Q) eigenvectors by their integer charge.
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(m + 1));
    for (Index a = 0; a < ch.eigenvalues.size(); ++a) {
      const double x = ch.eigenvalues(a);
      const double rounded = std::round(x);
      if (std::abs(x - rounded) > 1e-8 || rounded < 0 || rounded > m) {
        throw IntegrityError("oracle.charge_spectrum",
                             "dGamma(Q) eigenvalue " + std::to_string(x) + " is not an integer");
      }
      groups[static_cast<std::size_t>(rounded)].push_back(a);
    }
    std::vector<Matrix> bases(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
      bases[c].resize(ch.eigenvectors.rows(), static_cast<Index>(groups[c].size()));
      for (std::size_t i = 0; i < groups[c].size(); ++i) {
        bases[c].col(static_cast<Index>(i)) = ch.eigenvectors.col(groups[c][i]);
      }
    }
    const Matrix& p = density_.sector(k);
    const Matrix& g = gamma_u_.sector(k);
    for (std::size_t initial = 0; initial < groups.size(); ++initial) {
      if (groups[initial].empty()) continue;
      const Matrix& vi = bases[initial];
      // P restricted to the charge sector; P commutes with dGamma(Q).
      const auto rho = hermitian_eig(HermitianOperator::from_hermitian_part(vi.adjoint() * p * vi));
      for (Index alpha = 0; alpha < rho.eigenvalues.size(); ++alpha) {
        const double weight = std::max(0.0, rho.eigenvalues(alpha));
        if (weight == 0.0) continue;
        const ComplexVector evolved = g * (vi * rho.eigenvectors.col(alpha));
        for (std::size_t final_charge = 0; final_charge < groups.size(); ++final_charge) {
          if (groups[final_charge].empty()) continue;
          const double amp = (bases[final_charge].adjoint() * evolved).squaredNorm();
          const long delta = static_cast<long>(final_charge) - static_cast<long>(initial);
          dist.probabilities[static_cast<std::size_t>(delta + m)] += weight * amp;
        }
      }
    }
  }
  return dist;
}

Complex chi_bruteforce(const Matrix& u, const Matrix& q, const GibbsState& state,
                       const FockBasis& basis, double lambda) {
  return BruteForceCounter(u, q, state, basis).chi(lambda);
}

ChargeDistribution distribution_bruteforce(const Matrix& u, const Matrix& q,
                                           const GibbsState& state, const FockBasis& basis) {
  return BruteForceCounter(u, q, state, basis).distribution();
}

double trdet_identity_check(const Matrix& a, const GibbsState& state, const FockBasis& basis,
                            double lambda) {
  require_modes(a, basis, "trdet_identity_check");
  const HermitianOperator h(a);
  const Complex lhs = (exp_i(dgamma(h.matrix(), basis), lambda) * state.density).trace();
  const Index m = a.rows();
  const Matrix& n = state.occupation;
  const Matrix e = unitary_exp(h, -lambda).matrix();
  const Complex rhs = determinant(identity(m) - n + e * n);
  return std::abs(lhs - rhs);
}

double omega_gamma_check(const Matrix& u, const Matrix& n) {
  require_square(u, "omega_gamma_check");
  if (u.rows() > 10) throw ContractError("omega_gamma_check: dimension must be <= 10");
  const FockBasis basis(static_cast<int>(u.rows()));
  const GibbsState state = quasi_free_state(n, basis);
  const Complex lhs = (gamma(u, basis) * state.density).trace();
  const Index m = u.rows();
  const Complex rhs = determinant(identity(m) - state.occupation + u * state.occupation);
  return std::abs(lhs - rhs);
}

}  // namespace fcs::oracle
