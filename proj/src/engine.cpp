#include "fcs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace fcs {

// ---------------------------------------------------------------------------
// ChargeDistribution

double ChargeDistribution::at(long n) const {
  if (n < n_min || n > n_max()) return 0.0;
  return probabilities[static_cast<std::size_t>(n - n_min)];
}

double ChargeDistribution::total() const {
  double s = 0.0;
  for (double p : probabilities) s += p;
  return s;
}

double ChargeDistribution::min_probability() const {
  if (probabilities.empty()) return 0.0;
  return *std::min_element(probabilities.begin(), probabilities.end());
}

std::vector<double> ChargeDistribution::clipped() const {
  std::vector<double> out = probabilities;
  for (double& p : out) {
    if (p < 0.0 && p >= -1e-10) p = 0.0;
  }
  return out;
}

double max_abs_difference(const ChargeDistribution& a, const ChargeDistribution& b) {
  const long lo = std::min(a.n_min, b.n_min);
  const long hi = std::max(a.n_max(), b.n_max());
  double worst = 0.0;
  for (long n = lo; n <= hi; ++n) worst = std::max(worst, std::abs(a.at(n) - b.at(n)));
  return worst;
}

// ---------------------------------------------------------------------------

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::naive:
      return "naive";
    case KernelVariant::regularized:
      return "regularized";
    case KernelVariant::zero_temperature:
      return "zero_temperature";
  }
  return "unknown";
}

KernelVariant parse_kernel_variant(const std::string& name) {
  if (name == "naive") return KernelVariant::naive;
  if (name == "regularized") return KernelVariant::regularized;
  if (name == "zero_temperature") return KernelVariant::zero_temperature;
  throw ContractError("unknown kernel variant '" + name + "'");
}

double CountingKernel::defect_trace_norm() const {
  return trace_norm(matrix - identity(matrix.rows()));
}

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  const auto workers = static_cast<Index>(std::max(1u, threads));
  if (workers == 1 || count == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const Index used = std::min(workers, count);
  pool.reserve(static_cast<std::size_t>(used));
  for (Index w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index i = w; i < count; i += used) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

Matrix spectral_exp(const Matrix& v, const RealVector& eig, double scale) {
  ComplexVector d(eig.size());
  for (Index k = 0; k < eig.size(); ++k) d(k) = std::exp(kI * scale * eig(k));
  return v * d.asDiagonal() * v.adjoint();
}

}  // namespace

KernelEvaluator::KernelEvaluator(const Scenario& s, KernelVariant variant)
    : variant_(variant), dim_(s.dim()) {
  const Matrix& n = s.n().matrix();
  const Matrix one = identity(dim_);
  switch (variant_) {
    case KernelVariant::naive:
      n_ = n;
      n_prime_ = one - n;
      q_ = s.q().matrix();
      q_u_ = s.q_u();
      break;
    case KernelVariant::regularized: {
      n_ = n;
      n_prime_ = one - n;
      // N and Q commute, so NQ and N'Q are Hermitian up to roundoff.
      const auto nq = hermitian_eig(HermitianOperator::from_hermitian_part(n * s.q().matrix()));
      const auto npq =
          hermitian_eig(HermitianOperator::from_hermitian_part(n_prime_ * s.q().matrix()));
      a_ = nq.eigenvalues;
      v_a_ = nq.eigenvectors;
      b_ = npq.eigenvalues;
      v_b_ = npq.eigenvectors;
      w_a_ = s.u().matrix().adjoint() * v_a_;
      w_b_ = s.u().matrix().adjoint() * v_b_;
      break;
    }
    case KernelVariant::zero_temperature: {
      if (!s.n().is_pure()) {
        throw ContractError(
            "zero_temperature_kernel: requires a pure occupation (N = N^2); got a thermal state");
      }
      const Matrix x = s.q_u() * (n - s.n_u());
      x_n_ = x * n;
      x_n_prime_ = x * (one - n);
      break;
    }
  }
}

Matrix KernelEvaluator::matrix(double lambda) const {
  switch (variant_) {
    case KernelVariant::naive: {
      const Complex c = std::exp(kI * lambda) - 1.0;
      const Complex cbar = std::exp(-kI * lambda) - 1.0;
      const Matrix left = identity(dim_) + c * q_u_;
      const Matrix right = identity(dim_) + cbar * q_;
      return n_prime_ + left * n_ * right;
    }
    case KernelVariant::regularized: {
      // e^{-i l N_U Q_U} = U^* e^{-i l NQ} U = W_a e^{-i l a} W_a^*.
      const Matrix first =
          spectral_exp(w_a_, a_, -lambda) * n_prime_ * spectral_exp(v_a_, a_, lambda);
      const Matrix second =
          spectral_exp(w_b_, b_, lambda) * n_ * spectral_exp(v_b_, b_, -lambda);
      return first + second;
    }
    case KernelVariant::zero_temperature: {
      const Complex c = std::exp(kI * lambda) - 1.0;
      const Complex cbar = std::exp(-kI * lambda) - 1.0;
      return identity(dim_) + c * x_n_ - cbar * x_n_prime_;
    }
  }
  return {};
}

CountingKernel levitov_kernel(const Scenario& s, double lambda) {
  return counting_kernel(s, KernelVariant::naive, lambda);
}

CountingKernel regularized_kernel(const Scenario& s, double lambda) {
  return counting_kernel(s, KernelVariant::regularized, lambda);
}

CountingKernel zero_temperature_kernel(const Scenario& s, double lambda) {
  return counting_kernel(s, KernelVariant::zero_temperature, lambda);
}

CountingKernel counting_kernel(const Scenario& s, KernelVariant v, double lambda) {
  return {lambda, KernelEvaluator(s, v).matrix(lambda), v};
}

// ---------------------------------------------------------------------------
// Sampling and inversion

double GeneratingFunctionSamples::lambda(Index k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size());
}

Index minimum_grid_size(Index dim) { return 2 * dim + 1; }

GeneratingFunctionSamples generating_function(const Scenario& s, KernelVariant v, Index grid_size,
                                              unsigned threads) {
  if (grid_size < minimum_grid_size(s.dim()) || grid_size % 2 == 0) {
    throw ContractError("generating_function: grid size " + std::to_string(grid_size) +
                        " must be odd and >= 2*dim+1 = " +
                        std::to_string(minimum_grid_size(s.dim())) + " to avoid aliasing");
  }
  const KernelEvaluator eval(s, v);
  GeneratingFunctionSamples out;
  out.variant = v;
  out.values.resize(static_cast<std::size_t>(grid_size));
  parallel_for(grid_size, threads, [&](Index k) {
    const double lambda =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size);
    out.values[static_cast<std::size_t>(k)] = k == 0 ? determinant(eval.matrix(0.0))
                                                     : eval.chi(lambda);
  });
  return out;
}

ChargeDistribution charge_distribution(const GeneratingFunctionSamples& samples) {
  const Index k_total = samples.grid_size();
  if (k_total < 1) throw ContractError("charge_distribution: empty sample vector");
  const auto& chi = samples.values;

  const double norm_defect = std::abs(chi[0] - 1.0);
  if (norm_defect > kNormalizationGate) {
    std::ostringstream os;
    os << "|chi(0) - 1| = " << norm_defect;
    throw IntegrityError("samples.normalization", os.str());
  }
  double sym = 0.0;
  for (Index k = 1; k < k_total; ++k) {
    sym = std::max(sym, std::abs(chi[static_cast<std::size_t>(k_total - k)] -
                                 std::conj(chi[static_cast<std::size_t>(k)])));
  }
  if (sym > kConjugateSymmetryGate) {
    std::ostringstream os;
    os << "max |chi(2pi - l) - conj chi(l)| = " << sym;
    throw IntegrityError("samples.conjugate_symmetry", os.str());
  }

  ChargeDistribution dist;
  dist.n_min = -static_cast<long>((k_total - 1) / 2);
  dist.probabilities.assign(static_cast<std::size_t>(k_total), 0.0);
  double residue = 0.0;
  for (Index j = 0; j < k_total; ++j) {
    const long n = dist.n_min + static_cast<long>(j);
    const long n_mod = ((n % k_total) + k_total) % k_total;
    Complex acc = 0.0;
    for (Index k = 0; k < k_total; ++k) {
      // Reduce the phase index exactly before converting to an angle.
      const long phase_index = (n_mod * static_cast<long>(k)) % k_total;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(phase_index) /
                           static_cast<double>(k_total);
      acc += chi[static_cast<std::size_t>(k)] * std::polar(1.0, angle);
    }
    acc /= static_cast<double>(k_total);
    residue = std::max(residue, std::abs(acc.imag()));
    dist.probabilities[static_cast<std::size_t>(j)] = acc.real();
  }
  dist.imaginary_residue = residue;

  if (residue > kDistributionIntegrityGate) {
    std::ostringstream os;
    os << "imaginary residue " << residue << " (non-integer charge or aliasing)";
    throw IntegrityError("distribution.integrality", os.str());
  }
  if (dist.min_probability() < -kDistributionIntegrityGate) {
    std::ostringstream os;
    os << "negative probability " << dist.min_probability();
    throw IntegrityError("distribution.positivity", os.str());
  }
  return dist;
}

CumulantVector cumulants(const ChargeDistribution& dist, int order) {
  if (order < 1 || order > 6) {
    throw ContractError("cumulants: order must be in [1, 6], got " + std::to_string(order));
  }
  std::vector<double> m(static_cast<std::size_t>(order + 1), 0.0);
  for (std::size_t j = 0; j < dist.probabilities.size(); ++j) {
    const double n = static_cast<double>(dist.n_min + static_cast<long>(j));
    const double p = dist.probabilities[j];
    double power = 1.0;
    for (int r = 0; r <= order; ++r) {
      m[static_cast<std::size_t>(r)] += power * p;
      power *= n;
    }
  }
  // kappa_r = m_r - sum_{k=1}^{r-1} C(r-1, k-1) kappa_k m_{r-k}, with m normalized.
  const double m0 = m[0];
  for (double& x : m) x /= m0;
  std::vector<double> kappa(static_cast<std::size_t>(order + 1), 0.0);
  for (int r = 1; r <= order; ++r) {
    double acc = m[static_cast<std::size_t>(r)];
    double binom = 1.0;  // C(r-1, k-1), starting at k = 1
    for (int k = 1; k < r; ++k) {
      acc -= binom * kappa[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(r - k)];
      binom = binom * static_cast<double>(r - k) / static_cast<double>(k);
    }
    kappa[static_cast<std::size_t>(r)] = acc;
  }
  return {std::vector<double>(kappa.begin() + 1, kappa.end())};
}

double mean_transport_direct(const Scenario& s) {
  const Complex tr = (s.q_u() * (s.n().matrix() - s.n_u())).trace();
  if (std::abs(tr.imag()) > 1e-10) {
    std::ostringstream os;
    os << "Im tr(Q_U (N - N_U)) = " << tr.imag();
    throw IntegrityError("mean_transport.real", os.str());
  }
  return tr.real();
}

double naive_mean(const Scenario& s) {
  return ((s.q_u() - s.q().matrix()) * s.n().matrix()).trace().real();
}

double particle_hole_check(const Scenario& s, Index grid_size, KernelVariant v) {
  if (grid_size < 1) throw ContractError("particle_hole_check: grid size must be >= 1");
  const KernelEvaluator direct(s, v);
  const KernelEvaluator conjugate(s.particle_hole_conjugate(), v);
  double worst = 0.0;
  for (Index k = 0; k < grid_size; ++k) {
    const double lambda =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_size);
    worst = std::max(worst, std::abs(direct.chi(lambda) - conjugate.chi(-lambda)));
  }
  return worst;
}

}  // namespace fcs
