#pragma once

// Counting-statistics engine: the Levitov-Lesovik kernel D(lambda), its
// regularized form, the zero-temperature reduction, generating-function
// sampling, inverse DFT to p_n, and cumulants.

#include <string>
#include <vector>

#include "fcs/charge_distribution.hpp"
#include "fcs/models.hpp"

namespace fcs {

enum class KernelVariant { naive, regularized, zero_temperature };

std::string to_string(KernelVariant v);
/// Accepts "naive", "regularized", "zero_temperature".
KernelVariant parse_kernel_variant(const std::string& name);

struct CountingKernel {
  double lambda = 0.0;
  Matrix matrix;
  KernelVariant variant = KernelVariant::naive;

  /// ||D - 1||_1.
  double defect_trace_norm() const;
};

/// Precomputes everything that does not depend on lambda so repeated
/// evaluation on a grid costs a handful of matrix products per point.
/// Immutable after construction; matrix() may be called concurrently.
class KernelEvaluator {
 public:
  KernelEvaluator(const Scenario& scenario, KernelVariant variant);

  KernelVariant variant() const noexcept { return variant_; }
  Matrix matrix(double lambda) const;
  Complex chi(double lambda) const { return determinant(matrix(lambda)); }

 private:
  KernelVariant variant_;
  Index dim_;
  // naive
  Matrix n_, n_prime_, q_, q_u_;
  // regularized: NQ = V_a diag(a) V_a^*, N'Q = V_b diag(b) V_b^*, W = U^* V
  RealVector a_, b_;
  Matrix v_a_, v_b_, w_a_, w_b_;
  // zero temperature: X = Q_U (N - N_U)
  Matrix x_n_, x_n_prime_;
};

/// D(lambda) = N' + e^{i lambda Q_U} N e^{-i lambda Q}.
CountingKernel levitov_kernel(const Scenario& s, double lambda);

/// e^{-i l N_U Q_U} N' e^{i l N Q} + e^{i l N'_U Q_U} N e^{-i l N' Q}.
CountingKernel regularized_kernel(const Scenario& s, double lambda);

/// 1 + Q_U (N - N_U)((e^{i l} - 1) N - (e^{-i l} - 1) N'). Pure N only.
CountingKernel zero_temperature_kernel(const Scenario& s, double lambda);

CountingKernel counting_kernel(const Scenario& s, KernelVariant v, double lambda);

struct GeneratingFunctionSamples {
  KernelVariant variant = KernelVariant::regularized;
  std::vector<Complex> values;  // chi(2 pi k / K), k = 0 ... K-1

  Index grid_size() const { return static_cast<Index>(values.size()); }
  double lambda(Index k) const;
};

/// Smallest admissible grid for a scenario of this dimension: 2 dim + 1.
Index minimum_grid_size(Index dim);

/// Samples chi on the uniform K-point grid. K must be odd and >= 2 dim + 1.
/// Grid points are evaluated on up to `threads` workers; results do not
/// depend on the thread count.
GeneratingFunctionSamples generating_function(const Scenario& s, KernelVariant v, Index grid_size,
                                              unsigned threads = 1);

/// Gates on the sample vector.
inline constexpr double kNormalizationGate = 1e-10;
inline constexpr double kConjugateSymmetryGate = 1e-9;
/// Imaginary parts / negative entries up to this are roundoff; beyond it the
/// kernel or the grid is wrong.
inline constexpr double kDistributionIntegrityGate = 1e-7;

/// Inverse DFT of the samples: p_n = K^{-1} sum_k chi(l_k) e^{-i l_k n}, with
/// k > K/2 mapped to negative n.
ChargeDistribution charge_distribution(const GeneratingFunctionSamples& samples);

struct CumulantVector {
  std::vector<double> kappa;  // kappa_1 ... kappa_order

  int order() const { return static_cast<int>(kappa.size()); }
  double operator[](int j) const { return kappa.at(static_cast<std::size_t>(j - 1)); }
};

/// Moments from p_n, then the moment-cumulant recursion. order in [1, 6].
CumulantVector cumulants(const ChargeDistribution& dist, int order);

/// tr(Q_U (N - N_U)).
double mean_transport_direct(const Scenario& s);

/// tr((Q_U - Q) N).
double naive_mean(const Scenario& s);

/// max_k |chi_N(l_k) - chi_{N'}(-l_k)| on the K-point grid.
double particle_hole_check(const Scenario& s, Index grid_size,
                           KernelVariant v = KernelVariant::regularized);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body);

}  // namespace fcs
