#pragma once

// Schatten-norm monitors and convergence scans: lead length, Fermi-sea depth,
// the non-compactness of (Q_U - Q)N in the chiral model, the thermal charge
// variance, and the Hilbert-Schmidt bound on the first Dyson term.

#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fcs/engine.hpp"
#include "fcs/models.hpp"

namespace fcs {

struct NormReport {
  std::vector<std::string> labels;
  std::vector<double> values;

  /// Throws ContractError for an unknown label.
  double operator[](const std::string& label) const;
};

/// Labels in report order:
///   trnorm_comm_N_U      ||[N, U]||_1
///   hsnorm_comm_N_U      ||[N, U]||_2
///   trnorm_Q_sqrtNNp     ||Q sqrt(N N')||_1
///   trnorm_dQ_sqrtNNp    ||(Q_U - Q) sqrt(N N')||_1
///   trnorm_dQ_N          ||(Q_U - Q) N||_1
///   trnorm_QU_dN         ||Q_U (N - N_U)||_1
///   trnorm_Dreg_minus_1  ||D~(lambda_ref) - 1||_1
///   trnorm_D_minus_1     ||D(lambda_ref) - 1||_1
const std::vector<std::string>& norm_labels();

NormReport norm_report(const Scenario& s, double lambda_ref);

/// Settings shared by every pipeline that turns a scenario into cumulants.
struct AnalysisOptions {
  KernelVariant variant = KernelVariant::regularized;
  Index grid_size = 0;  // 0: the minimum 2 dim + 1
  int cumulant_order = 4;
  double lambda_ref = std::numbers::pi / 2.0;
  unsigned threads = 1;
};

struct ScenarioAnalysis {
  GeneratingFunctionSamples samples;
  ChargeDistribution distribution;
  CumulantVector cumulants;
};

ScenarioAnalysis analyze(const Scenario& s, const AnalysisOptions& options);

struct ScanPoint {
  double parameter = 0.0;
  CumulantVector cumulants;
  NormReport norms;
};

struct ScanResult {
  std::string parameter_name;
  std::vector<ScanPoint> points;

  /// |x(k+1) - x(k)| / (|x(k)| + 1e-12) for cumulant j between consecutive points.
  std::vector<double> relative_change(int cumulant) const;
  /// Same for a norm label.
  std::vector<double> relative_change(const std::string& norm_label) const;
};

/// Band-velocity bound for the tight-binding chain.
inline double max_group_velocity(double hopping) { return 2.0 * std::abs(hopping); }

/// Scans sites-per-lead (both leads set to L). lengths must be strictly
/// increasing; throws ContractError("boundary contamination ...") when
/// 2 hopping T >= min(L).
ScanResult tenet_scan_length(const LatticeScenarioSpec& base, const std::vector<Index>& lengths,
                             const AnalysisOptions& options);

/// Chiral depth: the cutoff Lambda takes each value while the time window is
/// held fixed, so the grid grows with Lambda.
ScanResult tenet_scan_depth(const ChiralModel& base, const std::vector<double>& cutoffs,
                            const AnalysisOptions& options);

/// Lattice depth: the Fermi level of a pure state takes each value.
ScanResult tenet_scan_depth(const LatticeScenarioSpec& base, const std::vector<double>& mus,
                            const AnalysisOptions& options);

struct NoncompactDemo {
  double reference = 0.0;      // ||(Q_U - Q) psi||
  double energy_step = 0.0;    // energy lowered per step
  std::vector<double> norms;   // ||(Q_U - Q) N psi_n||, n = 0 ... n_max
};

/// psi is a Gaussian packet in the counted channel centred on the scatterer,
/// psi_n = e^{i n dE t} psi with dE the grid energy spacing. Throws
/// ContractError when ||(Q_U - Q) psi|| < 1e-8 (demo not applicable) or when
/// n_max dE exceeds Lambda/4.
NoncompactDemo noncompact_demo(const ChiralModel& model, Index n_max);

struct VarianceFit {
  std::vector<Index> lengths;
  std::vector<double> variances;  // tr(Q N N')
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// tr(Q N N') for each lead length (both leads set to L), least-squares line.
VarianceFit variance_vs_length(const LatticeScenarioSpec& base, const std::vector<Index>& lengths);

double charge_variance(const Scenario& s);

struct DysonQuadrature {
  double x_lo = -1.0;       // support of V(s, x)
  double x_hi = 1.0;
  Index x_points = 256;
  double u_max = 200.0;     // momentum cutoff of the (u, v) integral
  Index u_points = 4096;
};

struct DysonBound {
  double lhs = 0.0;             // 2 int du sin^2(us/2)/u^2 int_{|v|<|u|} |Vhat(v)|^2 dv
  double rhs = 0.0;             // pi |s| ||Vhat||_2^2
  double self_convergence = 0.0;  // relative lhs change on halving both steps
};

/// Off-diagonal boundary kernel of the first Dyson term for the position
/// profile v_pm(x) at boundary time s. Throws AccuracyError when halving the
/// quadrature steps moves lhs by more than 1%.
DysonBound dyson_hs_check(const std::function<Complex(double)>& v_pm, double s,
                          const DysonQuadrature& quad);

}  // namespace fcs
