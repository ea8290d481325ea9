#pragma once

// Physical scenarios: two-lead tight-binding chains, Fermi-sea and thermal
// occupations, propagators, and the discretized chiral two-channel model.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fcs/opcore.hpp"

namespace fcs {

// ---------------------------------------------------------------------------
// Charge projection and occupation

/// Q: diagonal 0/1 projection in the site basis, true = counted region.
class ChargeProjection {
 public:
  explicit ChargeProjection(std::vector<bool> mask);

  const ProjectionOperator& projection() const noexcept { return projection_; }
  const Matrix& matrix() const noexcept { return projection_.matrix(); }
  const std::vector<bool>& mask() const noexcept { return mask_; }
  Index dim() const noexcept { return projection_.dim(); }
  Index rank() const noexcept { return projection_.rank(); }

 private:
  std::vector<bool> mask_;
  ProjectionOperator projection_;
};

enum class OccupationKind { pure, thermal };

/// One-particle density matrix N, 0 <= N <= 1.
class OccupationOperator {
 public:
  /// N must be a projection (to 1e-10).
  static OccupationOperator pure(const Matrix& n);

  /// Thermal N with spectrum strictly inside (0, 1). `gap` is the reported
  /// delta with the spectrum of N inside (delta, 1 - delta).
  static OccupationOperator thermal(const Matrix& n, double beta, double mu_left, double mu_right,
                                    double gap);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  OccupationKind kind() const noexcept { return kind_; }
  bool is_pure() const noexcept { return kind_ == OccupationKind::pure; }
  double beta() const noexcept { return beta_; }
  double mu_left() const noexcept { return mu_left_; }
  double mu_right() const noexcept { return mu_right_; }
  double gap() const noexcept { return gap_; }

  /// N' = 1 - N, same kind; thermal chemical potentials change sign.
  OccupationOperator complement() const;

 private:
  OccupationOperator() = default;
  Matrix m_;
  OccupationKind kind_ = OccupationKind::pure;
  double beta_ = 0.0;
  double mu_left_ = 0.0;
  double mu_right_ = 0.0;
  double gap_ = 0.0;
};

/// ||[Q, N]||_max.
double commutator_defect(const ChargeProjection& q, const OccupationOperator& n);

/// The triple (N, Q, U) every counting computation works on. Checks matching
/// dimensions and ||[Q, N]||_max <= 1e-10. Caches Q_U = U^*QU and N_U.
class Scenario {
 public:
  Scenario(OccupationOperator n, ChargeProjection q, UnitaryOperator u);

  const OccupationOperator& n() const noexcept { return n_; }
  const ChargeProjection& q() const noexcept { return q_; }
  const UnitaryOperator& u() const noexcept { return u_; }
  const Matrix& q_u() const noexcept { return q_u_; }
  const Matrix& n_u() const noexcept { return n_u_; }
  Index dim() const noexcept { return n_.dim(); }

  /// Same Q and U with N replaced by N' = 1 - N.
  Scenario particle_hole_conjugate() const;

 private:
  OccupationOperator n_;
  ChargeProjection q_;
  UnitaryOperator u_;
  Matrix q_u_;
  Matrix n_u_;
};

// ---------------------------------------------------------------------------
// Two-lead lattice

/// Two open tight-binding chains joined by a single bond. Sites are ordered
/// left lead first; site sites_left-1 and site sites_left are the innermost
/// pair joined by `coupling`.
struct TwoLeadLattice {
  Index sites_left = 1;
  Index sites_right = 1;
  double hopping = 1.0;
  double onsite_left = 0.0;
  double onsite_right = 0.0;
  double coupling = 0.0;
  double bias = 0.0;  // thermal only: mu_L += bias/2, mu_R -= bias/2

  Index dimension() const noexcept { return sites_left + sites_right; }
  void validate() const;
};

struct LeadOperators {
  HermitianOperator h0;  // decoupled leads
  HermitianOperator h;   // h0 plus the coupling bond
  ChargeProjection q;    // right lead
};

LeadOperators build_two_lead(const TwoLeadLattice& lattice);

/// Distance below which a level counts as sitting on mu.
inline constexpr double kDegeneracyGate = 1e-8;

/// N = sum over levels of h0 below mu. Throws DegeneracyError when a level is
/// within kDegeneracyGate of mu.
OccupationOperator fermi_occupation(const HermitianOperator& h0, double mu);

/// Per-lead Fermi function N = [1 + exp(beta (H_block - mu_block))]^{-1}.
/// h0 must be block-diagonal with respect to q (off-block entries <= 1e-12).
OccupationOperator thermal_occupation(const HermitianOperator& h0, double beta, double mu_left,
                                      double mu_right, const ChargeProjection& q);

// ---------------------------------------------------------------------------
// Time dependence

/// Scalar time profile multiplying a drive generator.
struct Envelope {
  enum class Shape { constant, gaussian, smooth_pulse, sine };
  Shape shape = Shape::constant;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;      // gaussian sigma / pulse half-width
  double frequency = 0.0;  // sine only (angular)
  double phase = 0.0;      // sine only

  double operator()(double t) const;
};

/// C-infinity bump exp(1 - 1/(1 - x^2)) on |x| < 1, zero elsewhere; peak 1 at 0.
double smooth_bump(double x);

struct DriveTerm {
  HermitianOperator generator;
  Envelope envelope;
};

/// V(t) = sum_j envelope_j(t) generator_j.
class Drive {
 public:
  Drive() = default;
  explicit Drive(std::vector<DriveTerm> terms);

  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<DriveTerm>& terms() const noexcept { return terms_; }
  Matrix at(double t, Index dim) const;
  Matrix derivative(double t, Index dim, int order) const;

 private:
  std::vector<DriveTerm> terms_;
};

enum class PropagationMode { stationary, driven };

struct PropagatorSpec {
  PropagationMode mode = PropagationMode::stationary;
  double total_time = 0.0;
  Index steps = 1;
  Drive drive;  // driven only; evolution runs under H + V(t), t in [0, total_time]

  void validate() const;
};

/// Largest tolerated midpoint-rule error estimate for driven propagation.
inline constexpr double kPropagatorAccuracyGate = 1e-6;

/// Commutator-based error estimate of the midpoint product,
/// sum_k dt^3 (||[H, H']||_F / 12 + ||H''||_F / 24) at each midpoint.
double midpoint_error_estimate(const PropagatorSpec& spec, const HermitianOperator& h);

/// Stationary: exp(-i H T). Driven: ordered product of exp(-i H(t_mid) dt),
/// later steps to the left. Throws AccuracyError when the estimate exceeds
/// kPropagatorAccuracyGate.
UnitaryOperator propagate(const PropagatorSpec& spec, const HermitianOperator& h);

/// -i * sum_k w exp(i H0 t_k) V(t_k) exp(-i H0 t_k), composite midpoint rule on
/// [s1, s2]. The first Dyson term of the interaction-picture propagator.
Matrix dyson_first_term(const HermitianOperator& h0, const Drive& drive, double s1, double s2,
                        Index quad_points);

// ---------------------------------------------------------------------------
// Lattice recipe: lattice + state + evolution -> Scenario

struct StateSpec {
  OccupationKind kind = OccupationKind::pure;
  double mu = 0.0;        // pure
  double beta = 1.0;      // thermal
  double mu_left = 0.0;   // thermal, before the lattice bias is applied
  double mu_right = 0.0;
};

/// A drive generator placed relative to the junction. Site offset 0 is the
/// first right-lead site, -1 the last left-lead site.
struct DriveTermSpec {
  enum class Kind { onsite, bond, right_lead };
  Kind kind = Kind::onsite;
  Index site = 0;         // onsite: the site; bond: the left end of the bond
  double strength = 1.0;  // onsite/right_lead: potential; bond: extra hopping
  Envelope envelope;
};

struct EvolutionSpec {
  PropagationMode mode = PropagationMode::stationary;
  double total_time = 0.0;
  Index steps = 1;
  bool coupled = true;  // false: evolve with the decoupled H0 (free evolution)
  std::vector<DriveTermSpec> drive;
};

struct LatticeScenarioSpec {
  TwoLeadLattice lattice;
  StateSpec state;
  EvolutionSpec evolution;

  void validate() const;
};

HermitianOperator drive_generator(const DriveTermSpec& term, const TwoLeadLattice& lattice);

/// Builds H0, H, Q, N and U = propagate(evolution, H or H0).
Scenario build_lattice_scenario(const LatticeScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Chiral two-channel model

/// Built-in families of compactly supported scatterers, described by their
/// Hermitian 2x2 generator h(t) with scatter(t) = exp(-i h(t)).
struct ChiralScatter {
  enum class Kind { identity, phase, mixing };
  Kind kind = Kind::identity;
  double amplitude = 0.0;   // phase: peak phase of channel 1; mixing: peak angle
  double center = 0.0;
  double width = 1.0;       // half-width of the support
  double omega = 0.0;       // mixing: phase winding rate of the off-diagonal
  double phase_ratio = 0.0; // phase: channel-2 phase = -phase_ratio * channel-1 phase

  Eigen::Matrix2cd generator(double t) const;
  double support_lo() const { return center - width; }
  double support_hi() const { return center + width; }
};

struct ChiralModel {
  double energy_cutoff = 8.0;  // Lambda: the dual energy grid spans [-Lambda, Lambda)
  Index grid_points = 64;      // per channel, even
  ChiralScatter scatter;

  double time_step() const;    // pi / Lambda
  double window() const;       // grid_points * time_step
  void validate() const;
};

/// Smooth energy window applied to the scatterer's generator: 1 for
/// |E| <= Lambda/2, 0 for |E| >= 0.9 Lambda.
double chiral_energy_window(double energy, double cutoff);

struct ChiralOperators {
  RealVector times;     // t_j, uniform, window centered on 0
  RealVector energies;  // E_m = (2 pi / W)(m + 1/2), ascending
  Matrix fourier;       // G x G unitary, column m = energy eigenvector e^{-i E_m t}/sqrt(G)
  Matrix generator;     // windowed generator K, U = exp(-i K)
  Scenario scenario;    // N = Theta(-E) (x) 1_2, Q = channel 1
};

/// Operators on the 2G-dimensional space ordered (channel, t_j).
ChiralOperators build_chiral(const ChiralModel& model);

}  // namespace fcs
