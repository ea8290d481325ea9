#include "fcs/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fcs {

namespace {

Matrix mask_matrix(const std::vector<bool>& mask) {
  if (mask.empty()) throw ContractError("ChargeProjection: empty site mask");
  const auto n = static_cast<Index>(mask.size());
  Matrix q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) q(i, i) = mask[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  return q;
}

void check_occupation_spectrum(const Matrix& n) {
  const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(n));
  const double lo = spec.eigenvalues.minCoeff();
  const double hi = spec.eigenvalues.maxCoeff();
  if (lo < -tolerance::projection || hi > 1.0 + tolerance::projection) {
    std::ostringstream os;
    os << "spectrum [" << lo << ", " << hi << "] leaves [0, 1]";
    throw IntegrityError("occupation.spectrum", os.str());
  }
}

// 1/(1 + e^x) without overflow.
double fermi_function(double x) {
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

// ---------------------------------------------------------------------------

ChargeProjection::ChargeProjection(std::vector<bool> mask)
    : mask_(std::move(mask)), projection_(mask_matrix(mask_)) {}

OccupationOperator OccupationOperator::pure(const Matrix& n) {
  require_square(n, "OccupationOperator");
  require_finite(n, "OccupationOperator");
  OccupationOperator out;
  // ProjectionOperator performs the N^2 = N and {0,1}-spectrum gates.
  out.m_ = ProjectionOperator(n).matrix();
  out.kind_ = OccupationKind::pure;
  return out;
}

OccupationOperator OccupationOperator::thermal(const Matrix& n, double beta, double mu_left,
                                               double mu_right, double gap) {
  require_square(n, "OccupationOperator");
  require_finite(n, "OccupationOperator");
  if (!(gap > 0.0) || gap > 0.5) {
    throw IntegrityError("occupation.thermal_gap",
                         "thermal occupation must have spectrum strictly inside (0, 1); delta = " +
                             std::to_string(gap));
  }
  OccupationOperator out;
  out.m_ = hermitian_part(n);
  check_occupation_spectrum(out.m_);
  out.kind_ = OccupationKind::thermal;
  out.beta_ = beta;
  out.mu_left_ = mu_left;
  out.mu_right_ = mu_right;
  out.gap_ = gap;
  return out;
}

OccupationOperator OccupationOperator::complement() const {
  OccupationOperator out = *this;
  out.m_ = identity(dim()) - m_;
  out.mu_left_ = -mu_left_;
  out.mu_right_ = -mu_right_;
  return out;
}

double commutator_defect(const ChargeProjection& q, const OccupationOperator& n) {
  return max_abs(commutator(q.matrix(), n.matrix()));
}

Scenario::Scenario(OccupationOperator n, ChargeProjection q, UnitaryOperator u)
    : n_(std::move(n)), q_(std::move(q)), u_(std::move(u)) {
  if (n_.dim() != q_.dim() || n_.dim() != u_.dim()) {
    throw ContractError("Scenario: dimension mismatch between N (" + std::to_string(n_.dim()) +
                        "), Q (" + std::to_string(q_.dim()) + ") and U (" +
                        std::to_string(u_.dim()) + ")");
  }
  const double defect = commutator_defect(q_, n_);
  if (defect > tolerance::projection) {
    std::ostringstream os;
    os << "||[Q, N]||_max = " << defect << " exceeds 1e-10";
    throw IntegrityError("scenario.QN_commute", os.str());
  }
  q_u_ = hermitian_part(conjugate_by(u_, q_.matrix()));
  n_u_ = hermitian_part(conjugate_by(u_, n_.matrix()));
}

Scenario Scenario::particle_hole_conjugate() const { return Scenario(n_.complement(), q_, u_); }

// ---------------------------------------------------------------------------

void TwoLeadLattice::validate() const {
  if (sites_left < 1) throw ContractError("TwoLeadLattice: sites_left must be >= 1");
  if (sites_right < 1) throw ContractError("TwoLeadLattice: sites_right must be >= 1");
  for (double v : {hopping, onsite_left, onsite_right, coupling, bias}) {
    if (!std::isfinite(v)) throw ContractError("TwoLeadLattice: non-finite parameter");
  }
}

LeadOperators build_two_lead(const TwoLeadLattice& lattice) {
  lattice.validate();
  const Index nl = lattice.sites_left;
  const Index n = lattice.dimension();
  Matrix h0 = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) h0(i, i) = i < nl ? lattice.onsite_left : lattice.onsite_right;
  for (Index i = 0; i + 1 < n; ++i) {
    if (i == nl - 1) continue;  // the junction bond is absent in H0
    h0(i, i + 1) = -lattice.hopping;
    h0(i + 1, i) = -lattice.hopping;
  }
  Matrix h = h0;
  h(nl - 1, nl) = -lattice.coupling;
  h(nl, nl - 1) = -lattice.coupling;

  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index i = nl; i < n; ++i) mask[static_cast<std::size_t>(i)] = true;
  return {HermitianOperator(h0), HermitianOperator(h), ChargeProjection(std::move(mask))};
}

OccupationOperator fermi_occupation(const HermitianOperator& h0, double mu) {
  if (!std::isfinite(mu)) throw ContractError("fermi_occupation: mu must be finite");
  const auto spec = hermitian_eig(h0);
  for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (std::abs(spec.eigenvalues(k) - mu) < kDegeneracyGate) {
      throw DegeneracyError(spec.eigenvalues(k), mu);
    }
  }
  return OccupationOperator::pure(spec.apply([mu](double e) { return e < mu ? 1.0 : 0.0; }));
}

OccupationOperator thermal_occupation(const HermitianOperator& h0, double beta, double mu_left,
                                      double mu_right, const ChargeProjection& q) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ContractError("thermal_occupation: beta must be positive and finite");
  }
  if (!std::isfinite(mu_left) || !std::isfinite(mu_right)) {
    throw ContractError("thermal_occupation: chemical potentials must be finite");
  }
  if (h0.dim() != q.dim()) throw ContractError("thermal_occupation: dimension mismatch with Q");

  const auto& mask = q.mask();
  std::vector<Index> blocks[2];
  for (Index i = 0; i < h0.dim(); ++i) blocks[mask[static_cast<std::size_t>(i)] ? 1 : 0].push_back(i);

  double off_block = 0.0;
  for (Index a : blocks[0]) {
    for (Index b : blocks[1]) off_block = std::max(off_block, std::abs(h0.matrix()(a, b)));
  }
  if (off_block > 1e-12) {
    throw ContractError("thermal_occupation: H0 couples the two blocks of Q (off-block entry " +
                        std::to_string(off_block) + ")");
  }

  Matrix n = Matrix::Zero(h0.dim(), h0.dim());
  double gap = 0.5;
  const double mus[2] = {mu_left, mu_right};
  for (int side = 0; side < 2; ++side) {
    const auto& idx = blocks[side];
    if (idx.empty()) continue;
    const auto m = static_cast<Index>(idx.size());
    Matrix block(m, m);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) block(a, b) = h0.matrix()(idx[a], idx[b]);
    }
    const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(block));
    const double mu = mus[side];
    for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
      gap = std::min(gap, fermi_function(beta * std::abs(spec.eigenvalues(k) - mu)));
    }
    const Matrix nb = spec.apply([&](double e) { return fermi_function(beta * (e - mu)); });
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) n(idx[a], idx[b]) = nb(a, b);
    }
  }
  return OccupationOperator::thermal(n, beta, mu_left, mu_right, gap);
}

// ---------------------------------------------------------------------------

double smooth_bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

double Envelope::operator()(double t) const {
  switch (shape) {
    case Shape::constant:
      return amplitude;
    case Shape::gaussian: {
      const double z = (t - center) / width;
      return amplitude * std::exp(-0.5 * z * z);
    }
    case Shape::smooth_pulse:
      return amplitude * smooth_bump((t - center) / width);
    case Shape::sine:
      return amplitude * std::sin(frequency * t + phase);
  }
  return 0.0;
}

Drive::Drive(std::vector<DriveTerm> terms) : terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    if (term.generator.dim() != terms_.front().generator.dim()) {
      throw ContractError("Drive: generators have different dimensions");
    }
  }
}

Matrix Drive::at(double t, Index dim) const {
  Matrix v = Matrix::Zero(dim, dim);
  for (const auto& term : terms_) {
    if (term.generator.dim() != dim) throw ContractError("Drive: generator dimension mismatch");
    v += term.envelope(t) * term.generator.matrix();
  }
  return v;
}

Matrix Drive::derivative(double t, Index dim, int order) const {
  // Central differences; only used for error estimates.
  const double h = 1e-4;
  Matrix d = Matrix::Zero(dim, dim);
  for (const auto& term : terms_) {
    const auto& g = term.envelope;
    double c = 0.0;
    if (order == 1) {
      c = (g(t + h) - g(t - h)) / (2 * h);
    } else {
      c = (g(t + h) - 2 * g(t) + g(t - h)) / (h * h);
    }
    d += c * term.generator.matrix();
  }
  return d;
}

void PropagatorSpec::validate() const {
  if (!(total_time >= 0.0) || !std::isfinite(total_time)) {
    throw ContractError("PropagatorSpec: total_time must be finite and >= 0");
  }
  if (mode == PropagationMode::driven && steps < 1) {
    throw ContractError("PropagatorSpec: driven mode needs steps >= 1");
  }
}

double midpoint_error_estimate(const PropagatorSpec& spec, const HermitianOperator& h) {
  if (spec.mode != PropagationMode::driven || spec.drive.empty() || spec.total_time == 0.0) {
    return 0.0;
  }
  const Index n = h.dim();
  const double dt = spec.total_time / static_cast<double>(spec.steps);
  double estimate = 0.0;
  for (Index k = 0; k < spec.steps; ++k) {
    const double tm = (static_cast<double>(k) + 0.5) * dt;
    const Matrix hk = h.matrix() + spec.drive.at(tm, n);
    const Matrix d1 = spec.drive.derivative(tm, n, 1);
    const Matrix d2 = spec.drive.derivative(tm, n, 2);
    estimate += dt * dt * dt * (commutator(hk, d1).norm() / 12.0 + d2.norm() / 24.0);
  }
  return estimate;
}

UnitaryOperator propagate(const PropagatorSpec& spec, const HermitianOperator& h) {
  spec.validate();
  if (spec.total_time == 0.0) return UnitaryOperator::identity(h.dim());
  if (spec.mode == PropagationMode::stationary || spec.drive.empty()) {
    return unitary_exp(h, spec.total_time);
  }
  const double estimate = midpoint_error_estimate(spec, h);
  if (estimate > kPropagatorAccuracyGate) {
    throw AccuracyError("propagator.accuracy", estimate, kPropagatorAccuracyGate);
  }
  const Index n = h.dim();
  const double dt = spec.total_time / static_cast<double>(spec.steps);
  Matrix u = identity(n);
  for (Index k = 0; k < spec.steps; ++k) {
    const double tm = (static_cast<double>(k) + 0.5) * dt;
    const auto step = unitary_exp(
        HermitianOperator::from_hermitian_part(h.matrix() + spec.drive.at(tm, n)), dt);
    u = step.matrix() * u;
  }
  return UnitaryOperator(std::move(u));
}

Matrix dyson_first_term(const HermitianOperator& h0, const Drive& drive, double s1, double s2,
                        Index quad_points) {
  if (quad_points < 8) throw ContractError("dyson_first_term: quad_points must be >= 8");
  if (!(s1 < s2)) throw ContractError("dyson_first_term: need s1 < s2");
  const Index n = h0.dim();
  const auto spec = hermitian_eig(h0);
  const double w = (s2 - s1) / static_cast<double>(quad_points);
  Matrix acc = Matrix::Zero(n, n);
  for (Index k = 0; k < quad_points; ++k) {
    const double t = s1 + (static_cast<double>(k) + 0.5) * w;
    const Matrix v = drive.at(t, n);
    if (v.isZero(0.0)) continue;
    const Matrix forward = spec.apply([t](double e) { return std::exp(kI * e * t); });
    acc += forward * v * forward.adjoint();
  }
  return -kI * w * acc;
}

// ---------------------------------------------------------------------------

void LatticeScenarioSpec::validate() const {
  lattice.validate();
  if (state.kind == OccupationKind::pure) {
    if (!std::isfinite(state.mu)) throw ContractError("state.mu must be finite");
    if (lattice.bias != 0.0) throw ContractError("lattice bias applies to thermal states only");
  } else {
    if (!(state.beta > 0.0) || !std::isfinite(state.beta)) {
      throw ContractError("state.beta must be positive and finite");
    }
    if (!std::isfinite(state.mu_left) || !std::isfinite(state.mu_right)) {
      throw ContractError("state chemical potentials must be finite");
    }
  }
  if (!(evolution.total_time >= 0.0) || !std::isfinite(evolution.total_time)) {
    throw ContractError("evolution.total_time must be finite and >= 0");
  }
  if (evolution.mode == PropagationMode::driven && evolution.steps < 1) {
    throw ContractError("evolution.steps must be >= 1");
  }
  for (const auto& term : evolution.drive) (void)drive_generator(term, lattice);
}

HermitianOperator drive_generator(const DriveTermSpec& term, const TwoLeadLattice& lattice) {
  const Index n = lattice.dimension();
  const Index first_right = lattice.sites_left;
  Matrix g = Matrix::Zero(n, n);
  if (!std::isfinite(term.strength)) throw ContractError("drive strength must be finite");
  switch (term.kind) {
    case DriveTermSpec::Kind::onsite: {
      const Index i = first_right + term.site;
      if (i < 0 || i >= n) throw ContractError("onsite drive site outside the lattice");
      g(i, i) = term.strength;
      break;
    }
    case DriveTermSpec::Kind::bond: {
      const Index i = first_right + term.site;
      if (i < 0 || i + 1 >= n) throw ContractError("bond drive outside the lattice");
      g(i, i + 1) = -term.strength;
      g(i + 1, i) = -term.strength;
      break;
    }
    case DriveTermSpec::Kind::right_lead:
      for (Index i = first_right; i < n; ++i) g(i, i) = term.strength;
      break;
  }
  return HermitianOperator(g);
}

Scenario build_lattice_scenario(const LatticeScenarioSpec& spec) {
  spec.validate();
  const LeadOperators ops = build_two_lead(spec.lattice);
  OccupationOperator n =
      spec.state.kind == OccupationKind::pure
          ? fermi_occupation(ops.h0, spec.state.mu)
          : thermal_occupation(ops.h0, spec.state.beta,
                               spec.state.mu_left + 0.5 * spec.lattice.bias,
                               spec.state.mu_right - 0.5 * spec.lattice.bias, ops.q);

  PropagatorSpec prop;
  prop.mode = spec.evolution.mode;
  prop.total_time = spec.evolution.total_time;
  prop.steps = spec.evolution.steps;
  if (prop.mode == PropagationMode::driven) {
    std::vector<DriveTerm> terms;
    for (const auto& term : spec.evolution.drive) {
      terms.push_back({drive_generator(term, spec.lattice), term.envelope});
    }
    prop.drive = Drive(std::move(terms));
  }
  UnitaryOperator u = propagate(prop, spec.evolution.coupled ? ops.h : ops.h0);
  return Scenario(std::move(n), ops.q, std::move(u));
}

// ---------------------------------------------------------------------------

Eigen::Matrix2cd ChiralScatter::generator(double t) const {
  Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
  const double b = smooth_bump((t - center) / width);
  switch (kind) {
    case Kind::identity:
      break;
    case Kind::phase:
      h(0, 0) = amplitude * b;
      h(1, 1) = -phase_ratio * amplitude * b;
      break;
    case Kind::mixing: {
      const Complex off = amplitude * b * std::exp(-kI * omega * t);
      h(0, 1) = off;
      h(1, 0) = std::conj(off);
      break;
    }
  }
  return h;
}

double ChiralModel::time_step() const { return std::numbers::pi / energy_cutoff; }

double ChiralModel::window() const { return static_cast<double>(grid_points) * time_step(); }

void ChiralModel::validate() const {
  if (!(energy_cutoff > 0.0) || !std::isfinite(energy_cutoff)) {
    throw ContractError("ChiralModel: energy_cutoff must be positive");
  }
  if (grid_points < 4 || grid_points % 2 != 0) {
    throw ContractError("ChiralModel: grid_points must be even and >= 4");
  }
  if (!(scatter.width > 0.0)) throw ContractError("ChiralModel: scatter width must be positive");
}

double chiral_energy_window(double energy, double cutoff) {
  constexpr double inner = 0.5;
  constexpr double outer = 0.9;
  const double x = std::abs(energy) / cutoff;
  if (x <= inner) return 1.0;
  if (x >= outer) return 0.0;
  // Smooth transition built from exp(-1/z).
  const auto s = [](double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; };
  const double u = (outer - x) / (outer - inner);
  return s(u) / (s(u) + s(1.0 - u));
}

ChiralOperators build_chiral(const ChiralModel& model) {
  model.validate();
  const Index g = model.grid_points;
  const double dt = model.time_step();
  const double w = model.window();
  const double t0 = -0.5 * w;
  const auto& sc = model.scatter;
  if (sc.kind != ChiralScatter::Kind::identity &&
      (sc.support_lo() < t0 + dt || sc.support_hi() > t0 + w - dt)) {
    std::ostringstream os;
    os << "scatter support [" << sc.support_lo() << ", " << sc.support_hi()
       << "] exceeds the time window [" << t0 << ", " << t0 + w << ")";
    throw ContractError("build_chiral: " + os.str());
  }

  RealVector times(g), energies(g);
  const double de = 2.0 * std::numbers::pi / w;
  for (Index j = 0; j < g; ++j) times(j) = t0 + static_cast<double>(j) * dt;
  for (Index m = 0; m < g; ++m) energies(m) = de * (static_cast<double>(m - g / 2) + 0.5);

  Matrix f(g, g);
  const double norm = 1.0 / std::sqrt(static_cast<double>(g));
  for (Index j = 0; j < g; ++j) {
    for (Index m = 0; m < g; ++m) f(j, m) = norm * std::exp(-kI * energies(m) * times(j));
  }

  const Index n = 2 * g;
  // Per-channel energy-diagonal pieces lifted to the t basis.
  RealVector occ(g), sqrt_window(g);
  for (Index m = 0; m < g; ++m) {
    occ(m) = energies(m) < 0.0 ? 1.0 : 0.0;
    sqrt_window(m) = std::sqrt(chiral_energy_window(energies(m), model.energy_cutoff));
  }
  const Matrix n_block = f * occ.cast<Complex>().asDiagonal() * f.adjoint();
  const Matrix w_block = f * sqrt_window.cast<Complex>().asDiagonal() * f.adjoint();

  Matrix n_full = Matrix::Zero(n, n);
  Matrix w_full = Matrix::Zero(n, n);
  for (int c = 0; c < 2; ++c) {
    n_full.block(c * g, c * g, g, g) = n_block;
    w_full.block(c * g, c * g, g, g) = w_block;
  }

  Matrix h = Matrix::Zero(n, n);
  for (Index j = 0; j < g; ++j) {
    const Eigen::Matrix2cd hj = sc.generator(times(j));
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) h(a * g + j, b * g + j) = hj(a, b);
    }
  }
  const Matrix k = hermitian_part(w_full * h * w_full);

  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < g; ++j) mask[static_cast<std::size_t>(j)] = true;

  auto u = unitary_exp(HermitianOperator::from_hermitian_part(k), 1.0);
  Scenario scenario(OccupationOperator::pure(n_full), ChargeProjection(std::move(mask)),
                    std::move(u));
  return {std::move(times), std::move(energies), std::move(f), k, std::move(scenario)};
}

}  // namespace fcs
