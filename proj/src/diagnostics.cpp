#include "fcs/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace fcs {

namespace {

// N N' vanishes identically for a Fermi sea; the spectral root would only
// return sqrt(roundoff).
Matrix sqrt_n_nprime(const OccupationOperator& occ) {
  const Matrix& n = occ.matrix();
  if (occ.is_pure()) return Matrix::Zero(n.rows(), n.cols());
  const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(n - n * n));
  return spec.apply([](double x) { return std::sqrt(std::max(0.0, x)); });
}

double relative(double from, double to) { return std::abs(to - from) / (std::abs(from) + 1e-12); }

void require_increasing(const std::vector<double>& values, const char* what) {
  if (values.empty()) throw ContractError(std::string(what) + ": empty parameter list");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) {
      throw ContractError(std::string(what) + ": parameter values must be strictly increasing");
    }
  }
}

std::vector<double> as_double(const std::vector<Index>& v) {
  return {v.begin(), v.end()};
}

ScanPoint scan_point(double parameter, const Scenario& s, const AnalysisOptions& options) {
  return {parameter, analyze(s, options).cumulants, norm_report(s, options.lambda_ref)};
}

LatticeScenarioSpec with_length(LatticeScenarioSpec spec, Index length) {
  spec.lattice.sites_left = length;
  spec.lattice.sites_right = length;
  return spec;
}

}  // namespace

// ---------------------------------------------------------------------------

double NormReport::operator[](const std::string& label) const {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == label) return values[k];
  }
  throw ContractError("NormReport: unknown label '" + label + "'");
}

const std::vector<std::string>& norm_labels() {
  static const std::vector<std::string> labels = {
      "trnorm_comm_N_U",   "hsnorm_comm_N_U", "trnorm_Q_sqrtNNp",    "trnorm_dQ_sqrtNNp",
      "trnorm_dQ_N",       "trnorm_QU_dN",    "trnorm_Dreg_minus_1", "trnorm_D_minus_1"};
  return labels;
}

NormReport norm_report(const Scenario& s, double lambda_ref) {
  const Matrix& n = s.n().matrix();
  const Matrix& u = s.u().matrix();
  const Matrix& q = s.q().matrix();
  const Matrix dq = s.q_u() - q;
  const Matrix root = sqrt_n_nprime(s.n());
  const Matrix comm = commutator(n, u);
  const Index dim = s.dim();

  NormReport r;
  r.labels = norm_labels();
  r.values = {
      trace_norm(comm),
      hilbert_schmidt_norm(comm),
      trace_norm(q * root),
      trace_norm(dq * root),
      trace_norm(dq * n),
      trace_norm(s.q_u() * (n - s.n_u())),
      trace_norm(regularized_kernel(s, lambda_ref).matrix - identity(dim)),
      trace_norm(levitov_kernel(s, lambda_ref).matrix - identity(dim)),
  };
  return r;
}

ScenarioAnalysis analyze(const Scenario& s, const AnalysisOptions& options) {
  const Index k = options.grid_size == 0 ? minimum_grid_size(s.dim()) : options.grid_size;
  ScenarioAnalysis out;
  out.samples = generating_function(s, options.variant, k, options.threads);
  out.distribution = charge_distribution(out.samples);
  out.cumulants = cumulants(out.distribution, options.cumulant_order);
  return out;
}

std::vector<double> ScanResult::relative_change(int cumulant) const {
  std::vector<double> out;
  for (std::size_t k = 1; k < points.size(); ++k) {
    out.push_back(relative(points[k - 1].cumulants[cumulant], points[k].cumulants[cumulant]));
  }
  return out;
}

std::vector<double> ScanResult::relative_change(const std::string& norm_label) const {
  std::vector<double> out;
  for (std::size_t k = 1; k < points.size(); ++k) {
    out.push_back(relative(points[k - 1].norms[norm_label], points[k].norms[norm_label]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scans

ScanResult tenet_scan_length(const LatticeScenarioSpec& base, const std::vector<Index>& lengths,
                             const AnalysisOptions& options) {
  require_increasing(as_double(lengths), "tenet_scan_length");
  const double reach =
      max_group_velocity(base.lattice.hopping) * base.evolution.total_time;
  if (!(reach < static_cast<double>(lengths.front()))) {
    std::ostringstream os;
    os << "boundary contamination: causal cone 2*hopping*T = " << reach
       << " does not fit inside the shortest lead (" << lengths.front() << " sites)";
    throw ContractError(os.str());
  }
  ScanResult result;
  result.parameter_name = "sites_per_lead";
  for (Index length : lengths) {
    const Scenario s = build_lattice_scenario(with_length(base, length));
    result.points.push_back(scan_point(static_cast<double>(length), s, options));
  }
  return result;
}

ScanResult tenet_scan_depth(const ChiralModel& base, const std::vector<double>& cutoffs,
                            const AnalysisOptions& options) {
  require_increasing(cutoffs, "tenet_scan_depth");
  const double window = base.window();
  ScanResult result;
  result.parameter_name = "energy_cutoff";
  for (double cutoff : cutoffs) {
    ChiralModel model = base;
    model.energy_cutoff = cutoff;
    // Keep the time window fixed: G pi / Lambda = W, rounded to an even G.
    model.grid_points =
        2 * static_cast<Index>(std::llround(window * cutoff / (2.0 * std::numbers::pi)));
    const ChiralOperators ops = build_chiral(model);
    result.points.push_back(scan_point(cutoff, ops.scenario, options));
  }
  return result;
}

ScanResult tenet_scan_depth(const LatticeScenarioSpec& base, const std::vector<double>& mus,
                            const AnalysisOptions& options) {
  require_increasing(mus, "tenet_scan_depth");
  if (base.state.kind != OccupationKind::pure) {
    throw ContractError("lattice depth scan needs a pure state (it moves the Fermi level)");
  }
  ScanResult result;
  result.parameter_name = "mu";
  for (double mu : mus) {
    LatticeScenarioSpec spec = base;
    spec.state.mu = mu;
    result.points.push_back(scan_point(mu, build_lattice_scenario(spec), options));
  }
  return result;
}

// ---------------------------------------------------------------------------

NoncompactDemo noncompact_demo(const ChiralModel& model, Index n_max) {
  if (n_max < 0) throw ContractError("noncompact_demo: n_max must be >= 0");
  const ChiralOperators ops = build_chiral(model);
  const Index g = model.grid_points;
  const Scenario& s = ops.scenario;

  NoncompactDemo demo;
  demo.energy_step = 2.0 * std::numbers::pi / model.window();
  if (static_cast<double>(n_max) * demo.energy_step > 0.25 * model.energy_cutoff + 1e-12) {
    throw ContractError("noncompact_demo: n_max * dE exceeds Lambda/4");
  }

  const double sigma = 0.5 * model.scatter.width;
  ComplexVector psi = ComplexVector::Zero(2 * g);
  for (Index j = 0; j < g; ++j) {
    const double x = (ops.times(j) - model.scatter.center) / sigma;
    psi(j) = std::exp(-0.5 * x * x);
  }
  psi /= psi.norm();

  const Matrix dq = s.q_u() - s.q().matrix();
  demo.reference = (dq * psi).norm();
  if (demo.reference < 1e-8) {
    throw ContractError(
        "noncompact_demo: not applicable, (Q_U - Q) psi vanishes for this scatterer");
  }
  const Matrix dqn = dq * s.n().matrix();
  for (Index step = 0; step <= n_max; ++step) {
    ComplexVector psi_n = psi;
    const double shift = static_cast<double>(step) * demo.energy_step;
    for (Index j = 0; j < g; ++j) psi_n(j) *= std::exp(kI * shift * ops.times(j));
    demo.norms.push_back((dqn * psi_n).norm());
  }
  return demo;
}

double charge_variance(const Scenario& s) {
  const Matrix& n = s.n().matrix();
  return (s.q().matrix() * n * (identity(s.dim()) - n)).trace().real();
}

VarianceFit variance_vs_length(const LatticeScenarioSpec& base, const std::vector<Index>& lengths) {
  require_increasing(as_double(lengths), "variance_vs_length");
  LatticeScenarioSpec equilibrium = base;
  equilibrium.evolution = EvolutionSpec{};

  VarianceFit fit;
  fit.lengths = lengths;
  for (Index length : lengths) {
    fit.variances.push_back(charge_variance(build_lattice_scenario(with_length(equilibrium, length))));
  }

  const auto m = static_cast<double>(lengths.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    sx += static_cast<double>(lengths[k]);
    sy += fit.variances[k];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const double dx = static_cast<double>(lengths[k]) - mx;
    const double dy = fit.variances[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const double r = fit.variances[k] - (fit.intercept + fit.slope * static_cast<double>(lengths[k]));
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

// ---------------------------------------------------------------------------
// Dyson boundary term

namespace {

struct DysonSides {
  double lhs;
  double rhs;
};

DysonSides dyson_sides(const std::function<Complex(double)>& v_pm, double s,
                       const DysonQuadrature& quad, Index x_points, Index u_points) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double hx = (quad.x_hi - quad.x_lo) / static_cast<double>(x_points);
  std::vector<double> xs, wx;
  std::vector<Complex> vx;
  double v_l2 = 0.0;
  for (Index k = 0; k <= x_points; ++k) {
    const double x = quad.x_lo + static_cast<double>(k) * hx;
    const double w = (k == 0 || k == x_points) ? 0.5 * hx : hx;
    xs.push_back(x);
    wx.push_back(w);
    vx.push_back(v_pm(x));
    v_l2 += w * std::norm(vx.back());
  }
  // Plancherel for Vhat(v) = (2 pi)^{-1} int V(x) e^{-ivx} dx.
  const double vhat_norm2 = v_l2 / two_pi;

  const auto vhat2 = [&](double v) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) acc += wx[k] * vx[k] * std::exp(-kI * v * xs[k]);
    return std::norm(acc / two_pi);
  };

  const double hu = quad.u_max / static_cast<double>(u_points);
  // F(u) = int_{-u}^{u} |Vhat|^2 by cumulative trapezoid.
  std::vector<double> f(static_cast<std::size_t>(u_points + 1), 0.0);
  double prev = 2.0 * vhat2(0.0);
  for (Index k = 1; k <= u_points; ++k) {
    const double u = static_cast<double>(k) * hu;
    const double cur = vhat2(u) + vhat2(-u);
    f[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k - 1)] + 0.5 * hu * (prev + cur);
    prev = cur;
  }

  const auto kernel = [s](double u) {
    if (u == 0.0) return 0.25 * s * s;
    const double sn = std::sin(0.5 * u * s);
    return sn * sn / (u * u);
  };
  double lhs = 0.0;
  for (Index k = 0; k <= u_points; ++k) {
    const double u = static_cast<double>(k) * hu;
    const double w = (k == 0 || k == u_points) ? 0.5 * hu : hu;
    lhs += w * kernel(u) * f[static_cast<std::size_t>(k)];
  }
  // Both signs of u and the overall factor 2, plus the tail beyond u_max
  // where F has saturated and sin^2 averages to 1/2.
  lhs = 4.0 * lhs + 2.0 * f.back() / quad.u_max;
  return {lhs, std::numbers::pi * std::abs(s) * vhat_norm2};
}

}  // namespace

DysonBound dyson_hs_check(const std::function<Complex(double)>& v_pm, double s,
                          const DysonQuadrature& quad) {
  if (!std::isfinite(s)) throw ContractError("dyson_hs_check: s must be finite");
  if (!(quad.x_hi > quad.x_lo)) throw ContractError("dyson_hs_check: empty x support");
  if (quad.x_points < 8 || quad.u_points < 8 || !(quad.u_max > 0.0)) {
    throw ContractError("dyson_hs_check: quadrature too coarse");
  }
  const DysonSides coarse = dyson_sides(v_pm, s, quad, quad.x_points, quad.u_points);
  const DysonSides fine = dyson_sides(v_pm, s, quad, 2 * quad.x_points, 2 * quad.u_points);

  DysonBound out;
  out.lhs = fine.lhs;
  out.rhs = fine.rhs;
  if (fine.lhs != 0.0 || coarse.lhs != 0.0) {
    out.self_convergence = std::abs(fine.lhs - coarse.lhs) / std::abs(fine.lhs);
  }
  if (!(out.self_convergence <= 0.01)) {
    throw AccuracyError("dyson.quadrature", out.self_convergence, 0.01);
  }
  return out;
}

}  // namespace fcs
