#include "fcs/app.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "fcs/oracle.hpp"

namespace fcs::app {

using nlohmann::json;

namespace {

class StageTimer {
 public:
  explicit StageTimer(json& timing) : timing_(timing) {}
  template <class F>
  auto operator()(const char* stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto result = body();
    timing_[stage] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  json& timing_;
};

json cumulants_json(const CumulantVector& c) { return c.kappa; }

json norms_json(const NormReport& r) {
  json out = json::object();
  for (std::size_t k = 0; k < r.labels.size(); ++k) out[r.labels[k]] = r.values[k];
  return out;
}

json scan_json(const ScanSpec& spec, const ScanResult& result) {
  json rows = json::array();
  for (const auto& p : result.points) {
    rows.push_back({{"parameter", p.parameter},
                    {"cumulants", cumulants_json(p.cumulants)},
                    {"norms", norms_json(p.norms)}});
  }
  return {{"name", spec.name},
          {"kind", to_string(spec.kind)},
          {"parameter_name", result.parameter_name},
          {"points", rows},
          {"relative_change_kappa1", result.relative_change(1)},
          {"relative_change_kappa2", result.relative_change(2)}};
}

json variance_json(const ScanSpec& spec, const VarianceFit& fit) {
  return {{"name", spec.name},         {"kind", to_string(spec.kind)},
          {"parameter_name", "sites_per_lead"},
          {"lengths", fit.lengths},    {"variances", fit.variances},
          {"slope", fit.slope},        {"intercept", fit.intercept},
          {"r_squared", fit.r_squared}};
}

std::vector<Index> as_lengths(const std::vector<double>& values) {
  std::vector<Index> out;
  for (double v : values) out.push_back(static_cast<Index>(v));
  return out;
}

ScanResult execute_scan(const ScenarioConfig& c, const ScanSpec& spec,
                        const AnalysisOptions& options) {
  if (spec.kind == ScanSpec::Kind::length) {
    return tenet_scan_length(c.lattice, as_lengths(spec.values), options);
  }
  if (c.model == ScenarioConfig::ModelKind::chiral) {
    return tenet_scan_depth(c.chiral, spec.values, options);
  }
  return tenet_scan_depth(c.lattice, spec.values, options);
}

AnalysisOptions analysis_options(const ScenarioConfig& c, const RunOptions& options) {
  AnalysisOptions a = c.analysis;
  a.threads = std::max(1u, options.threads);
  return a;
}

Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return hermitian_part(a);
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// run

json run(const ScenarioConfig& c, const RunOptions& options) {
  json timing = json::object();
  StageTimer timed(timing);
  const AnalysisOptions a = analysis_options(c, options);

  json doc;
  doc["schema"] = "fcs.result/1";
  doc["tool"] = {{"name", "fcs"}, {"version", FCS_VERSION}};
  doc["config"] = to_json(c);

  const Scenario s = timed("build", [&] { return c.build(); });
  json scenario = {{"model", c.model == ScenarioConfig::ModelKind::two_lead ? "two_lead" : "chiral"},
                   {"dimension", s.dim()},
                   {"state", s.n().is_pure() ? "pure" : "thermal"},
                   {"charge_rank", s.q().rank()}};
  if (!s.n().is_pure()) scenario["occupation_gap"] = s.n().gap();
  doc["scenario"] = scenario;

  const ScenarioAnalysis result = timed("analysis", [&] { return analyze(s, a); });
  json lambdas = json::array(), re = json::array(), im = json::array();
  for (Index k = 0; k < result.samples.grid_size(); ++k) {
    lambdas.push_back(result.samples.lambda(k));
    re.push_back(result.samples.values[static_cast<std::size_t>(k)].real());
    im.push_back(result.samples.values[static_cast<std::size_t>(k)].imag());
  }
  doc["generating_function"] = {{"variant", to_string(result.samples.variant)},
                                {"grid_size", result.samples.grid_size()},
                                {"lambda", lambdas},
                                {"re", re},
                                {"im", im}};
  const auto& dist = result.distribution;
  doc["distribution"] = {{"n_min", dist.n_min},
                         {"p", dist.probabilities},
                         {"total", dist.total()},
                         {"min", dist.min_probability()},
                         {"imaginary_residue", dist.imaginary_residue}};
  doc["cumulants"] = cumulants_json(result.cumulants);

  const double direct = mean_transport_direct(s);
  doc["mean_transport"] = {{"direct", direct}, {"naive", naive_mean(s)}};

  doc["norms"] = {{"lambda_ref", a.lambda_ref},
                  {"values", norms_json(timed("norms", [&] {
                     return norm_report(s, a.lambda_ref);
                   }))}};

  const double ph = timed("checks", [&] {
    return particle_hole_check(s, result.samples.grid_size(), a.variant);
  });
  doc["checks"] = {{"chi0_deviation", std::abs(result.samples.values.front() - 1.0)},
                   {"particle_hole_deviation", ph},
                   {"kappa1_minus_direct", result.cumulants[1] - direct}};

  if (c.noncompact_steps >= 0) {
    const NoncompactDemo demo =
        timed("noncompact", [&] { return noncompact_demo(c.chiral, c.noncompact_steps); });
    doc["noncompact"] = {{"reference", demo.reference},
                         {"energy_step", demo.energy_step},
                         {"norms", demo.norms}};
  }

  json scans = json::array();
  for (const auto& spec : c.scans) {
    const std::string stage = "scan:" + spec.name;
    if (spec.kind == ScanSpec::Kind::variance) {
      scans.push_back(timed(stage.c_str(), [&] {
        return variance_json(spec, variance_vs_length(c.lattice, as_lengths(spec.values)));
      }));
    } else {
      scans.push_back(
          timed(stage.c_str(), [&] { return scan_json(spec, execute_scan(c, spec, a)); }));
    }
  }
  doc["scans"] = scans;
  doc["timing"] = timing;
  return doc;
}

json numeric_payload(const json& document) {
  json out = document;
  out.erase("timing");
  return out;
}

// ---------------------------------------------------------------------------
// oracle-check

bool OracleReport::passed() const {
  return chi_deviation <= kOracleGate && distribution_deviation <= kOracleGate &&
         trdet_deviation <= kOracleGate && omega_gamma_deviation <= kOracleGate;
}

json OracleReport::to_json() const {
  return {{"dimension", dimension},
          {"grid_size", grid_size},
          {"chi_deviation", chi_deviation},
          {"distribution_deviation", distribution_deviation},
          {"trdet_deviation", trdet_deviation},
          {"omega_gamma_deviation", omega_gamma_deviation},
          {"seed", seed},
          {"gate", kOracleGate},
          {"passed", passed()}};
}

OracleReport oracle_check(const ScenarioConfig& c, const RunOptions& options) {
  OracleReport report;
  report.dimension = c.dimension();
  report.seed = options.seed;
  if (report.dimension > oracle::kMaxModes) {
    throw ContractError("oracle-check: one-particle dimension " +
                        std::to_string(report.dimension) + " exceeds the Fock-space size gate (" +
                        std::to_string(oracle::kMaxModes) + ")");
  }
  const Scenario s = c.build();
  report.grid_size = c.analysis.grid_size != 0
                         ? c.analysis.grid_size
                         : std::max(kOracleGridPoints, minimum_grid_size(s.dim()));

  const oracle::FockBasis basis(static_cast<int>(s.dim()));
  const oracle::GibbsState state = oracle::quasi_free_state(s.n().matrix(), basis);
  const oracle::BruteForceCounter counter(s.u().matrix(), s.q().matrix(), state, basis);

  const unsigned threads = std::max(1u, options.threads);
  std::vector<KernelVariant> variants = {KernelVariant::naive, KernelVariant::regularized};
  if (s.n().is_pure()) variants.push_back(KernelVariant::zero_temperature);
  GeneratingFunctionSamples reference;
  for (KernelVariant v : variants) {
    const auto samples = generating_function(s, v, report.grid_size, threads);
    for (Index k = 0; k < samples.grid_size(); ++k) {
      const Complex brute = counter.chi(samples.lambda(k));
      report.chi_deviation = std::max(
          report.chi_deviation, std::abs(samples.values[static_cast<std::size_t>(k)] - brute));
    }
    if (v == KernelVariant::regularized) reference = samples;
  }
  report.distribution_deviation =
      max_abs_difference(charge_distribution(reference), counter.distribution());

  // Seeded identity checks on independent random inputs.
  std::mt19937_64 rng(options.seed);
  {
    const oracle::FockBasis b4(4);
    const Matrix weight = hermitian_eig(HermitianOperator::from_hermitian_part(
                                            random_hermitian(4, rng)))
                              .apply([](double x) { return std::exp(0.5 * x); });
    const auto gibbs = oracle::gibbs_state(hermitian_part(weight), b4);
    const Matrix a = random_hermitian(4, rng);
    report.trdet_deviation = oracle::trdet_identity_check(a, gibbs, b4, 0.9);
  }
  {
    std::uniform_real_distribution<double> occ(0.05, 0.95);
    const Matrix v = unitary_exp(HermitianOperator::from_hermitian_part(random_hermitian(5, rng)), 1.0)
                         .matrix();
    RealVector d(5);
    for (Index i = 0; i < 5; ++i) d(i) = occ(rng);
    const Matrix n = v * d.cast<Complex>().asDiagonal() * v.adjoint();
    Matrix low = Matrix::Zero(5, 5);
    const Matrix r = random_hermitian(5, rng);
    const auto spec = hermitian_eig(HermitianOperator::from_hermitian_part(r));
    for (Index k = 2; k < 5; ++k) {
      low += spec.eigenvalues(k) * spec.eigenvectors.col(k) * spec.eigenvectors.col(k).adjoint();
    }
    const Matrix u = unitary_exp(HermitianOperator::from_hermitian_part(low), 1.0).matrix();
    report.omega_gamma_deviation = oracle::omega_gamma_check(u, n);
  }
  return report;
}

// ---------------------------------------------------------------------------
// scan

std::string scan_csv(const ScenarioConfig& c, const std::string& scan_name,
                     const RunOptions& options) {
  const ScanSpec* spec = c.find_scan(scan_name);
  if (!spec) {
    std::string known;
    for (const auto& s : c.scans) known += (known.empty() ? "" : ", ") + s.name;
    throw ConfigError("analysis.scans", "no scan named '" + scan_name + "' (available: " +
                                            (known.empty() ? "none" : known) + ")");
  }
  std::ostringstream os;
  if (spec->kind == ScanSpec::Kind::variance) {
    const VarianceFit fit = variance_vs_length(c.lattice, as_lengths(spec->values));
    os << "parameter,variance\n";
    for (std::size_t k = 0; k < fit.lengths.size(); ++k) {
      os << format_number(static_cast<double>(fit.lengths[k])) << ','
         << format_number(fit.variances[k]) << '\n';
    }
    return os.str();
  }
  const ScanResult result = execute_scan(c, *spec, analysis_options(c, options));
  os << "parameter,kappa1,kappa2";
  for (const auto& label : norm_labels()) os << ',' << label;
  os << '\n';
  for (const auto& p : result.points) {
    os << format_number(p.parameter) << ',' << format_number(p.cumulants[1]) << ','
       << format_number(p.cumulants[2]);
    for (double v : p.norms.values) os << ',' << format_number(v);
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// CLI

namespace {

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot write '" + path + "'");
  f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Full counting statistics of free-fermion charge transport", "fcs"};
  cli.set_version_flag("--version", FCS_VERSION);
  cli.require_subcommand(1);

  std::string config_path, out_path, scan_name;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario configuration (JSON)")->required();
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--threads", threads, "Worker threads for grid evaluation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for the randomized self-checks");
  };
  CLI::App* run_cmd = cli.add_subcommand("run", "Run the full pipeline, write a JSON document");
  CLI::App* oracle_cmd =
      cli.add_subcommand("oracle-check", "Compare the engine with the Fock-space brute force");
  CLI::App* scan_cmd = cli.add_subcommand("scan", "Run one configured scan, write CSV");
  common(run_cmd);
  common(oracle_cmd);
  common(scan_cmd);
  scan_cmd->add_option("name", scan_name, "Scan name from analysis.scans")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kSuccess : kContractError;
  }

  try {
    const ScenarioConfig config = load_config(config_path);
    const RunOptions options{threads, seed};
    if (run_cmd->parsed()) {
      emit(run(config, options).dump(2) + "\n", out_path, out);
    } else if (oracle_cmd->parsed()) {
      const OracleReport report = oracle_check(config, options);
      emit(report.to_json().dump(2) + "\n", out_path, out);
      if (!report.passed()) {
        err << "oracle-check: deviation above " << format_number(kOracleGate) << '\n';
        return kIntegrityError;
      }
    } else {
      emit(scan_csv(config, scan_name, options), out_path, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kContractError;
  } catch (const ContractError& e) {
    err << "contract error: " << e.what() << '\n';
    return kContractError;
  } catch (const IntegrityError& e) {
    err << "numerical integrity error [" << e.invariant() << "]: " << e.what() << '\n';
    return kIntegrityError;
  }
  return kSuccess;
}

}  // namespace fcs::app
