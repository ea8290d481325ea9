#include "fcs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace fcs {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

/// Reads fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_number()) throw ConfigError(path(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  Index integer(const std::string& key, std::optional<Index> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
    return v->get<Index>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_string()) throw ConfigError(path(key), "must be a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
    }
  }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(path(key), "required field is missing");
    return *fallback;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class E>
E choose(const std::string& path, const std::string& value,
         std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(path, "'" + value + "' is not one of: " + names);
}

Envelope parse_envelope(const json& j, const std::string& path) {
  Section s(j, path);
  Envelope e;
  e.shape = choose<Envelope::Shape>(s.path("shape"), s.text("shape", "constant"),
                                    {{"constant", Envelope::Shape::constant},
                                     {"gaussian", Envelope::Shape::gaussian},
                                     {"smooth_pulse", Envelope::Shape::smooth_pulse},
                                     {"sine", Envelope::Shape::sine}});
  e.amplitude = s.number("amplitude", 1.0);
  e.center = s.number("center", 0.0);
  e.width = s.number("width", 1.0);
  e.frequency = s.number("frequency", 0.0);
  e.phase = s.number("phase", 0.0);
  if (!(e.width > 0.0)) throw ConfigError(s.path("width"), "must be positive");
  s.finish();
  return e;
}

void parse_two_lead(Section& m, ScenarioConfig& c) {
  auto& lat = c.lattice.lattice;
  lat.sites_left = m.integer("sites_left");
  lat.sites_right = m.integer("sites_right");
  lat.hopping = m.number("hopping", 1.0);
  lat.onsite_left = m.number("onsite_left", 0.0);
  lat.onsite_right = m.number("onsite_right", 0.0);
  lat.coupling = m.number("coupling", 0.0);
  lat.bias = m.number("bias", 0.0);
  if (lat.sites_left < 1) throw ConfigError(m.path("sites_left"), "must be >= 1");
  if (lat.sites_right < 1) throw ConfigError(m.path("sites_right"), "must be >= 1");
}

void parse_chiral(Section& m, ScenarioConfig& c) {
  auto& ch = c.chiral;
  ch.energy_cutoff = m.number("energy_cutoff");
  ch.grid_points = m.integer("grid_points");
  if (!(ch.energy_cutoff > 0.0)) throw ConfigError(m.path("energy_cutoff"), "must be positive");
  if (ch.grid_points < 4 || ch.grid_points % 2 != 0) {
    throw ConfigError(m.path("grid_points"), "must be even and >= 4");
  }
  const json* sj = m.find("scatter");
  if (!sj) throw ConfigError(m.path("scatter"), "required field is missing");
  Section s(*sj, m.path("scatter"));
  auto& sc = ch.scatter;
  sc.kind = choose<ChiralScatter::Kind>(s.path("kind"), s.text("kind"),
                                        {{"identity", ChiralScatter::Kind::identity},
                                         {"phase", ChiralScatter::Kind::phase},
                                         {"mixing", ChiralScatter::Kind::mixing}});
  sc.amplitude = s.number("amplitude", 0.0);
  sc.center = s.number("center", 0.0);
  sc.width = s.number("width", 1.0);
  sc.omega = s.number("omega", 0.0);
  sc.phase_ratio = s.number("phase_ratio", 0.0);
  if (!(sc.width > 0.0)) throw ConfigError(s.path("width"), "must be positive");
  s.finish();
}

// Same support condition build_chiral enforces, evaluated for a given grid.
void check_chiral_support(const ChiralScatter& sc, double cutoff, Index grid_points,
                          const std::string& path) {
  if (sc.kind == ChiralScatter::Kind::identity) return;
  const double dt = std::numbers::pi / cutoff;
  const double t0 = -0.5 * static_cast<double>(grid_points) * dt;
  if (sc.support_lo() < t0 + dt || sc.support_hi() > -t0 - dt) {
    std::ostringstream os;
    os << "scatter support [" << sc.support_lo() << ", " << sc.support_hi()
       << "] does not fit in the time window of half-width " << -t0;
    throw ConfigError(path, os.str());
  }
}

void parse_state(const json* j, const std::string& path, ScenarioConfig& c) {
  auto& st = c.lattice.state;
  if (!j) {
    if (c.model == ScenarioConfig::ModelKind::chiral) return;
    throw ConfigError(path, "required field is missing");
  }
  Section s(*j, path);
  const std::string type = s.text("type");
  if (type == "pure") {
    st.kind = OccupationKind::pure;
    st.mu = s.number("mu", 0.0);
  } else if (type == "thermal") {
    st.kind = OccupationKind::thermal;
    st.beta = s.number("beta");
    st.mu_left = s.number("mu_left", 0.0);
    st.mu_right = s.number("mu_right", 0.0);
    if (!(st.beta > 0.0)) throw ConfigError(s.path("beta"), "must be positive");
  } else {
    throw ConfigError(s.path("type"), "'" + type + "' is not one of: pure, thermal");
  }
  s.finish();
  if (c.model == ScenarioConfig::ModelKind::chiral &&
      (st.kind != OccupationKind::pure || st.mu != 0.0)) {
    throw ConfigError(path, "the chiral model has a fixed Fermi sea (pure, mu = 0)");
  }
  if (c.model == ScenarioConfig::ModelKind::two_lead && st.kind == OccupationKind::pure &&
      c.lattice.lattice.bias != 0.0) {
    throw ConfigError("model.bias", "applies to thermal states only");
  }
}

void parse_evolution(const json* j, const std::string& path, ScenarioConfig& c) {
  auto& ev = c.lattice.evolution;
  if (!j) return;
  if (c.model == ScenarioConfig::ModelKind::chiral) {
    throw ConfigError(path, "the chiral model's evolution is fixed by model.scatter");
  }
  Section s(*j, path);
  ev.mode = choose<PropagationMode>(s.path("mode"), s.text("mode", "stationary"),
                                    {{"stationary", PropagationMode::stationary},
                                     {"driven", PropagationMode::driven}});
  ev.total_time = s.number("total_time", 0.0);
  ev.steps = s.integer("steps", 1);
  ev.coupled = choose<bool>(s.path("hamiltonian"), s.text("hamiltonian", "coupled"),
                            {{"coupled", true}, {"free", false}});
  if (ev.total_time < 0.0) throw ConfigError(s.path("total_time"), "must be >= 0");
  if (ev.steps < 1) throw ConfigError(s.path("steps"), "must be >= 1");

  if (const json* drive = s.find("drive")) {
    if (!drive->is_array()) throw ConfigError(s.path("drive"), "must be an array");
    if (ev.mode != PropagationMode::driven && !drive->empty()) {
      throw ConfigError(s.path("drive"), "needs evolution.mode = driven");
    }
    for (std::size_t i = 0; i < drive->size(); ++i) {
      const std::string tp = indexed(s.path("drive"), i);
      Section d((*drive)[i], tp);
      DriveTermSpec term;
      term.kind = choose<DriveTermSpec::Kind>(d.path("kind"), d.text("kind"),
                                              {{"onsite", DriveTermSpec::Kind::onsite},
                                               {"bond", DriveTermSpec::Kind::bond},
                                               {"right_lead", DriveTermSpec::Kind::right_lead}});
      term.site = d.integer("site", 0);
      term.strength = d.number("strength", 1.0);
      if (const json* env = d.find("envelope")) term.envelope = parse_envelope(*env, d.path("envelope"));
      d.finish();
      try {
        (void)drive_generator(term, c.lattice.lattice);
      } catch (const ContractError& e) {
        throw ConfigError(tp, e.what());
      }
      ev.drive.push_back(term);
    }
  }
  s.finish();
}

void check_increasing(const std::vector<double>& v, const std::string& path) {
  if (v.empty()) throw ConfigError(path, "must not be empty");
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) throw ConfigError(path, "values must be strictly increasing");
  }
}

void check_lengths(const std::vector<double>& v, const std::string& path) {
  for (double x : v) {
    if (x < 1.0 || x != std::floor(x)) throw ConfigError(path, "lengths must be integers >= 1");
  }
}

ScanSpec parse_scan(const json& j, const std::string& path, const ScenarioConfig& c) {
  Section s(j, path);
  ScanSpec scan;
  scan.name = s.text("name");
  scan.kind = choose<ScanSpec::Kind>(s.path("kind"), s.text("kind"),
                                     {{"length", ScanSpec::Kind::length},
                                      {"depth", ScanSpec::Kind::depth},
                                      {"variance", ScanSpec::Kind::variance}});
  const json* values = s.find("values");
  if (!values || !values->is_array()) throw ConfigError(s.path("values"), "must be an array");
  for (const auto& v : *values) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ConfigError(s.path("values"), "entries must be finite numbers");
    }
    scan.values.push_back(v.get<double>());
  }
  s.finish();
  if (scan.name.empty()) throw ConfigError(s.path("name"), "must not be empty");
  check_increasing(scan.values, s.path("values"));

  const bool lattice = c.model == ScenarioConfig::ModelKind::two_lead;
  switch (scan.kind) {
    case ScanSpec::Kind::length: {
      if (!lattice) throw ConfigError(s.path("kind"), "length scans need a two_lead model");
      check_lengths(scan.values, s.path("values"));
      const double reach = max_group_velocity(c.lattice.lattice.hopping) *
                           c.lattice.evolution.total_time;
      if (!(reach < scan.values.front())) {
        std::ostringstream os;
        os << "boundary contamination: causal cone 2*hopping*T = " << reach
           << " does not fit inside the shortest lead";
        throw ConfigError(s.path("values"), os.str());
      }
      break;
    }
    case ScanSpec::Kind::depth:
      if (lattice) {
        if (c.lattice.state.kind != OccupationKind::pure) {
          throw ConfigError(s.path("kind"), "lattice depth scans need a pure state");
        }
      } else {
        const double window = c.chiral.window();
        for (double cutoff : scan.values) {
          if (!(cutoff > 0.0)) throw ConfigError(s.path("values"), "cutoffs must be positive");
          const Index g =
              2 * static_cast<Index>(std::llround(window * cutoff / (2.0 * std::numbers::pi)));
          if (g < 4) throw ConfigError(s.path("values"), "cutoff gives fewer than 4 grid points");
          check_chiral_support(c.chiral.scatter, cutoff, g, s.path("values"));
        }
      }
      break;
    case ScanSpec::Kind::variance:
      if (!lattice) throw ConfigError(s.path("kind"), "variance scans need a two_lead model");
      check_lengths(scan.values, s.path("values"));
      break;
  }
  return scan;
}

void parse_analysis(const json* j, const std::string& path, ScenarioConfig& c) {
  auto& a = c.analysis;
  const Index dim = c.dimension();
  const bool pure = c.model == ScenarioConfig::ModelKind::chiral ||
                    c.lattice.state.kind == OccupationKind::pure;
  if (j) {
    Section s(*j, path);
    const std::string variant = s.text("variant", "regularized");
    try {
      a.variant = parse_kernel_variant(variant);
    } catch (const ContractError& e) {
      throw ConfigError(s.path("variant"), e.what());
    }
    a.grid_size = s.integer("grid_size", 0);
    a.cumulant_order = static_cast<int>(s.integer("cumulant_order", 4));
    a.lambda_ref = s.number("lambda_ref", std::numbers::pi / 2.0);
    c.noncompact_steps = s.integer("noncompact_steps", -1);

    if (a.grid_size != 0 && (a.grid_size % 2 == 0 || a.grid_size < minimum_grid_size(dim))) {
      throw ConfigError(s.path("grid_size"), "must be 0 or odd and >= 2*dim+1 = " +
                                                 std::to_string(minimum_grid_size(dim)));
    }
    if (a.cumulant_order < 2 || a.cumulant_order > 6) {
      throw ConfigError(s.path("cumulant_order"), "must be in [2, 6]");
    }
    if (a.variant == KernelVariant::zero_temperature && !pure) {
      throw ConfigError(s.path("variant"), "zero_temperature needs a pure state");
    }
    if (c.noncompact_steps >= 0) {
      if (c.model != ScenarioConfig::ModelKind::chiral) {
        throw ConfigError(s.path("noncompact_steps"), "needs a chiral model");
      }
      const double de = 2.0 * std::numbers::pi / c.chiral.window();
      if (static_cast<double>(c.noncompact_steps) * de > 0.25 * c.chiral.energy_cutoff + 1e-12) {
        throw ConfigError(s.path("noncompact_steps"), "steps * dE must stay below Lambda/4");
      }
      if (c.chiral.scatter.kind != ChiralScatter::Kind::mixing) {
        throw ConfigError(s.path("noncompact_steps"),
                          "demo not applicable: the scatterer does not move charge between "
                          "channels");
      }
    }
    if (const json* scans = s.find("scans")) {
      if (!scans->is_array()) throw ConfigError(s.path("scans"), "must be an array");
      std::set<std::string> names;
      for (std::size_t i = 0; i < scans->size(); ++i) {
        const std::string sp = indexed(s.path("scans"), i);
        ScanSpec scan = parse_scan((*scans)[i], sp, c);
        if (!names.insert(scan.name).second) {
          throw ConfigError(join(sp, "name"), "duplicate scan name '" + scan.name + "'");
        }
        c.scans.push_back(std::move(scan));
      }
    }
    // A fixed grid must also cover the largest scan point.
    if (a.grid_size != 0) {
      for (const auto& scan : c.scans) {
        Index largest = dim;
        for (double v : scan.values) {
          if (scan.kind == ScanSpec::Kind::length) largest = std::max(largest, 2 * static_cast<Index>(v));
          if (scan.kind == ScanSpec::Kind::depth && c.model == ScenarioConfig::ModelKind::chiral) {
            const double window = c.chiral.window();
            largest = std::max(largest, 4 * static_cast<Index>(std::llround(window * v / (2.0 * std::numbers::pi))));
          }
        }
        if (a.grid_size < minimum_grid_size(largest)) {
          throw ConfigError(s.path("grid_size"), "scan '" + scan.name + "' reaches dimension " +
                                                     std::to_string(largest) + ", needs >= " +
                                                     std::to_string(minimum_grid_size(largest)));
        }
      }
    }
    s.finish();
  }
}

}  // namespace

std::string to_string(ScanSpec::Kind kind) {
  switch (kind) {
    case ScanSpec::Kind::length: return "length";
    case ScanSpec::Kind::depth: return "depth";
    case ScanSpec::Kind::variance: return "variance";
  }
  return "?";
}

Index ScenarioConfig::dimension() const {
  return model == ModelKind::two_lead ? lattice.lattice.dimension() : 2 * chiral.grid_points;
}

Scenario ScenarioConfig::build() const {
  if (model == ModelKind::two_lead) return build_lattice_scenario(lattice);
  return build_chiral(chiral).scenario;
}

const ScanSpec* ScenarioConfig::find_scan(const std::string& scan_name) const {
  for (const auto& s : scans) {
    if (s.name == scan_name) return &s;
  }
  return nullptr;
}

ScenarioConfig parse_config(const json& doc) {
  Section root(doc, "");
  ScenarioConfig c;
  c.name = root.text("name", "");

  const json* model = root.find("model");
  if (!model) throw ConfigError("model", "required field is missing");
  Section m(*model, "model");
  c.model = choose<ScenarioConfig::ModelKind>(
      m.path("type"), m.text("type"),
      {{"two_lead", ScenarioConfig::ModelKind::two_lead},
       {"chiral", ScenarioConfig::ModelKind::chiral}});
  if (c.model == ScenarioConfig::ModelKind::two_lead) {
    parse_two_lead(m, c);
  } else {
    parse_chiral(m, c);
    check_chiral_support(c.chiral.scatter, c.chiral.energy_cutoff, c.chiral.grid_points,
                         "model.scatter");
  }
  m.finish();

  parse_state(root.find("state"), "state", c);
  parse_evolution(root.find("evolution"), "evolution", c);
  parse_analysis(root.find("analysis"), "analysis", c);
  root.finish();

  if (c.model == ScenarioConfig::ModelKind::two_lead &&
      c.lattice.state.kind == OccupationKind::pure) {
    const LeadOperators ops = build_two_lead(c.lattice.lattice);
    const auto levels = hermitian_eig(ops.h0).eigenvalues;
    for (Index k = 0; k < levels.size(); ++k) {
      if (std::abs(levels(k) - c.lattice.state.mu) < kDegeneracyGate) {
        std::ostringstream os;
        os << "Fermi level sits on the H0 level " << levels(k)
           << "; the Fermi sea is ambiguous";
        throw ConfigError("state.mu", os.str());
      }
    }
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

namespace {

const char* envelope_name(Envelope::Shape s) {
  switch (s) {
    case Envelope::Shape::constant: return "constant";
    case Envelope::Shape::gaussian: return "gaussian";
    case Envelope::Shape::smooth_pulse: return "smooth_pulse";
    case Envelope::Shape::sine: return "sine";
  }
  return "?";
}

const char* drive_name(DriveTermSpec::Kind k) {
  switch (k) {
    case DriveTermSpec::Kind::onsite: return "onsite";
    case DriveTermSpec::Kind::bond: return "bond";
    case DriveTermSpec::Kind::right_lead: return "right_lead";
  }
  return "?";
}

const char* scatter_name(ChiralScatter::Kind k) {
  switch (k) {
    case ChiralScatter::Kind::identity: return "identity";
    case ChiralScatter::Kind::phase: return "phase";
    case ChiralScatter::Kind::mixing: return "mixing";
  }
  return "?";
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  if (c.model == ScenarioConfig::ModelKind::two_lead) {
    const auto& lat = c.lattice.lattice;
    doc["model"] = {{"type", "two_lead"},         {"sites_left", lat.sites_left},
                    {"sites_right", lat.sites_right}, {"hopping", lat.hopping},
                    {"onsite_left", lat.onsite_left}, {"onsite_right", lat.onsite_right},
                    {"coupling", lat.coupling},       {"bias", lat.bias}};
    const auto& st = c.lattice.state;
    if (st.kind == OccupationKind::pure) {
      doc["state"] = {{"type", "pure"}, {"mu", st.mu}};
    } else {
      doc["state"] = {{"type", "thermal"},
                      {"beta", st.beta},
                      {"mu_left", st.mu_left},
                      {"mu_right", st.mu_right}};
    }
    const auto& ev = c.lattice.evolution;
    json drive = json::array();
    for (const auto& t : ev.drive) {
      drive.push_back({{"kind", drive_name(t.kind)},
                       {"site", t.site},
                       {"strength", t.strength},
                       {"envelope",
                        {{"shape", envelope_name(t.envelope.shape)},
                         {"amplitude", t.envelope.amplitude},
                         {"center", t.envelope.center},
                         {"width", t.envelope.width},
                         {"frequency", t.envelope.frequency},
                         {"phase", t.envelope.phase}}}});
    }
    doc["evolution"] = {
        {"mode", ev.mode == PropagationMode::driven ? "driven" : "stationary"},
        {"total_time", ev.total_time},
        {"steps", ev.steps},
        {"hamiltonian", ev.coupled ? "coupled" : "free"},
        {"drive", drive}};
  } else {
    const auto& ch = c.chiral;
    doc["model"] = {{"type", "chiral"},
                    {"energy_cutoff", ch.energy_cutoff},
                    {"grid_points", ch.grid_points},
                    {"scatter",
                     {{"kind", scatter_name(ch.scatter.kind)},
                      {"amplitude", ch.scatter.amplitude},
                      {"center", ch.scatter.center},
                      {"width", ch.scatter.width},
                      {"omega", ch.scatter.omega},
                      {"phase_ratio", ch.scatter.phase_ratio}}}};
    doc["state"] = {{"type", "pure"}, {"mu", 0.0}};
  }
  json scans = json::array();
  for (const auto& s : c.scans) {
    scans.push_back({{"name", s.name}, {"kind", to_string(s.kind)}, {"values", s.values}});
  }
  doc["analysis"] = {{"variant", to_string(c.analysis.variant)},
                     {"grid_size", c.analysis.grid_size},
                     {"cumulant_order", c.analysis.cumulant_order},
                     {"lambda_ref", c.analysis.lambda_ref},
                     {"noncompact_steps", c.noncompact_steps},
                     {"scans", scans}};
  return doc;
}

}  // namespace fcs
