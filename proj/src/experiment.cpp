#include "ehrenfest/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ehrenfest/classical.hpp"
#include "ehrenfest/diagnostics.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/husimi.hpp"
#include "ehrenfest/measurement.hpp"
#include "ehrenfest/propagators.hpp"
#include "ehrenfest/text.hpp"
#include "ehrenfest/wavefunction.hpp"

namespace ehrenfest {

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

std::size_t next_pow2(double x) {
  std::size_t n = 64;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

PotentialSpec scenario_potential(Scenario s) {
  switch (s) {
    case Scenario::DoubleWell: return PotentialSpec::double_well();
    case Scenario::Harmonic: return PotentialSpec::quadratic(1.0);
    case Scenario::Free: return PotentialSpec::custom({0.0});
    case Scenario::Dilation: break;
  }
  throw ConfigInvalid("scenario: dilation has no potential-type Hamiltonian");
}

SystemSpec scenario_system(Scenario s) {
  switch (s) {
    case Scenario::DoubleWell: return SystemSpec::double_well();
    case Scenario::Harmonic: return SystemSpec::harmonic(1.0);
    case Scenario::Free: return SystemSpec::free_particle();
    case Scenario::Dilation: return SystemSpec::dilation();
  }
  throw ConfigInvalid("scenario: unknown");
}

PhaseSpacePoint preset_start(Scenario s) {
  switch (s) {
    case Scenario::Dilation: return {0.0, 0.0};
    case Scenario::DoubleWell: return {0.0, 0.0};
    case Scenario::Harmonic: return {1.0, 0.0};
    case Scenario::Free: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

double double_well_lambda() {
  static const double lambda =
      hyperbolic_analysis(SystemSpec::double_well(), {0.0, 0.0}).lambda;
  return lambda;
}

// Grid sized for the dilation state at time t: width e^t sqrt(hbar/2),
// center q0 e^t.
GridSpec dilation_grid(double q0, double hbar, double t) {
  double sigma = std::exp(t) * std::sqrt(0.5 * hbar);
  double center = q0 * std::exp(t);
  double half = std::max(0.5, 24.0 * sigma);
  return GridSpec{center - half, center + half, 4096};
}

std::ofstream open_artifact(RunManifest& manifest, const std::filesystem::path& dir,
                            const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot open output file " + (dir / name).string());
  manifest.artifacts.push_back(name);
  return out;
}

void write_moments_row(std::ofstream& out, double t, double nrm, const Moments& m) {
  out << format_double(t) << ',' << format_double(nrm) << ',' << format_double(m.q_mean) << ','
      << format_double(m.p_mean) << ',' << format_double(m.delta_q) << ','
      << format_double(m.delta_p) << ',' << format_double(m.uncertainty_product) << "\n";
}

void write_husimi_csv(std::ofstream& out, const HusimiField& field) {
  out << "q,p,value\n";
  for (std::size_t iq = 0; iq < field.q_lattice.size(); ++iq)
    for (std::size_t ip = 0; ip < field.p_lattice.size(); ++ip)
      out << format_double(field.q_lattice[iq]) << ',' << format_double(field.p_lattice[ip]) << ','
          << format_double(field.value(iq, ip)) << "\n";
}

json revival_json(const RevivalResult& r, double t_a, double t_b) {
  json j;
  j["window"] = {t_a, t_b};
  j["baseline"] = r.baseline;
  if (r.peak_time) {
    j["peak_time"] = *r.peak_time;
    j["peak_height"] = r.peak_height;
  } else {
    j["peak_time"] = nullptr;
    j["peak_height"] = nullptr;
  }
  return j;
}

// Husimi lattice around the state's support, spacing sqrt(hbar)/3.
HusimiField state_husimi(const Wavefunction& psi) {
  Moments m = moments(psi);
  double sh = std::sqrt(psi.hbar);
  double q_lo = m.q_mean - 6.0 * m.delta_q - 5.0 * sh;
  double q_hi = m.q_mean + 6.0 * m.delta_q + 5.0 * sh;
  double band = psi.grid.nyquist_momentum(psi.hbar);
  double p_lo = std::max(-band, m.p_mean - 6.0 * m.delta_p - 5.0 * sh);
  double p_hi = std::min(band, m.p_mean + 6.0 * m.delta_p + 5.0 * sh);
  double spacing = sh / 3.0;
  auto nq = std::min<std::size_t>(400, static_cast<std::size_t>((q_hi - q_lo) / spacing) + 2);
  auto np = std::min<std::size_t>(400, static_cast<std::size_t>((p_hi - p_lo) / spacing) + 2);
  return husimi(psi, uniform_lattice(q_lo, q_hi, nq), uniform_lattice(p_lo, p_hi, np));
}

void write_measurement_json(RunManifest& manifest, const std::filesystem::path& dir,
                            const Wavefunction& psi) {
  // Eight uniform position bins valued at their midpoints: the minimal
  // concrete spectral observable.
  SpectralObservable obs;
  std::size_t bins = 8;
  for (std::size_t b = 0; b <= bins; ++b)
    obs.breakpoints.push_back(psi.grid.x_min +
                              (psi.grid.x_max - psi.grid.x_min) * static_cast<double>(b) /
                                  static_cast<double>(bins));
  for (std::size_t b = 0; b < bins; ++b)
    obs.values.push_back(0.5 * (obs.breakpoints[b] + obs.breakpoints[b + 1]));

  auto result = projective_measurement(psi, obs);
  json j;
  j["bin_edges"] = obs.breakpoints;
  j["eigenvalues"] = obs.values;
  std::vector<double> probs;
  for (const auto& o : result.outcomes) probs.push_back(o.probability);
  j["probabilities"] = probs;
  j["expectation"] = result.expectation;
  j["total_probability"] = result.total_probability;
  auto out = open_artifact(manifest, dir, "measurement.json");
  out << j.dump(2) << "\n";
}

struct ScenarioRun {
  std::vector<double> snapshot_times;
  std::vector<Wavefunction> snapshots;
  std::vector<PhaseSpacePoint> classical_points;  // classical flow at snapshot times
  // Dense records for revival detection.
  std::vector<double> dense_times;
  std::vector<std::complex<double>> dense_autocorr;
  std::vector<double> dense_norms;
};

ScenarioRun run_dilation_scenario(const ExperimentConfig& cfg) {
  ScenarioRun out;
  double hbar = cfg.hbar();
  auto envelope = EnvelopeSpec::standard_gaussian();

  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(cfg.t_final * i / 200.0);
  double t_half = 0.5 * std::log(1.0 / hbar);
  double t_full = std::log(1.0 / hbar);
  if (t_half <= cfg.t_final) times.push_back(t_half);
  if (t_full <= cfg.t_final) times.push_back(t_full);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  for (double t : times) {
    out.snapshot_times.push_back(t);
    out.snapshots.push_back(
        evolve_dilation(cfg.q0, cfg.p0, envelope, hbar, t, dilation_grid(cfg.q0, hbar, t)));
    out.classical_points.push_back({cfg.q0 * std::exp(t), cfg.p0 * std::exp(-t)});
  }

  // Dense autocorrelation on the t = 0 grid; only psi^0's support matters for
  // the overlap integrand, so the fixed small grid is exact.
  GridSpec grid0 = dilation_grid(cfg.q0, hbar, 0.0);
  Wavefunction psi0 = evolve_dilation(cfg.q0, cfg.p0, envelope, hbar, 0.0, grid0);
  for (int i = 0; i <= 2000; ++i) {
    double t = cfg.t_final * i / 2000.0;
    Wavefunction psi_t;
    psi_t.grid = grid0;
    psi_t.hbar = hbar;
    psi_t.amplitudes.resize(grid0.n);
    for (std::size_t j = 0; j < grid0.n; ++j)
      psi_t.amplitudes[j] = dilation_amplitude(cfg.q0, cfg.p0, envelope, hbar, t, grid0.point(j));
    out.dense_times.push_back(t);
    out.dense_autocorr.push_back(inner_product(psi0, psi_t));
    out.dense_norms.push_back(1.0);
  }
  return out;
}

ScenarioRun run_exact_reference_scenario(const ExperimentConfig& cfg) {
  if (cfg.scenario != Scenario::Harmonic && cfg.scenario != Scenario::Free)
    throw ConfigInvalid("propagator: exact propagation exists only for harmonic/free/dilation");
  ScenarioRun out;
  double hbar = cfg.hbar();
  auto evolve = [&](double t) {
    return cfg.scenario == Scenario::Harmonic
               ? evolve_exact_harmonic(cfg.propagator.omega, cfg.q0, cfg.p0, hbar, t, cfg.grid)
               : evolve_exact_free(cfg.q0, cfg.p0, hbar, t, cfg.grid);
  };

  auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-12));
  if (n_steps == 0) n_steps = 1;
  SystemSpec sys = scenario_system(cfg.scenario);
  Wavefunction psi0 = evolve(0.0);
  for (std::size_t step = 0; step <= n_steps; ++step) {
    double t = cfg.dt * static_cast<double>(step);
    Wavefunction psi_t = evolve(t);
    out.dense_times.push_back(t);
    out.dense_autocorr.push_back(inner_product(psi0, psi_t));
    out.dense_norms.push_back(norm(psi_t));
    bool snap = (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0) || step == n_steps;
    if (snap) {
      out.snapshot_times.push_back(t);
      out.snapshots.push_back(std::move(psi_t));
    }
  }
  auto traj = integrate_flow(sys, {cfg.q0, cfg.p0}, cfg.dt * static_cast<double>(n_steps), cfg.dt);
  for (std::size_t i = 0; i < out.snapshot_times.size(); ++i) {
    auto step = static_cast<std::size_t>(std::llround(out.snapshot_times[i] / cfg.dt));
    out.classical_points.push_back(traj.points[std::min(step, traj.points.size() - 1)]);
  }
  return out;
}

ScenarioRun run_split_scenario(const ExperimentConfig& cfg) {
  ScenarioRun out;
  PotentialSpec potential = scenario_potential(cfg.scenario);
  SystemSpec sys = scenario_system(cfg.scenario);
  Wavefunction psi0 = make_coherent_state(cfg.grid, cfg.hbar(), cfg.q0, cfg.p0);

  auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-12));
  if (n_steps == 0) n_steps = 1;
  auto record = evolve_split_operator(psi0, potential, cfg.dt, n_steps, cfg.snapshot_stride);

  auto traj = integrate_flow(sys, {cfg.q0, cfg.p0}, cfg.dt * static_cast<double>(n_steps), cfg.dt);
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    std::size_t step = record.snapshot_steps[i];
    out.snapshot_times.push_back(record.times[step]);
    out.snapshots.push_back(std::move(record.snapshots[i]));
    out.classical_points.push_back(traj.points[step]);
  }
  out.dense_times = std::move(record.times);
  out.dense_autocorr = std::move(record.autocorrelation);
  out.dense_norms = std::move(record.norms);
  return out;
}

std::pair<double, double> revival_window(const ExperimentConfig& cfg,
                                         const std::vector<double>& times) {
  double t_back = times.back();
  if (cfg.scenario == Scenario::DoubleWell) {
    double t_ehrenfest = ehrenfest_time(double_well_lambda(), cfg.hbar());
    double t_a = 0.5 * t_ehrenfest;
    double t_b = std::min(2.0 * t_ehrenfest, t_back);
    if (t_a < t_b) return {t_a, t_b};
  }
  return {std::min(times[1], t_back), t_back};
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
  if (name == "dilation") return Scenario::Dilation;
  if (name == "double-well") return Scenario::DoubleWell;
  if (name == "harmonic") return Scenario::Harmonic;
  if (name == "free") return Scenario::Free;
  throw ConfigInvalid("scenario: unknown value '" + name +
                      "' (expected dilation|double-well|harmonic|free)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Dilation: return "dilation";
    case Scenario::DoubleWell: return "double-well";
    case Scenario::Harmonic: return "harmonic";
    case Scenario::Free: return "free";
  }
  return "?";
}

DiagnosticKind diagnostic_from_name(const std::string& name) {
  if (name == "moments") return DiagnosticKind::Moments;
  if (name == "husimi") return DiagnosticKind::Husimi;
  if (name == "coherent-fit") return DiagnosticKind::CoherentFit;
  if (name == "egorov") return DiagnosticKind::Egorov;
  if (name == "revivals") return DiagnosticKind::Revivals;
  if (name == "tube-mass") return DiagnosticKind::TubeMass;
  if (name == "measurement-samples") return DiagnosticKind::MeasurementSamples;
  throw ConfigInvalid("diagnostics: unknown value '" + name + "'");
}

std::string diagnostic_name(DiagnosticKind d) {
  switch (d) {
    case DiagnosticKind::Moments: return "moments";
    case DiagnosticKind::Husimi: return "husimi";
    case DiagnosticKind::CoherentFit: return "coherent-fit";
    case DiagnosticKind::Egorov: return "egorov";
    case DiagnosticKind::Revivals: return "revivals";
    case DiagnosticKind::TubeMass: return "tube-mass";
    case DiagnosticKind::MeasurementSamples: return "measurement-samples";
  }
  return "?";
}

GridSpec preset_grid(Scenario scenario, double hbar) {
  switch (scenario) {
    case Scenario::DoubleWell:
      // n ~ 1/sqrt(hbar), anchored at n = 4096 for hbar = 1e-3, so the
      // sqrt(hbar) packet width stays equally resolved across sweeps.
      return GridSpec{-2.0, 2.0, std::max<std::size_t>(
                                     1024, next_pow2(4096.0 * std::sqrt(1e-3 / hbar)))};
    case Scenario::Harmonic:
      return GridSpec{-4.0, 4.0,
                      std::max<std::size_t>(2048, next_pow2(2048.0 * std::sqrt(1e-2 / hbar)))};
    case Scenario::Free:
      return GridSpec{-8.0, 8.0,
                      std::max<std::size_t>(4096, next_pow2(4096.0 * std::sqrt(1e-2 / hbar)))};
    case Scenario::Dilation:
      return GridSpec{-2.0, 2.0, 4096};  // per-time adaptive grids are derived in the run
  }
  return GridSpec{};
}

double preset_t_final(Scenario scenario, double hbar) {
  switch (scenario) {
    case Scenario::Dilation: return std::log(1.0 / hbar);
    case Scenario::DoubleWell: return 2.0 * ehrenfest_time(double_well_lambda(), hbar);
    case Scenario::Harmonic: return 2.0 * std::numbers::pi;
    case Scenario::Free: return 2.0;
  }
  return 1.0;
}

void apply_presets(ExperimentConfig& config) {
  if (config.hbar_values.empty()) throw ConfigInvalid("hbar: need at least one value");
  for (double h : config.hbar_values)
    if (!(h > 0.0)) throw ConfigInvalid("hbar: values must be positive");
  if (!config.grid_explicit) config.grid = preset_grid(config.scenario, config.hbar());
  config.grid.validate();
  if (config.t_final < 0.0) config.t_final = preset_t_final(config.scenario, config.hbar());
  if (!(config.t_final > 0.0)) throw ConfigInvalid("t_final: must be positive");
  if (!(config.dt > 0.0)) throw ConfigInvalid("dt: must be positive");
  if (!config.start_explicit) {
    auto start = preset_start(config.scenario);
    config.q0 = start.q;
    config.p0 = start.p;
  }
  if (config.scenario == Scenario::Dilation)
    config.propagator = PropagatorSpec::exact_dilation();
  else if (config.propagator.kind == PropagatorSpec::Kind::SplitOperator)
    config.propagator = PropagatorSpec::split_operator(config.dt);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigInvalid("config: top level must be a JSON object");

  static const std::set<std::string> known{
      "scenario", "hbar", "grid", "dt", "t_final", "snapshot_stride", "seed",
      "sample_count", "write_snapshots", "out", "diagnostics", "q0", "p0", "propagator"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (known.find(it.key()) == known.end())
      throw ConfigInvalid("config: unknown field '" + it.key() + "'");

  ExperimentConfig cfg;
  try {
    if (!doc.contains("scenario")) throw ConfigInvalid("scenario: required");
    cfg.scenario = scenario_from_name(doc["scenario"].get<std::string>());

    if (doc.contains("hbar")) {
      cfg.hbar_values.clear();
      if (doc["hbar"].is_array())
        for (const auto& v : doc["hbar"]) cfg.hbar_values.push_back(v.get<double>());
      else
        cfg.hbar_values.push_back(doc["hbar"].get<double>());
    } else {
      cfg.hbar_values = {cfg.scenario == Scenario::Harmonic || cfg.scenario == Scenario::Free
                             ? 1e-2
                             : 1e-3};
    }

    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      if (!g.is_object() || !g.contains("x_min") || !g.contains("x_max") || !g.contains("n"))
        throw ConfigInvalid("grid: need an object with x_min, x_max, n");
      cfg.grid.x_min = g["x_min"].get<double>();
      cfg.grid.x_max = g["x_max"].get<double>();
      cfg.grid.n = g["n"].get<std::size_t>();
      cfg.grid_explicit = true;
      try {
        cfg.grid.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(std::string("grid: ") + e.what());
      }
    }

    if (doc.contains("dt")) cfg.dt = doc["dt"].get<double>();
    if (doc.contains("t_final")) cfg.t_final = doc["t_final"].get<double>();
    if (doc.contains("snapshot_stride")) cfg.snapshot_stride = doc["snapshot_stride"].get<std::size_t>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("sample_count")) cfg.sample_count = doc["sample_count"].get<std::size_t>();
    if (doc.contains("write_snapshots")) cfg.write_snapshots = doc["write_snapshots"].get<bool>();
    if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();
    if (doc.contains("diagnostics")) {
      cfg.diagnostics.clear();
      for (const auto& d : doc["diagnostics"])
        cfg.diagnostics.insert(diagnostic_from_name(d.get<std::string>()));
    }
    if (doc.contains("q0") || doc.contains("p0")) {
      cfg.start_explicit = true;
      if (doc.contains("q0")) cfg.q0 = doc["q0"].get<double>();
      if (doc.contains("p0")) cfg.p0 = doc["p0"].get<double>();
    }
    if (doc.contains("propagator")) {
      std::string prop = doc["propagator"].get<std::string>();
      if (prop == "split")
        cfg.propagator = PropagatorSpec::split_operator(cfg.dt);
      else if (prop == "exact")
        switch (cfg.scenario) {
          case Scenario::Dilation: cfg.propagator = PropagatorSpec::exact_dilation(); break;
          case Scenario::Harmonic: cfg.propagator = PropagatorSpec::exact_harmonic(1.0); break;
          case Scenario::Free: cfg.propagator = PropagatorSpec::exact_free(); break;
          case Scenario::DoubleWell:
            throw ConfigInvalid("propagator: the double well has no exact propagator");
        }
      else
        throw ConfigInvalid("propagator: expected 'split' or 'exact', got '" + prop + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("config: ") + e.what());
  }

  apply_presets(cfg);
  return cfg;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["scenario"] = scenario_name(scenario);
  if (hbar_values.size() == 1)
    j["hbar"] = hbar_values.front();
  else
    j["hbar"] = hbar_values;
  j["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n", grid.n}};
  j["dt"] = dt;
  j["t_final"] = t_final;
  j["snapshot_stride"] = snapshot_stride;
  j["seed"] = seed;
  j["sample_count"] = sample_count;
  j["write_snapshots"] = write_snapshots;
  j["out"] = out_dir.string();
  std::vector<std::string> diag_names;
  for (auto d : diagnostics) diag_names.push_back(diagnostic_name(d));
  j["diagnostics"] = diag_names;
  j["q0"] = q0;
  j["p0"] = p0;
  j["propagator"] =
      propagator.kind == PropagatorSpec::Kind::SplitOperator ? "split" : "exact";
  return j.dump(2);
}

std::vector<ValidationIssue> validate(const ExperimentConfig& config) {
  std::vector<ValidationIssue> issues;
  for (double hbar : config.hbar_values) {
    GridSpec grid = config.grid_explicit ? config.grid : preset_grid(config.scenario, hbar);
    double sh = std::sqrt(hbar);

    if (config.scenario != Scenario::Dilation) {
      double sf = stability_factor(scenario_potential(config.scenario), grid, hbar, config.dt);
      if (sf > 0.5)
        issues.push_back({false, "stability: dt * (max|V| + p_nyquist^2/2) = " + format_double(sf) +
                                     " > 0.5 at hbar=" + format_double(hbar) +
                                     "; accuracy will degrade (halve dt)"});
      double margin = 10.0 * sh;
      if (config.q0 - grid.x_min < margin || grid.x_max - config.q0 < margin)
        issues.push_back({true, "containment: start q0=" + format_double(config.q0) +
                                    " is within 10*sqrt(hbar) of the grid boundary [" +
                                    format_double(grid.x_min) + ", " + format_double(grid.x_max) +
                                    "] at hbar=" + format_double(hbar)});
      double band = grid.nyquist_momentum(hbar);
      if (std::abs(config.p0) + 10.0 * sh > band)
        issues.push_back({true, "momentum band: |p0| + 10*sqrt(hbar) = " +
                                    format_double(std::abs(config.p0) + 10.0 * sh) +
                                    " exceeds the Nyquist momentum " + format_double(band) +
                                    " at hbar=" + format_double(hbar)});
    }
  }
  if (config.diagnostics.count(DiagnosticKind::TubeMass) != 0 &&
      config.scenario != Scenario::DoubleWell)
    issues.push_back({true, "diagnostics: tube-mass needs the double-well separatrix"});
  if (config.diagnostics.count(DiagnosticKind::Egorov) != 0 &&
      config.scenario == Scenario::Dilation)
    issues.push_back({true, "diagnostics: egorov needs a potential-type scenario"});
  return issues;
}

std::string RunManifest::to_json_text() const {
  json j;
  j["config"] = json::parse(config_echo);
  j["artifacts"] = artifacts;
  j["summary"] = summary;
  j["duration_seconds"] = duration_seconds;
  j["version"] = version;
  return j.dump(2);
}

RunManifest run(const ExperimentConfig& config_in) {
  auto wall_start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = config_in;
  apply_presets(cfg);
  if (cfg.hbar_values.size() != 1)
    throw ConfigInvalid("hbar: run takes a single value; use sweep for lists");
  if (cfg.out_dir.empty()) throw ConfigInvalid("out: output directory required");
  std::filesystem::create_directories(cfg.out_dir);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config_echo = cfg.to_json_text();

  ScenarioRun sr;
  switch (cfg.propagator.kind) {
    case PropagatorSpec::Kind::ExactDilation: sr = run_dilation_scenario(cfg); break;
    case PropagatorSpec::Kind::ExactHarmonic:
    case PropagatorSpec::Kind::ExactFree: sr = run_exact_reference_scenario(cfg); break;
    case PropagatorSpec::Kind::SplitOperator: sr = run_split_scenario(cfg); break;
  }

  // Dense evolution record is always exported; it is the raw material for
  // revival curves.
  {
    auto out = open_artifact(manifest, cfg.out_dir, "evolution.csv");
    out << "t,norm,re_autocorr,im_autocorr\n";
    for (std::size_t i = 0; i < sr.dense_times.size(); ++i)
      out << format_double(sr.dense_times[i]) << ',' << format_double(sr.dense_norms[i]) << ','
          << format_double(sr.dense_autocorr[i].real()) << ','
          << format_double(sr.dense_autocorr[i].imag()) << "\n";
  }
  if (cfg.write_snapshots) {
    for (std::size_t i = 0; i < sr.snapshots.size(); ++i) {
      std::string name = "snap_" + std::to_string(i) + ".csv";
      save_wavefunction(cfg.out_dir / name, sr.snapshots[i]);
      manifest.artifacts.push_back(name);
    }
  }

  const Wavefunction& final_state = sr.snapshots.back();

  if (cfg.diagnostics.count(DiagnosticKind::Moments) != 0) {
    auto out = open_artifact(manifest, cfg.out_dir, "moments.csv");
    out << "t,norm,qmean,pmean,dq,dp,product\n";
    Moments m_final;
    for (std::size_t i = 0; i < sr.snapshots.size(); ++i) {
      Moments m = moments(sr.snapshots[i]);
      write_moments_row(out, sr.snapshot_times[i], norm(sr.snapshots[i]), m);
      if (i + 1 == sr.snapshots.size()) m_final = m;
    }
    manifest.summary["final_delta_q"] = m_final.delta_q;
    manifest.summary["final_delta_p"] = m_final.delta_p;
    manifest.summary["final_uncertainty_product"] = m_final.uncertainty_product;
  }

  if (cfg.diagnostics.count(DiagnosticKind::Husimi) != 0) {
    auto field = state_husimi(final_state);
    auto out = open_artifact(manifest, cfg.out_dir, "husimi.csv");
    write_husimi_csv(out, field);
    manifest.summary["husimi_total_mass"] = field.total_mass();
  }

  if (cfg.diagnostics.count(DiagnosticKind::CoherentFit) != 0) {
    auto out = open_artifact(manifest, cfg.out_dir, "coherent_fit.csv");
    out << "t,q,p,re_w,im_w,overlap,residual\n";
    double final_residual = 0.0;
    for (std::size_t i = 0; i < sr.snapshots.size(); ++i) {
      CoherentFit fit = coherent_fit(sr.snapshots[i], sr.classical_points[i]);
      out << format_double(sr.snapshot_times[i]) << ',' << format_double(fit.center.q) << ','
          << format_double(fit.center.p) << ',' << format_double(fit.width.real()) << ','
          << format_double(fit.width.imag()) << ',' << format_double(fit.overlap) << ','
          << format_double(fit.residual) << "\n";
      final_residual = fit.residual;
    }
    manifest.summary["coherent_fit_final_residual"] = final_residual;
  }

  if (cfg.diagnostics.count(DiagnosticKind::Egorov) != 0) {
    if (cfg.scenario == Scenario::Dilation)
      throw ConfigInvalid("diagnostics: egorov needs a potential-type scenario");
    auto out = open_artifact(manifest, cfg.out_dir, "egorov.csv");
    out << "t,q_classical,q_quantum,error\n";
    double final_error = 0.0;
    for (std::size_t i = 0; i < sr.snapshots.size(); ++i) {
      double qq = expectation_diffop(sr.snapshots[i], {{0.0, 1.0}}).real();
      double qc = sr.classical_points[i].q;
      final_error = std::abs(qq - qc);
      out << format_double(sr.snapshot_times[i]) << ',' << format_double(qc) << ','
          << format_double(qq) << ',' << format_double(final_error) << "\n";
    }
    manifest.summary["egorov_final_error"] = final_error;
  }

  if (cfg.diagnostics.count(DiagnosticKind::Revivals) != 0) {
    EvolutionRecord pseudo;
    pseudo.times = sr.dense_times;
    pseudo.norms = sr.dense_norms;
    pseudo.autocorrelation = sr.dense_autocorr;
    auto [t_a, t_b] = revival_window(cfg, sr.dense_times);
    RevivalResult r = revival_detector(pseudo, t_a, t_b);
    auto out = open_artifact(manifest, cfg.out_dir, "revivals.json");
    out << revival_json(r, t_a, t_b).dump(2) << "\n";
    manifest.summary["revival_baseline"] = r.baseline;
    if (r.peak_time) {
      manifest.summary["revival_peak_time"] = *r.peak_time;
      manifest.summary["revival_peak_height"] = r.peak_height;
    }
  }

  if (cfg.diagnostics.count(DiagnosticKind::TubeMass) != 0) {
    if (cfg.scenario != Scenario::DoubleWell)
      throw ConfigInvalid("diagnostics: tube-mass needs the double-well separatrix");
    double radius = 5.0 * std::sqrt(cfg.hbar());
    SystemSpec sys = SystemSpec::double_well();
    SeparatrixCurve manifold = separatrix(sys, 0.0, 2001);
    SeparatrixCurve off_manifold = separatrix(sys, 0.2, 2001);
    // Reported per sign branch as well: "half of the curve" has no preferred
    // half, so both are measured instead of asserting one.
    SeparatrixCurve upper = manifold, lower = manifold;
    upper.lower.clear();
    lower.upper.clear();
    auto on = localization_metrics(final_state, &manifold, radius);
    auto on_upper = localization_metrics(final_state, &upper, radius);
    auto on_lower = localization_metrics(final_state, &lower, radius);
    auto off = localization_metrics(final_state, &off_manifold, radius);
    auto out = open_artifact(manifest, cfg.out_dir, "tube_mass.csv");
    out << "t,mass_separatrix,mass_upper_branch,mass_lower_branch,mass_offset_curve\n";
    out << format_double(sr.snapshot_times.back()) << ',' << format_double(*on.tube_mass) << ','
        << format_double(*on_upper.tube_mass) << ',' << format_double(*on_lower.tube_mass) << ','
        << format_double(*off.tube_mass) << "\n";
    manifest.summary["tube_mass_separatrix"] = *on.tube_mass;
    manifest.summary["tube_mass_upper_branch"] = *on_upper.tube_mass;
    manifest.summary["tube_mass_lower_branch"] = *on_lower.tube_mass;
    manifest.summary["tube_mass_offset_curve"] = *off.tube_mass;
  }

  if (cfg.diagnostics.count(DiagnosticKind::MeasurementSamples) != 0) {
    auto samples = sample_positions(final_state, cfg.seed, cfg.sample_count);
    auto out = open_artifact(manifest, cfg.out_dir, "samples.csv");
    out << "sample\n";
    for (double s : samples) out << format_double(s) << "\n";
    write_measurement_json(manifest, cfg.out_dir, final_state);
  }

  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  {
    std::ofstream out(cfg.out_dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.to_json_text() << "\n";
  }
  return manifest;
}

RunManifest sweep(const ExperimentConfig& config_in) {
  auto wall_start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = config_in;
  apply_presets(cfg);
  if (cfg.hbar_values.size() < 3)
    throw ConfigInvalid("hbar: sweep needs at least 3 values (got " +
                        std::to_string(cfg.hbar_values.size()) + ")");
  {
    auto [lo, hi] = std::minmax_element(cfg.hbar_values.begin(), cfg.hbar_values.end());
    if (*hi / *lo < 100.0 * (1.0 - 1e-9))
      throw ConfigInvalid("hbar: sweep values must span at least 2 decades");
  }
  if (cfg.out_dir.empty()) throw ConfigInvalid("out: output directory required");

  std::vector<DiagnosticKind> sweepable;
  for (auto d : cfg.diagnostics)
    if (d == DiagnosticKind::CoherentFit || d == DiagnosticKind::Egorov ||
        d == DiagnosticKind::Moments)
      sweepable.push_back(d);
  if (sweepable.size() != 1)
    throw ConfigInvalid(
        "diagnostics: sweep needs exactly one of coherent-fit, egorov, moments");
  DiagnosticKind kind = sweepable.front();

  if (kind == DiagnosticKind::Moments && cfg.scenario != Scenario::Dilation)
    throw ConfigInvalid("diagnostics: the moments sweep tracks the dilation profile width");
  if (kind != DiagnosticKind::Moments && cfg.scenario == Scenario::Dilation)
    throw ConfigInvalid("diagnostics: coherent-fit/egorov sweeps need a potential-type scenario");

  // Sweeps compare a fixed physical time across hbar; the preset t_final is
  // hbar-dependent, so default to t = 1 unless the config pinned one.
  double t_fixed = config_in.t_final >= 0.0 ? config_in.t_final : 1.0;

  auto diagnostic = [&](double hbar) -> double {
    GridSpec grid = cfg.grid_explicit ? cfg.grid : preset_grid(cfg.scenario, hbar);
    switch (kind) {
      case DiagnosticKind::Moments: {
        double t_half = 0.5 * std::log(1.0 / hbar);
        auto psi = evolve_dilation(cfg.q0, cfg.p0, EnvelopeSpec::standard_gaussian(), hbar, t_half,
                                   dilation_grid(cfg.q0, hbar, t_half));
        return moments(psi).delta_q;
      }
      case DiagnosticKind::Egorov:
        return egorov_error(scenario_potential(cfg.scenario), {0.0, 1.0}, {cfg.q0, cfg.p0},
                            t_fixed, hbar, cfg.dt, grid);
      default: {
        auto psi0 = make_coherent_state(grid, hbar, cfg.q0, cfg.p0);
        auto n_steps = static_cast<std::size_t>(std::ceil(t_fixed / cfg.dt - 1e-12));
        double h = t_fixed / static_cast<double>(n_steps);
        auto record =
            evolve_split_operator(psi0, scenario_potential(cfg.scenario), h, n_steps, 0);
        auto guess = integrate_flow(scenario_system(cfg.scenario), {cfg.q0, cfg.p0}, t_fixed,
                                    std::min(cfg.dt, t_fixed))
                         .final_point();
        return coherent_fit(record.final_state(), guess).residual;
      }
    }
  };

  ScalingReport report = hbar_sweep(cfg.hbar_values, diagnostic);

  std::filesystem::create_directories(cfg.out_dir);
  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config_echo = cfg.to_json_text();

  std::string base = "scaling_" + diagnostic_name(kind);
  {
    auto out = open_artifact(manifest, cfg.out_dir, base + ".csv");
    out << "hbar,value\n";
    for (std::size_t i = 0; i < report.hbar_values.size(); ++i)
      out << format_double(report.hbar_values[i]) << ','
          << format_double(report.diagnostic_values[i]) << "\n";
  }
  {
    json j;
    j["exponent"] = report.exponent;
    j["residual"] = report.fit_residual;
    auto out = open_artifact(manifest, cfg.out_dir, base + ".json");
    out << j.dump(2) << "\n";
  }
  manifest.summary["exponent"] = report.exponent;
  manifest.summary["residual"] = report.fit_residual;

  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  {
    std::ofstream out(cfg.out_dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.to_json_text() << "\n";
  }
  return manifest;
}

}  // namespace ehrenfest
