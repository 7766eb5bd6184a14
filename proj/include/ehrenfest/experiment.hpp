#ifndef EHRENFEST_EXPERIMENT_HPP
#define EHRENFEST_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ehrenfest/grid.hpp"
#include "ehrenfest/propagators.hpp"

namespace ehrenfest {

enum class Scenario { Dilation, DoubleWell, Harmonic, Free };

enum class DiagnosticKind {
  Moments,
  Husimi,
  CoherentFit,
  Egorov,
  Revivals,
  TubeMass,
  MeasurementSamples,
};

Scenario scenario_from_name(const std::string& name);          // throws ConfigInvalid
std::string scenario_name(Scenario s);
DiagnosticKind diagnostic_from_name(const std::string& name);  // throws ConfigInvalid
std::string diagnostic_name(DiagnosticKind d);

// A fully resolved experiment description. Fields left unset in the JSON are
// filled by scenario presets (which encode the n ~ 1/sqrt(hbar) grid rule so
// hbar sweeps never under-resolve the wave packet).
struct ExperimentConfig {
  Scenario scenario = Scenario::DoubleWell;
  std::vector<double> hbar_values{1e-3};  // one entry for run, >= 3 for sweep
  GridSpec grid;
  bool grid_explicit = false;
  double dt = 1e-3;
  double t_final = -1.0;  // < 0 means "use the scenario preset"
  std::size_t snapshot_stride = 100;
  std::uint64_t seed = 42;
  std::size_t sample_count = 100000;
  bool write_snapshots = false;
  std::filesystem::path out_dir;
  std::set<DiagnosticKind> diagnostics{DiagnosticKind::Moments};
  double q0 = 0.0, p0 = 0.0;
  bool start_explicit = false;
  // split (default for potential scenarios) or the matching exact propagator;
  // the dilation scenario always evolves by its closed form.
  PropagatorSpec propagator = PropagatorSpec::split_operator(1e-3);

  double hbar() const { return hbar_values.front(); }

  // Parses the JSON document (and applies presets). Throws ConfigInvalid with
  // a field-level message on any problem.
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

// Preset grid/time/start values for a scenario at a given hbar.
GridSpec preset_grid(Scenario scenario, double hbar);
double preset_t_final(Scenario scenario, double hbar);
void apply_presets(ExperimentConfig& config);

struct ValidationIssue {
  bool is_error = false;  // errors would make a run meaningless, warnings cost accuracy
  std::string message;
};

// Static checks without running: split-operator stability heuristic, grid
// containment of the initial packet, Nyquist band. Never throws on a
// parseable config.
std::vector<ValidationIssue> validate(const ExperimentConfig& config);

struct RunManifest {
  std::string config_echo;                     // resolved config as JSON text
  std::vector<std::string> artifacts;          // files written, relative to out_dir
  std::map<std::string, double> summary;       // per-diagnostic scalars
  double duration_seconds = 0.0;
  std::string version;

  std::string to_json_text() const;
};

// Executes a single-hbar scenario, writes every requested diagnostic file
// into config.out_dir and finally manifest.json (manifest presence implies a
// completed run). Fully deterministic given (config, seed).
RunManifest run(const ExperimentConfig& config);

// Runs the experiment once per hbar (>= 3 values), fits the selected
// diagnostic against hbar and writes scaling_<diagnostic>.{csv,json} plus the
// manifest. The diagnostics set must contain exactly one sweepable
// diagnostic: coherent-fit, egorov, or moments (moments sweeps the
// delocalized-profile width at t = log(1/hbar)/2, dilation only).
RunManifest sweep(const ExperimentConfig& config);

}  // namespace ehrenfest

#endif  // EHRENFEST_EXPERIMENT_HPP
