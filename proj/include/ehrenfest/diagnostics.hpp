#ifndef EHRENFEST_DIAGNOSTICS_HPP
#define EHRENFEST_DIAGNOSTICS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "ehrenfest/classical.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/husimi.hpp"
#include "ehrenfest/propagators.hpp"
#include "ehrenfest/wavefunction.hpp"

namespace ehrenfest {

// Best Gaussian-with-complex-width description of a state: the center, the
// squeezing parameter w (Re w > 0), the achieved overlap modulus and the
// residual sqrt(1 - overlap^2). Overlap moduli make the result invariant
// under global phases, so no phase ever needs to be tracked.
struct CoherentFit {
  PhaseSpacePoint center;
  std::complex<double> width{1.0, 0.0};
  double overlap = 0.0;
  double residual = 1.0;
};

// Thrown when coordinate descent stops improving while the overlap gradient
// is still large; carries the best fit found so far.
struct OptimizerStalled : SimulationError {
  OptimizerStalled(const std::string& what, CoherentFit best_so_far)
      : SimulationError("OptimizerStalled", what), best(best_so_far) {}
  CoherentFit best;
};

// Maximizes |<psi^w_{qp}, psi>| over (q, p, w) by coordinate descent (golden
// section line searches), seeded at the Husimi maximum near `guess`. The
// guess must lie within the Husimi support of psi.
CoherentFit coherent_fit(const Wavefunction& psi, PhaseSpacePoint guess);

// Overlap modulus against a single explicit member of the Gaussian family
// (exposed for tests and for the fit itself).
double gaussian_family_overlap(const Wavefunction& psi, double q, double p,
                               std::complex<double> width);

struct LocalizationMetrics {
  double delta_q = 0.0;
  double inverse_participation_ratio = 0.0;       // (sum |psi|^4 dx)^-1, a length
  std::optional<double> tube_mass;                // only when a curve is given
};

// Delta-Q, inverse participation ratio, and (when a curve is given) the
// Husimi mass within `tube_radius` of the curve, computed on an automatic
// lattice with spacing ~ sqrt(hbar)/3 covering the tube.
LocalizationMetrics localization_metrics(const Wavefunction& psi, const SeparatrixCurve* curve,
                                         double tube_radius);

// |<psi^t, f(Q) psi^t> - f(q_classical(t))| with psi^t the split-operator
// evolution of the coherent state at `start` and q_classical the Verlet flow
// on the same time grid. f is a real polynomial in q.
double egorov_error(const PotentialSpec& potential, const std::vector<double>& f_coefficients,
                    PhaseSpacePoint start, double t, double hbar, double dt, const GridSpec& grid);

struct RevivalResult {
  std::optional<double> peak_time;  // none when no qualifying maximum exists
  double peak_height = 0.0;
  double baseline = 0.0;            // median |autocorrelation| over the window
};

// Scans |autocorrelation| inside [t_a, t_b] for the largest strict local
// maximum exceeding baseline + 0.1 (ties resolved to the earliest time).
// Endpoint samples never qualify, so monotone records report none. Throws
// WindowOutOfRange when the window leaves the record.
RevivalResult revival_detector(const EvolutionRecord& record, double t_a, double t_b);

// Log-log power-law fit of a diagnostic against hbar.
struct ScalingReport {
  std::vector<double> hbar_values;       // sorted decreasing
  std::vector<double> diagnostic_values; // positive, paired with hbar_values
  double exponent = 0.0;                 // least-squares slope of log v vs log hbar
  double fit_residual = 0.0;             // rms residual of the fit
};

// Runs `diagnostic` once per hbar (independently; OpenMP spreads the runs
// over threads), then fits log(value) against log(hbar). Needs >= 3 values
// spanning >= 2 decades. Per-run failures are rethrown annotated with the
// offending hbar.
ScalingReport hbar_sweep(std::vector<double> hbar_values,
                         const std::function<double(double)>& diagnostic);

// The log(1/hbar)/lambda time scale on which a sqrt(hbar) packet reaches
// classical size under a hyperbolic exponent lambda.
inline double ehrenfest_time(double lambda, double hbar) { return std::log(1.0 / hbar) / lambda; }

}  // namespace ehrenfest

#endif  // EHRENFEST_DIAGNOSTICS_HPP
