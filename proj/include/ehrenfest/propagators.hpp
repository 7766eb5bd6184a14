#ifndef EHRENFEST_PROPAGATORS_HPP
#define EHRENFEST_PROPAGATORS_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "ehrenfest/phase_space.hpp"
#include "ehrenfest/wavefunction.hpp"

namespace ehrenfest {

// Which time-evolution backend an experiment uses.
struct PropagatorSpec {
  enum class Kind { SplitOperator, ExactDilation, ExactHarmonic, ExactFree };

  static PropagatorSpec split_operator(double dt);
  static PropagatorSpec exact_dilation() { return {Kind::ExactDilation, 0.0, 1.0}; }
  static PropagatorSpec exact_harmonic(double omega);
  static PropagatorSpec exact_free() { return {Kind::ExactFree, 0.0, 1.0}; }

  Kind kind = Kind::SplitOperator;
  double dt = 1e-3;
  double omega = 1.0;
};

// Time-evolution record. times/norms/autocorrelation are dense (one entry per
// integrator step, starting at t = 0); snapshots are kept every
// snapshot_stride steps plus the initial and final states, with
// snapshot_steps giving each snapshot's index into the dense sequences.
struct EvolutionRecord {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<std::complex<double>> autocorrelation;  // <psi^0, psi^t>
  std::vector<Wavefunction> snapshots;
  std::vector<std::size_t> snapshot_steps;

  const Wavefunction& final_state() const { return snapshots.back(); }
};

// Strang-split spectral propagator for H = -hbar^2/2 d^2/dx^2 + V(x):
// half potential phase, full kinetic phase in the Fourier basis (momenta
// hbar*k), half potential phase. Norm is conserved to roundoff per step.
// Throws MassEscape when a snapshot's boundary mass exceeds 1e-4 and
// NonFiniteState on overflow. Accuracy (not stability) degrades when
// stability_factor(...) > 0.5; validate() reports that before a run.
EvolutionRecord evolve_split_operator(const Wavefunction& psi0, const PotentialSpec& potential,
                                      double dt, std::size_t n_steps, std::size_t snapshot_stride);

// Exact dilation evolution psi^t(x) = e^{-t/2} psi^0(e^{-t} x) of the
// coherent state with the given envelope, evaluated analytically at time t
// and sampled on `grid` (states near t ~ log(1/hbar) stay representable
// because nothing is propagated on a grid). Throws MassEscape if the dilated
// state no longer fits the requested grid.
Wavefunction evolve_dilation(double q0, double p0, const EnvelopeSpec& envelope, double hbar,
                             double t, const GridSpec& grid);

// Pointwise value of the dilated state at position x (what evolve_dilation
// samples); lets overlap integrals be taken on any grid without containment
// requirements on the full dilated state.
std::complex<double> dilation_amplitude(double q0, double p0, const EnvelopeSpec& envelope,
                                        double hbar, double t, double x);

// Closed-form evolved standard coherent states, used both as features and as
// split-operator oracles. Harmonic: center rotates with frequency omega and
// the complex width follows the exact Gaussian (Riccati) evolution including
// the global phase. Free: center (q0 + p0 t, p0), complex width hbar(1 + it).
Wavefunction evolve_exact_harmonic(double omega, double q0, double p0, double hbar, double t,
                                   const GridSpec& grid);
Wavefunction evolve_exact_free(double q0, double p0, double hbar, double t, const GridSpec& grid);

// dt * (max|V| on the grid + p_Nyquist^2/2): phase advance per step of the
// fastest representable mode. Heuristic; > 0.5 costs accuracy, never
// stability.
double stability_factor(const PotentialSpec& potential, const GridSpec& grid, double hbar, double dt);

}  // namespace ehrenfest

#endif  // EHRENFEST_PROPAGATORS_HPP
