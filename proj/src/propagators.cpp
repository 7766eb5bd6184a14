#include "ehrenfest/propagators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ehrenfest/detail/kahan.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/fft.hpp"
#include "ehrenfest/text.hpp"

namespace ehrenfest {

namespace {
constexpr double kEscapeThreshold = 1e-4;

std::complex<double> phase(double theta) { return {std::cos(theta), std::sin(theta)}; }
}  // namespace

PropagatorSpec PropagatorSpec::split_operator(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("PropagatorSpec: dt must be positive");
  return {Kind::SplitOperator, dt, 1.0};
}

PropagatorSpec PropagatorSpec::exact_harmonic(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("PropagatorSpec: omega must be positive");
  return {Kind::ExactHarmonic, 0.0, omega};
}

EvolutionRecord evolve_split_operator(const Wavefunction& psi0, const PotentialSpec& potential,
                                      double dt, std::size_t n_steps, std::size_t snapshot_stride) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_split_operator: dt must be positive");
  if (n_steps == 0) throw std::invalid_argument("evolve_split_operator: need n_steps >= 1");

  const std::size_t n = psi0.grid.n;
  const double hbar = psi0.hbar;

  // Diagonal propagator factors: each is a pure phase, so the grid norm is
  // conserved by construction.
  std::vector<std::complex<double>> half_potential(n), kinetic(n);
  for (std::size_t j = 0; j < n; ++j)
    half_potential[j] = phase(-potential.value(psi0.grid.point(j)) * dt / (2.0 * hbar));
  for (std::size_t m = 0; m < n; ++m) {
    double k = psi0.grid.wavenumber(m);
    kinetic[m] = phase(-0.5 * hbar * k * k * dt);
  }

  Fft fft(n);
  Wavefunction psi = psi0;

  EvolutionRecord record;
  record.times.reserve(n_steps + 1);
  record.norms.reserve(n_steps + 1);
  record.autocorrelation.reserve(n_steps + 1);
  record.times.push_back(0.0);
  record.norms.push_back(norm(psi));
  record.autocorrelation.push_back(inner_product(psi0, psi));
  record.snapshots.push_back(psi);
  record.snapshot_steps.push_back(0);

  auto take_snapshot = [&](std::size_t step) {
    double edge = boundary_mass(psi);
    if (edge > kEscapeThreshold)
      throw MassEscape("evolve_split_operator: boundary mass " + format_double(edge) +
                       " > 1e-4 at t = " + format_double(record.times[step]));
    record.snapshots.push_back(psi);
    record.snapshot_steps.push_back(step);
  };

  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t j = 0; j < n; ++j) psi.amplitudes[j] *= half_potential[j];
    fft.forward(psi.amplitudes);
    for (std::size_t m = 0; m < n; ++m) psi.amplitudes[m] *= kinetic[m];
    fft.inverse(psi.amplitudes);
    for (std::size_t j = 0; j < n; ++j) psi.amplitudes[j] *= half_potential[j];

    double nrm = norm(psi);
    if (!std::isfinite(nrm))
      throw NonFiniteState("evolve_split_operator: non-finite state at step " + std::to_string(step));
    record.times.push_back(dt * static_cast<double>(step));
    record.norms.push_back(nrm);
    record.autocorrelation.push_back(inner_product(psi0, psi));

    bool at_stride = snapshot_stride > 0 && step % snapshot_stride == 0;
    if (at_stride || step == n_steps) take_snapshot(step);
  }
  return record;
}

std::complex<double> dilation_amplitude(double q0, double p0, const EnvelopeSpec& envelope,
                                        double hbar, double t, double x) {
  // e^{-t/2} psi^0(e^{-t} x) with psi^0 the coherent state at (q0, p0):
  // exact at any t, no time stepping involved.
  double y = std::exp(-t) * x;
  double amp = std::exp(-0.5 * t) * std::pow(hbar, -0.25);
  return amp * envelope.evaluate((y - q0) / std::sqrt(hbar)) * phase(p0 * y / hbar);
}

Wavefunction evolve_dilation(double q0, double p0, const EnvelopeSpec& envelope, double hbar,
                             double t, const GridSpec& grid) {
  grid.validate();
  if (!(hbar > 0.0)) throw std::invalid_argument("evolve_dilation: hbar must be positive");

  Wavefunction psi;
  psi.grid = grid;
  psi.hbar = hbar;
  psi.amplitudes.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    psi.amplitudes[j] = dilation_amplitude(q0, p0, envelope, hbar, t, grid.point(j));

  double edge = boundary_mass(psi);
  if (!(edge < 1e-8))
    throw MassEscape("evolve_dilation: dilated state no longer fits the grid (boundary mass " +
                     format_double(edge) + ")");
  return psi;
}

Wavefunction evolve_exact_harmonic(double omega, double q0, double p0, double hbar, double t,
                                   const GridSpec& grid) {
  grid.validate();
  if (!(omega > 0.0)) throw std::invalid_argument("evolve_exact_harmonic: omega must be positive");

  using namespace std::complex_literals;
  double u = omega * t;
  double c = std::cos(u), s = std::sin(u);

  double qt = q0 * c + (p0 / omega) * s;
  double pt = p0 * c - q0 * omega * s;

  // Gaussian width parameter from the Riccati evolution with a(0) = i; its
  // imaginary part stays positive for every t.
  double denom = omega * omega * c * c + s * s;
  std::complex<double> a_t = omega * (c * s * (1.0 - omega * omega) + 1i * omega) / denom;

  // Amplitude (omega / F)^{1/2}, F = omega cos + i sin, with the argument
  // unwrapped continuously in t so the square root never jumps branches.
  double theta = u + std::remainder(std::atan2(s, omega * c) - u, 2.0 * std::numbers::pi);
  double mag = std::sqrt(omega / std::hypot(omega * c, s));
  std::complex<double> amplitude = mag * phase(-0.5 * theta);

  // Action integral of p^2/2 - omega^2 q^2 / 2 along the classical arc.
  double action = (p0 * p0 - omega * omega * q0 * q0) * std::sin(2.0 * u) / (4.0 * omega) -
                  p0 * q0 * (1.0 - std::cos(2.0 * u)) / 2.0;
  double phi = p0 * q0 + action;

  double prefactor = std::pow(std::numbers::pi * hbar, -0.25);
  Wavefunction psi;
  psi.grid = grid;
  psi.hbar = hbar;
  psi.amplitudes.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double d = grid.point(j) - qt;
    std::complex<double> exponent = (1i / hbar) * (0.5 * a_t * d * d + pt * d + phi);
    psi.amplitudes[j] = prefactor * amplitude * std::exp(exponent);
  }
  return psi;
}

Wavefunction evolve_exact_free(double q0, double p0, double hbar, double t, const GridSpec& grid) {
  grid.validate();
  using namespace std::complex_literals;

  std::complex<double> width = 1.0 + 1i * t;  // complex width hbar * (1 + i t)
  std::complex<double> amplitude = std::pow(std::numbers::pi * hbar, -0.25) / std::sqrt(width);
  double center = q0 + p0 * t;

  Wavefunction psi;
  psi.grid = grid;
  psi.hbar = hbar;
  psi.amplitudes.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double x = grid.point(j);
    double d = x - center;
    std::complex<double> exponent =
        -d * d / (2.0 * hbar * width) + (1i / hbar) * (p0 * x - 0.5 * p0 * p0 * t);
    psi.amplitudes[j] = amplitude * std::exp(exponent);
  }
  return psi;
}

double stability_factor(const PotentialSpec& potential, const GridSpec& grid, double hbar,
                        double dt) {
  double vmax = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    vmax = std::max(vmax, std::abs(potential.value(grid.point(j))));
  double p_nyq = grid.nyquist_momentum(hbar);
  return dt * (vmax + 0.5 * p_nyq * p_nyq);
}

}  // namespace ehrenfest
