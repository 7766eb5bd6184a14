#ifndef EHRENFEST_HUSIMI_HPP
#define EHRENFEST_HUSIMI_HPP

#include <cstddef>
#include <vector>

#include "ehrenfest/classical.hpp"
#include "ehrenfest/wavefunction.hpp"

namespace ehrenfest {

// Phase-space density |<psi_qp, psi>|^2 / (2 pi hbar) sampled on a
// rectangular (q, p) lattice; nonnegative, sub-normalized (total mass <= 1 up
// to quadrature error once the lattice resolves the sqrt(hbar) coherent-state
// scale).
struct HusimiField {
  std::vector<double> q_lattice;
  std::vector<double> p_lattice;
  std::vector<double> values;  // row-major, values[iq * p_lattice.size() + ip]
  double hbar = 1.0;

  double value(std::size_t iq, std::size_t ip) const { return values[iq * p_lattice.size() + ip]; }
  // Trapezoid cell weight along each axis (reduces to the cell area on
  // uniform lattices).
  double cell_weight(std::size_t iq, std::size_t ip) const;
  double total_mass() const;
};

std::vector<double> uniform_lattice(double min, double max, std::size_t count);

// Production kernel: coherent-state overlaps restricted to a 10*sqrt(hbar)
// Gaussian window around each node, lattice nodes computed in parallel with
// OpenMP. Throws MomentumOutOfBand if the p lattice leaves the Nyquist band.
HusimiField husimi(const Wavefunction& psi, std::vector<double> q_lattice,
                   std::vector<double> p_lattice);

// Reference implementation for tests: full-grid inner product per node, no
// truncation, serial. Agrees with husimi() to the truncation tail (~1e-20).
HusimiField husimi_reference(const Wavefunction& psi, std::vector<double> q_lattice,
                             std::vector<double> p_lattice);

// Husimi mass within Euclidean phase-space distance <= radius of the curve.
// Node-to-curve distances run under OpenMP; the final sum is serial and
// deterministic.
double tube_mass(const HusimiField& field, const SeparatrixCurve& curve, double radius);

}  // namespace ehrenfest

#endif  // EHRENFEST_HUSIMI_HPP
