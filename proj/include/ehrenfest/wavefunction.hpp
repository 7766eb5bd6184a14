#ifndef EHRENFEST_WAVEFUNCTION_HPP
#define EHRENFEST_WAVEFUNCTION_HPP

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "ehrenfest/grid.hpp"

namespace ehrenfest {

// Complex amplitudes on a uniform grid, tagged with the state's hbar.
// States produced by the factories in this module are normalized to grid norm
// 1 and contained (boundary mass < 1e-8); evolution keeps using a state until
// its boundary mass exceeds 1e-4, after which results are not trustworthy.
struct Wavefunction {
  GridSpec grid;
  double hbar = 1.0;
  std::vector<std::complex<double>> amplitudes;
};

// Wave-packet envelope a(eta) on the unit scale eta = (x - q)/sqrt(hbar).
// All kinds have unit L2 norm; the canonical coherent state is the standard
// Gaussian a(eta) = pi^(-1/4) exp(-eta^2/2).
class EnvelopeSpec {
 public:
  static EnvelopeSpec standard_gaussian();
  // a(eta) = (pi s^2)^(-1/4) exp(-eta^2/(2 s^2)), s > 0.
  static EnvelopeSpec scaled_gaussian(double s);
  // Samples on a uniform eta grid [eta_min, eta_max], zero outside, evaluated
  // by cubic interpolation; renormalized to unit L2 norm at construction.
  static EnvelopeSpec custom_samples(double eta_min, double eta_max,
                                     std::vector<std::complex<double>> values);

  std::complex<double> evaluate(double eta) const;
  bool is_standard_gaussian() const { return kind_ == Kind::Standard; }

 private:
  enum class Kind { Standard, Scaled, Custom };
  EnvelopeSpec(Kind k, double s) : kind_(k), width_(s) {}
  Kind kind_;
  double width_ = 1.0;
  double eta_min_ = 0.0, eta_step_ = 1.0;
  std::vector<std::complex<double>> samples_;
};

// Position/momentum dispersions of a state.
struct Moments {
  double q_mean = 0.0;
  double p_mean = 0.0;
  double delta_q = 0.0;
  double delta_p = 0.0;
  double uncertainty_product = 0.0;  // delta_q * delta_p
};

// hbar^(-1/4) a((x-q)/sqrt(hbar)) e^{i p x / hbar}, sampled and renormalized
// to grid norm 1. Throws MassEscape when the state is too close to the grid
// edge (boundary mass >= 1e-8).
Wavefunction make_coherent_state(const GridSpec& grid, double hbar, double q, double p,
                                 const EnvelopeSpec& envelope = EnvelopeSpec::standard_gaussian());

// Rectangle-rule grid norm sqrt(sum |psi_j|^2 dx); spectrally accurate for
// contained smooth states.
double norm(const Wavefunction& psi);

// <psi, phi> = sum conj(psi_j) phi_j dx. Throws GridMismatch unless both
// states share the grid and hbar.
std::complex<double> inner_product(const Wavefunction& psi, const Wavefunction& phi);

// Probability mass on the outermost 5% of grid points (2.5% per edge).
double boundary_mass(const Wavefunction& psi);

// Copy scaled to grid norm 1.
Wavefunction normalized(Wavefunction psi);

// Position moments by grid sums, momentum moments through the FFT with
// momenta hbar*k. Throws MassEscape if the state has drifted to the boundary
// (boundary mass > 1e-4).
Moments moments(const Wavefunction& psi);

// Polynomial with complex coefficients, c[0] + c[1] x + ...
using ComplexPolynomial = std::vector<std::complex<double>>;

// <psi, H psi> for H = sum_l a[l](x) (-i hbar d/dx)^l; derivatives applied
// spectrally. Throws OrderUnsupported when a.size() > 3 (order above 2).
// The imaginary part of the result is a self-adjointness diagnostic and
// stays below 1e-8 for self-adjoint input.
std::complex<double> expectation_diffop(const Wavefunction& psi,
                                        const std::vector<ComplexPolynomial>& a);

// Coefficients of H = -hbar^2/2 d^2/dx^2 + V(x) for expectation_diffop.
std::vector<ComplexPolynomial> kinetic_plus_potential(const std::vector<double>& v_coefficients);

// Snapshot file format: comment lines `# hbar=`, `# xmin=`, `# xmax=`, `# n=`
// then a `x,re,im` CSV body, one row per grid point, shortest round-trip
// decimals.
void save_wavefunction(const std::filesystem::path& path, const Wavefunction& psi);
Wavefunction load_wavefunction(const std::filesystem::path& path);

}  // namespace ehrenfest

#endif  // EHRENFEST_WAVEFUNCTION_HPP
