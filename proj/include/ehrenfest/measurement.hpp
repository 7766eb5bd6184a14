#ifndef EHRENFEST_MEASUREMENT_HPP
#define EHRENFEST_MEASUREMENT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ehrenfest/wavefunction.hpp"

namespace ehrenfest {

// A spectral observable built from position-bin projectors: breakpoints
// b_0 < b_1 < ... < b_K cover the grid range, bin j is [b_j, b_{j+1}) and
// carries the eigenvalue values[j].
struct SpectralObservable {
  std::vector<double> breakpoints;
  std::vector<double> values;

  // Throws std::invalid_argument unless breakpoints are strictly increasing,
  // cover [x_min, x_max] and values has one entry per bin.
  void validate(const GridSpec& grid) const;
};

struct MeasurementOutcome {
  double probability = 0.0;
  double eigenvalue = 0.0;
  // Renormalized collapsed state; absent when probability < 1e-14 (the
  // post-measurement state would be renormalized noise).
  std::optional<Wavefunction> post_state;
};

struct MeasurementResult {
  std::vector<MeasurementOutcome> outcomes;  // one per bin, in bin order
  double expectation = 0.0;                  // sum_j lambda_j p_j
  double total_probability = 0.0;            // sum_j p_j, equals grid norm^2
};

// Projective measurement postulate on position bins: p_j = |Pi_j psi|^2 where
// Pi_j zeroes amplitudes outside bin j.
MeasurementResult projective_measurement(const Wavefunction& psi, const SpectralObservable& obs);

// Draws `count` positions from the piecewise-constant density |psi_j|^2 dx on
// cells [x_j - dx/2, x_j + dx/2) by inverse-CDF sampling. The generator is a
// seeded mt19937_64 with a fixed 53-bit uniform mapping, so identical
// (psi, seed, count) triples give identical sequences on every platform.
std::vector<double> sample_positions(const Wavefunction& psi, std::uint64_t seed, std::size_t count);

// Piecewise-linear numerical CDF evaluated at x (the sampling oracle).
double position_cdf(const Wavefunction& psi, double x);

}  // namespace ehrenfest

#endif  // EHRENFEST_MEASUREMENT_HPP
