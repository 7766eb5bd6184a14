#ifndef EHRENFEST_GRID_HPP
#define EHRENFEST_GRID_HPP

#include <cstddef>

namespace ehrenfest {

// Uniform periodic spatial grid x_j = x_min + j*dx, j = 0..n-1 (x_max is the
// periodic image of x_min and is not a sample). n is a power of two >= 64.
struct GridSpec {
  double x_min = -2.0;
  double x_max = 2.0;
  std::size_t n = 4096;

  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  double length() const { return x_max - x_min; }
  double point(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }

  // Signed spatial wavenumber of FFT bin m (negative frequencies for m > n/2).
  double wavenumber(std::size_t m) const;

  // Largest representable |p| on this grid for a state with the given hbar.
  double nyquist_momentum(double hbar) const { return 3.14159265358979323846 * hbar / dx(); }

  bool operator==(const GridSpec& other) const {
    return x_min == other.x_min && x_max == other.x_max && n == other.n;
  }

  // Throws std::invalid_argument unless x_min < x_max, n >= 64, n a power of 2.
  void validate() const;
};

}  // namespace ehrenfest

#endif  // EHRENFEST_GRID_HPP
