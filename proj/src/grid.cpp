#include "ehrenfest/grid.hpp"

#include <numbers>
#include <stdexcept>

namespace ehrenfest {

double GridSpec::wavenumber(std::size_t m) const {
  double base = 2.0 * std::numbers::pi / length();
  auto half = n / 2;
  if (m <= half) return base * static_cast<double>(m);
  return base * (static_cast<double>(m) - static_cast<double>(n));
}

void GridSpec::validate() const {
  if (!(x_min < x_max)) throw std::invalid_argument("GridSpec: x_min must be < x_max");
  if (n < 64) throw std::invalid_argument("GridSpec: n must be >= 64");
  if ((n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two");
}

}  // namespace ehrenfest
