#include "ehrenfest/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ehrenfest/detail/kahan.hpp"
#include "ehrenfest/errors.hpp"

namespace ehrenfest {

namespace {

void check_lattices(const Wavefunction& psi, const std::vector<double>& qs,
                    const std::vector<double>& ps) {
  if (qs.empty() || ps.empty()) throw std::invalid_argument("husimi: empty lattice");
  for (std::size_t i = 1; i < qs.size(); ++i)
    if (!(qs[i] > qs[i - 1])) throw std::invalid_argument("husimi: q lattice must be increasing");
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (!(ps[i] > ps[i - 1])) throw std::invalid_argument("husimi: p lattice must be increasing");
  double p_band = psi.grid.nyquist_momentum(psi.hbar);
  double p_extreme = std::max(std::abs(ps.front()), std::abs(ps.back()));
  if (p_extreme > p_band)
    throw MomentumOutOfBand("husimi: |p| up to " + std::to_string(p_extreme) +
                            " exceeds the Nyquist momentum " + std::to_string(p_band));
}

double axis_weight(const std::vector<double>& axis, std::size_t i) {
  if (axis.size() == 1) return 1.0;
  double left = (i == 0) ? 0.0 : 0.5 * (axis[i] - axis[i - 1]);
  double right = (i + 1 == axis.size()) ? 0.0 : 0.5 * (axis[i + 1] - axis[i]);
  return left + right;
}

}  // namespace

double HusimiField::cell_weight(std::size_t iq, std::size_t ip) const {
  return axis_weight(q_lattice, iq) * axis_weight(p_lattice, ip);
}

double HusimiField::total_mass() const {
  detail::KahanAccumulator acc;
  for (std::size_t iq = 0; iq < q_lattice.size(); ++iq)
    for (std::size_t ip = 0; ip < p_lattice.size(); ++ip) acc.add(value(iq, ip) * cell_weight(iq, ip));
  return acc.value();
}

std::vector<double> uniform_lattice(double min, double max, std::size_t count) {
  if (count < 2 || !(min < max)) throw std::invalid_argument("uniform_lattice: bad parameters");
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i)
    axis[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  return axis;
}

HusimiField husimi(const Wavefunction& psi, std::vector<double> q_lattice,
                   std::vector<double> p_lattice) {
  check_lattices(psi, q_lattice, p_lattice);

  HusimiField field;
  field.hbar = psi.hbar;
  field.q_lattice = std::move(q_lattice);
  field.p_lattice = std::move(p_lattice);
  field.values.assign(field.q_lattice.size() * field.p_lattice.size(), 0.0);

  const double hbar = psi.hbar;
  const double dx = psi.grid.dx();
  const double amp = std::pow(std::numbers::pi * hbar, -0.25);
  const double husimi_norm = 1.0 / (2.0 * std::numbers::pi * hbar);
  const double window = 10.0 * std::sqrt(hbar);
  const auto n = static_cast<std::ptrdiff_t>(psi.grid.n);
  const auto nq = static_cast<std::ptrdiff_t>(field.q_lattice.size());
  const auto np = static_cast<std::ptrdiff_t>(field.p_lattice.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t iq = 0; iq < nq; ++iq) {
    double q = field.q_lattice[static_cast<std::size_t>(iq)];
    // Grid window where the probe Gaussian is above ~1e-22.
    auto j_lo = static_cast<std::ptrdiff_t>(std::ceil((q - window - psi.grid.x_min) / dx));
    auto j_hi = static_cast<std::ptrdiff_t>(std::floor((q + window - psi.grid.x_min) / dx));
    j_lo = std::max<std::ptrdiff_t>(j_lo, 0);
    j_hi = std::min<std::ptrdiff_t>(j_hi, n - 1);
    for (std::ptrdiff_t ip = 0; ip < np; ++ip) {
      double p = field.p_lattice[static_cast<std::size_t>(ip)];
      detail::ComplexKahanAccumulator acc;
      for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
        double x = psi.grid.point(static_cast<std::size_t>(j));
        double d = x - q;
        double gauss = amp * std::exp(-d * d / (2.0 * hbar));
        double phase = -p * x / hbar;
        std::complex<double> probe_conj(gauss * std::cos(phase), gauss * std::sin(phase));
        acc.add(probe_conj * psi.amplitudes[static_cast<std::size_t>(j)]);
      }
      double overlap2 = std::norm(acc.value() * dx);
      field.values[static_cast<std::size_t>(iq * np + ip)] = overlap2 * husimi_norm;
    }
  }
  return field;
}

HusimiField husimi_reference(const Wavefunction& psi, std::vector<double> q_lattice,
                             std::vector<double> p_lattice) {
  check_lattices(psi, q_lattice, p_lattice);

  HusimiField field;
  field.hbar = psi.hbar;
  field.q_lattice = std::move(q_lattice);
  field.p_lattice = std::move(p_lattice);
  field.values.assign(field.q_lattice.size() * field.p_lattice.size(), 0.0);

  const double hbar = psi.hbar;
  const double dx = psi.grid.dx();
  const double amp = std::pow(std::numbers::pi * hbar, -0.25);
  const double husimi_norm = 1.0 / (2.0 * std::numbers::pi * hbar);

  for (std::size_t iq = 0; iq < field.q_lattice.size(); ++iq) {
    for (std::size_t ip = 0; ip < field.p_lattice.size(); ++ip) {
      double q = field.q_lattice[iq];
      double p = field.p_lattice[ip];
      detail::ComplexKahanAccumulator acc;
      for (std::size_t j = 0; j < psi.grid.n; ++j) {
        double x = psi.grid.point(j);
        double d = x - q;
        double gauss = amp * std::exp(-d * d / (2.0 * hbar));
        double phase = -p * x / hbar;
        std::complex<double> probe_conj(gauss * std::cos(phase), gauss * std::sin(phase));
        acc.add(probe_conj * psi.amplitudes[j]);
      }
      field.values[iq * field.p_lattice.size() + ip] = std::norm(acc.value() * dx) * husimi_norm;
    }
  }
  return field;
}

double tube_mass(const HusimiField& field, const SeparatrixCurve& curve, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("tube_mass: radius must be positive");
  const auto nq = static_cast<std::ptrdiff_t>(field.q_lattice.size());
  const auto np = static_cast<std::ptrdiff_t>(field.p_lattice.size());

  std::vector<char> inside(field.values.size(), 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t iq = 0; iq < nq; ++iq) {
    for (std::ptrdiff_t ip = 0; ip < np; ++ip) {
      PhaseSpacePoint node{field.q_lattice[static_cast<std::size_t>(iq)],
                           field.p_lattice[static_cast<std::size_t>(ip)]};
      if (distance_to_curve(curve, node) <= radius)
        inside[static_cast<std::size_t>(iq * np + ip)] = 1;
    }
  }

  detail::KahanAccumulator acc;
  for (std::size_t iq = 0; iq < field.q_lattice.size(); ++iq)
    for (std::size_t ip = 0; ip < field.p_lattice.size(); ++ip)
      if (inside[iq * field.p_lattice.size() + ip] != 0)
        acc.add(field.value(iq, ip) * field.cell_weight(iq, ip));
  return acc.value();
}

}  // namespace ehrenfest
