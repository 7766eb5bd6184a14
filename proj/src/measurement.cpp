#include "ehrenfest/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ehrenfest/detail/kahan.hpp"

namespace ehrenfest {

namespace {
constexpr double kDegenerateBin = 1e-14;

// 53-bit uniform in [0, 1); fixed mapping keeps sampling platform-stable.
double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

void SpectralObservable::validate(const GridSpec& grid) const {
  if (breakpoints.size() < 2) throw std::invalid_argument("SpectralObservable: need >= 2 breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("SpectralObservable: breakpoints must be strictly increasing");
  if (values.size() != breakpoints.size() - 1)
    throw std::invalid_argument("SpectralObservable: need one value per bin");
  if (breakpoints.front() > grid.x_min || breakpoints.back() < grid.x_max)
    throw std::invalid_argument("SpectralObservable: partition must cover the grid range");
}

MeasurementResult projective_measurement(const Wavefunction& psi, const SpectralObservable& obs) {
  obs.validate(psi.grid);
  std::size_t n_bins = obs.values.size();
  double dx = psi.grid.dx();

  // Bin index per grid point: j in bin b iff breakpoints[b] <= x_j < breakpoints[b+1].
  std::vector<detail::KahanAccumulator> mass(n_bins);
  std::vector<std::size_t> bin_of(psi.grid.n);
  for (std::size_t j = 0; j < psi.grid.n; ++j) {
    double x = psi.grid.point(j);
    auto it = std::upper_bound(obs.breakpoints.begin(), obs.breakpoints.end(), x);
    std::size_t b = (it == obs.breakpoints.begin())
                        ? 0
                        : std::min<std::size_t>(n_bins - 1, static_cast<std::size_t>(it - obs.breakpoints.begin()) - 1);
    bin_of[j] = b;
    mass[b].add(std::norm(psi.amplitudes[j]) * dx);
  }

  MeasurementResult result;
  result.outcomes.resize(n_bins);
  detail::KahanAccumulator total, expect;
  for (std::size_t b = 0; b < n_bins; ++b) {
    double p = mass[b].value();
    result.outcomes[b].probability = p;
    result.outcomes[b].eigenvalue = obs.values[b];
    total.add(p);
    expect.add(obs.values[b] * p);
    if (p >= kDegenerateBin) {
      Wavefunction collapsed = psi;
      for (std::size_t j = 0; j < psi.grid.n; ++j)
        if (bin_of[j] != b) collapsed.amplitudes[j] = 0.0;
      result.outcomes[b].post_state = normalized(std::move(collapsed));
    }
  }
  result.total_probability = total.value();
  result.expectation = expect.value();
  return result;
}

std::vector<double> sample_positions(const Wavefunction& psi, std::uint64_t seed, std::size_t count) {
  double dx = psi.grid.dx();
  std::size_t n = psi.grid.n;

  // Cumulative mass after each cell, normalized to end exactly at 1.
  std::vector<double> cdf(n);
  detail::KahanAccumulator acc;
  for (std::size_t j = 0; j < n; ++j) {
    acc.add(std::norm(psi.amplitudes[j]) * dx);
    cdf[j] = acc.value();
  }
  double total = cdf.back();
  if (!(total > 0.0)) throw std::invalid_argument("sample_positions: state has zero norm");
  for (auto& c : cdf) c /= total;
  cdf.back() = 1.0;

  std::mt19937_64 rng(seed);
  std::vector<double> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double u = uniform53(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto j = static_cast<std::size_t>(it - cdf.begin());
    if (j >= n) j = n - 1;
    double lo = (j == 0) ? 0.0 : cdf[j - 1];
    double w = cdf[j] - lo;
    double frac = (w > 0.0) ? (u - lo) / w : 0.5;
    // Cell j spans [x_j - dx/2, x_j + dx/2); density constant inside.
    samples.push_back(psi.grid.point(j) - 0.5 * dx + frac * dx);
  }
  return samples;
}

double position_cdf(const Wavefunction& psi, double x) {
  double dx = psi.grid.dx();
  std::size_t n = psi.grid.n;
  detail::KahanAccumulator acc, total;
  for (std::size_t j = 0; j < n; ++j) {
    double w = std::norm(psi.amplitudes[j]) * dx;
    total.add(w);
    double lo = psi.grid.point(j) - 0.5 * dx;
    if (x >= lo + dx)
      acc.add(w);
    else if (x > lo)
      acc.add(w * (x - lo) / dx);
  }
  double t = total.value();
  return t > 0.0 ? std::min(1.0, acc.value() / t) : 0.0;
}

}  // namespace ehrenfest
