#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ehrenfest/diagnostics.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/propagators.hpp"
#include "ehrenfest/text.hpp"

using namespace ehrenfest;

namespace {
constexpr double kPi = std::numbers::pi;
const GridSpec kGrid{-2.0, 2.0, 4096};
constexpr double kHbar = 1e-3;
}  // namespace

TEST_CASE("coherent fit recovers an exact coherent state") {
  auto psi = make_coherent_state(kGrid, kHbar, 0.4, -0.3);
  auto fit = coherent_fit(psi, {0.42, -0.27});  // guess a little off
  CHECK(std::abs(fit.center.q - 0.4) < 1e-6);
  CHECK(std::abs(fit.center.p - (-0.3)) < 1e-6);
  CHECK(fit.residual < 1e-8);
  CHECK(fit.width.real() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fit overlap is invariant under a global phase") {
  auto psi = make_coherent_state(kGrid, kHbar, 0.2, 0.1);
  Wavefunction rotated = psi;
  std::complex<double> phase = std::polar(1.0, 1.234);
  for (auto& z : rotated.amplitudes) z *= phase;
  double a = gaussian_family_overlap(psi, 0.2, 0.1, {1.0, 0.0});
  double b = gaussian_family_overlap(rotated, 0.2, 0.1, {1.0, 0.0});
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("fit recovers a squeezed width") {
  // Build a squeezed Gaussian directly: w = 2.1 + 0.7i.
  std::complex<double> w{2.1, 0.7};
  Wavefunction psi;
  psi.grid = kGrid;
  psi.hbar = kHbar;
  psi.amplitudes.resize(kGrid.n);
  for (std::size_t j = 0; j < kGrid.n; ++j) {
    double d = kGrid.point(j) - 0.1;
    psi.amplitudes[j] = std::exp(-w * d * d / (2 * kHbar)) *
                        std::polar(1.0, 0.25 * kGrid.point(j) / kHbar);
  }
  psi = normalized(psi);
  auto fit = coherent_fit(psi, {0.1, 0.25});
  CHECK(std::abs(fit.center.q - 0.1) < 1e-6);
  CHECK(std::abs(fit.center.p - 0.25) < 1e-6);
  CHECK(std::abs(fit.width.real() - 2.1) < 1e-4);
  CHECK(std::abs(fit.width.imag() - 0.7) < 1e-4);
  CHECK(fit.residual < 1e-7);
}

TEST_CASE("harmonic evolution stays on the coherent family") {
  double t = 0.7;
  auto evolved = evolve_exact_harmonic(1.0, 0.5, 0.0, kHbar, t, kGrid);
  PhaseSpacePoint center{0.5 * std::cos(t), -0.5 * std::sin(t)};
  auto fit = coherent_fit(evolved, center);
  CHECK(fit.residual < 1e-5);
  CHECK(std::abs(fit.center.q - center.q) < 1e-5);
  CHECK(std::abs(fit.center.p - center.p) < 1e-5);
}

TEST_CASE("egorov error at t = 0 carries only the Gaussian moment terms") {
  auto dw = PotentialSpec::double_well();
  double q0 = 0.5;
  // Degree <= 1 symbols are exact on coherent states.
  CHECK(egorov_error(dw, {0.3, 1.0}, {q0, 0.0}, 0.0, kHbar, 1e-3, kGrid) < 1e-9);
  // Higher degrees pick up the exact Gaussian central moments of width
  // sqrt(hbar/2): <q^2> - q^2 = hbar/2, <q^3> - q^3 = 3 q hbar/2,
  // <q^4> - q^4 = 3 q^2 hbar + 3 hbar^2/4.
  double e2 = egorov_error(dw, {0.0, 0.0, 1.0}, {q0, 0.0}, 0.0, kHbar, 1e-3, kGrid);
  CHECK(std::abs(e2 - 0.5 * kHbar) < 1e-9);
  double e3 = egorov_error(dw, {0.0, 0.0, 0.0, 1.0}, {q0, 0.0}, 0.0, kHbar, 1e-3, kGrid);
  CHECK(std::abs(e3 - 1.5 * q0 * kHbar) < 1e-9);
  double e4 = egorov_error(dw, {0.0, 0.0, 0.0, 0.0, 1.0}, {q0, 0.0}, 0.0, kHbar, 1e-3, kGrid);
  CHECK(std::abs(e4 - (3.0 * q0 * q0 * kHbar + 0.75 * kHbar * kHbar)) < 1e-9);
}

TEST_CASE("egorov error vanishes for quadratic dynamics at any time") {
  GridSpec grid{-6.0, 6.0, 2048};
  for (double t : {0.5, 2.0, 7.0})
    CHECK(egorov_error(PotentialSpec::quadratic(1.0), {0.0, 1.0}, {1.0, 0.0}, t, 1e-2, 1e-3,
                       grid) < 1e-6);
}

TEST_CASE("localization metrics of reference states") {
  auto packet = make_coherent_state(kGrid, kHbar, 0.0, 0.0);
  auto m = localization_metrics(packet, nullptr, 0.1);
  CHECK(std::abs(m.delta_q - std::sqrt(kHbar / 2)) < 1e-4);
  // IPR of a Gaussian density with sigma^2 = hbar/2 is 2 sigma sqrt(pi).
  CHECK(std::abs(m.inverse_participation_ratio - 2.0 * std::sqrt(kPi * kHbar / 2)) < 1e-6);
  CHECK_FALSE(m.tube_mass.has_value());

  // The delocalized profile has the O(1) width 1/sqrt(2), independent of hbar.
  auto profile = make_coherent_state({-12.0, 12.0, 2048}, 1.0, 0.0, 0.0);
  CHECK(std::abs(localization_metrics(profile, nullptr, 0.1).delta_q - 1.0 / std::sqrt(2.0)) <
        1e-6);

  // A packet sitting on the separatrix keeps >= 0.95 of its Husimi mass in
  // the 5 sqrt(hbar) tube.
  auto curve = separatrix(SystemSpec::double_well(), 0.0, 2001);
  auto on_curve = make_coherent_state(kGrid, kHbar, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  auto lm = localization_metrics(on_curve, &curve, 5.0 * std::sqrt(kHbar));
  REQUIRE(lm.tube_mass.has_value());
  CHECK(*lm.tube_mass >= 0.95);
}

TEST_CASE("revival detector finds harmonic returns and ignores monotone decay") {
  // Synthetic record with the harmonic return structure.
  EvolutionRecord record;
  double dt = 1e-3;
  for (std::size_t i = 0; i <= 13000; ++i) {
    double t = dt * static_cast<double>(i);
    record.times.push_back(t);
    record.norms.push_back(1.0);
    // |ac| of a rotating coherent state: exp(-R^2 (1 - cos t)/(2 hbar))-like;
    // use the exact overlap law for displacement 2 R sin(t/2).
    double d2 = 2.0 * (1.0 - std::cos(t));  // R = 1
    record.autocorrelation.push_back(std::exp(-d2 / (4.0 * 1e-1)));
  }
  auto r = revival_detector(record, 1.0, 13.0);
  REQUIRE(r.peak_time.has_value());
  CHECK(std::abs(*r.peak_time - 2.0 * kPi) < 1.5 * dt);
  CHECK(std::abs(r.peak_height - 1.0) < 1e-4);

  // Strictly decreasing |ac| (the dilation case) has no peak.
  EvolutionRecord fading;
  for (std::size_t i = 0; i <= 5000; ++i) {
    double t = dt * static_cast<double>(i);
    fading.times.push_back(t);
    fading.norms.push_back(1.0);
    fading.autocorrelation.push_back(std::sqrt(1.0 / std::cosh(t)));
  }
  auto none = revival_detector(fading, 0.5, 5.0);
  CHECK_FALSE(none.peak_time.has_value());

  CHECK_THROWS_AS(revival_detector(fading, 0.5, 9.0), WindowOutOfRange);
  CHECK_THROWS_AS(revival_detector(fading, -1.0, 3.0), WindowOutOfRange);
}

TEST_CASE("real split-operator harmonic record revives at 2 pi") {
  GridSpec grid{-6.0, 6.0, 2048};
  auto psi0 = make_coherent_state(grid, 1e-2, 1.0, 0.0);
  auto n_steps = static_cast<std::size_t>(std::ceil(2.2 * 2.0 * kPi / 1e-3));
  auto record = evolve_split_operator(psi0, PotentialSpec::quadratic(1.0), 1e-3, n_steps, 0);
  auto r = revival_detector(record, 1.0, record.times.back());
  REQUIRE(r.peak_time.has_value());
  CHECK(std::abs(r.peak_height - 1.0) < 1e-4);
  double phase = std::fmod(*r.peak_time, 2.0 * kPi);
  CHECK(std::min(phase, 2.0 * kPi - phase) < 2e-3);
}

TEST_CASE("hbar sweep fits exact power laws and validates input") {
  auto report = hbar_sweep({1e-1, 1e-2, 1e-3, 1e-4}, [](double h) { return 3.0 * std::pow(h, 0.7); });
  CHECK(report.exponent == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(report.fit_residual < 1e-12);
  CHECK(report.hbar_values.front() > report.hbar_values.back());  // sorted decreasing

  CHECK_THROWS_AS(hbar_sweep({1e-2, 1e-3}, [](double) { return 1.0; }), std::invalid_argument);
  CHECK_THROWS_AS(hbar_sweep({1e-2, 5e-3, 2e-3}, [](double) { return 1.0; }),
                  std::invalid_argument);
}

TEST_CASE("sweep failures are annotated with the offending hbar") {
  auto boom = [](double h) -> double {
    if (h < 1e-3) throw MassEscape("state hit the boundary");
    return h;
  };
  try {
    hbar_sweep({1e-1, 1e-2, 1e-4}, boom);
    FAIL("expected a rethrown failure");
  } catch (const SimulationError& e) {
    CHECK(e.kind() == "MassEscape");
    CHECK(std::string(e.what()).find("hbar=" + format_double(1e-4)) != std::string::npos);
  }
}

TEST_CASE("ehrenfest time scale") {
  CHECK(ehrenfest_time(std::sqrt(2.0), 1e-3) == doctest::Approx(std::log(1e3) / std::sqrt(2.0)));
}
