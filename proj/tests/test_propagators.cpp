#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/propagators.hpp"
#include "ehrenfest/wavefunction.hpp"

using namespace ehrenfest;

namespace {
constexpr double kPi = std::numbers::pi;

double l2_gap(const Wavefunction& a, const Wavefunction& b) {
  REQUIRE(a.grid == b.grid);
  Wavefunction diff = a;
  for (std::size_t j = 0; j < diff.amplitudes.size(); ++j) diff.amplitudes[j] -= b.amplitudes[j];
  return norm(diff);
}
}  // namespace

TEST_CASE("split-operator conserves the norm step by step") {
  GridSpec grid{-2.0, 2.0, 2048};
  auto psi0 = make_coherent_state(grid, 1e-3, 0.5, 0.0);
  auto record = evolve_split_operator(psi0, PotentialSpec::double_well(), 1e-3, 500, 100);
  CHECK(record.times.front() == 0.0);
  CHECK(record.norms.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(record.autocorrelation.front() - std::complex<double>(1.0, 0.0)) < 1e-12);
  CHECK(record.times.size() == 501);
  CHECK(record.norms.size() == record.times.size());
  CHECK(record.autocorrelation.size() == record.times.size());
  CHECK(record.snapshots.size() == record.snapshot_steps.size());
  CHECK(record.snapshot_steps.back() == 500);
  for (double n : record.norms) CHECK(std::abs(n - 1.0) < 1e-10);
}

TEST_CASE("free evolution matches the spreading Gaussian") {
  GridSpec grid{-12.0, 12.0, 2048};
  double hbar = 1e-1;
  auto psi0 = make_coherent_state(grid, hbar, 0.0, 0.5);
  auto record = evolve_split_operator(psi0, PotentialSpec::custom({0.0}), 1e-3, 1000, 0);
  auto oracle = evolve_exact_free(0.0, 0.5, hbar, 1.0, grid);
  CHECK(l2_gap(record.final_state(), oracle) < 1e-6);
}

TEST_CASE("harmonic coherent state returns after one period") {
  GridSpec grid{-6.0, 6.0, 2048};
  double hbar = 1e-2, dt = 1e-3;
  auto psi0 = make_coherent_state(grid, hbar, 1.0, 0.0);
  auto n_steps = static_cast<std::size_t>(std::ceil(2.0 * kPi / dt));
  auto record = evolve_split_operator(psi0, PotentialSpec::quadratic(1.0), dt, n_steps, 0);

  // |<psi0, psi_t>| peaks back to 1 at t = 2 pi.
  double best = 0.0;
  for (const auto& ac : record.autocorrelation) best = std::max(best, std::abs(ac));
  std::size_t period_step = static_cast<std::size_t>(std::llround(2.0 * kPi / dt));
  CHECK(std::abs(std::abs(record.autocorrelation[period_step]) - 1.0) < 1e-5);
  CHECK(best <= 1.0 + 1e-10);
}

TEST_CASE("group property on a shared step grid") {
  GridSpec grid{-2.0, 2.0, 2048};
  auto psi0 = make_coherent_state(grid, 1e-3, 0.5, 0.0);
  auto dw = PotentialSpec::double_well();
  auto full = evolve_split_operator(psi0, dw, 1e-3, 750, 0);
  auto part = evolve_split_operator(psi0, dw, 1e-3, 500, 0);
  auto rest = evolve_split_operator(part.final_state(), dw, 1e-3, 250, 0);
  CHECK(l2_gap(full.final_state(), rest.final_state()) < 1e-9);
}

TEST_CASE("escaping mass aborts the evolution") {
  GridSpec grid{-2.0, 2.0, 1024};
  double hbar = 1e-2;
  auto psi0 = make_coherent_state(grid, hbar, 0.0, 0.5);  // free flight to the right
  CHECK_THROWS_AS(evolve_split_operator(psi0, PotentialSpec::custom({0.0}), 1e-3, 4000, 500),
                  MassEscape);
}

TEST_CASE("dilation evolution: identity at t = 0 and exact scale covariance") {
  GridSpec grid{-2.0, 2.0, 2048};
  double hbar = 1e-3;
  auto env = EnvelopeSpec::standard_gaussian();
  auto at0 = evolve_dilation(0.1, 0.2, env, hbar, 0.0, grid);
  auto direct = make_coherent_state(grid, hbar, 0.1, 0.2, env);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    worst = std::max(worst, std::abs(at0.amplitudes[j] - direct.amplitudes[j]));
  CHECK(worst < 1e-12);

  // psi^{t+s}(x) = e^{-s/2} psi^t(e^{-s} x), closed form at any pair of times.
  for (auto [t, s] : {std::pair{0.3, 0.5}, {1.0, 0.8}}) {
    for (double x : {-0.9, -0.2, 0.05, 0.4, 1.3}) {
      auto lhs = dilation_amplitude(0.0, 0.1, env, hbar, t + s, x);
      auto rhs = std::exp(-0.5 * s) * dilation_amplitude(0.0, 0.1, env, hbar, t, std::exp(-s) * x);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("dilation delocalization profiles at the two landmark times") {
  GridSpec wide{-800.0, 800.0, 4096};
  GridSpec medium{-12.0, 12.0, 2048};
  auto env = EnvelopeSpec::standard_gaussian();
  for (double hbar : {1e-2, 1e-3, 1e-4}) {
    // t = log(1/hbar)/2: the hbar-independent profile pi^{-1/4} e^{-x^2/2}.
    auto half = evolve_dilation(0.0, 0.0, env, hbar, 0.5 * std::log(1.0 / hbar), medium);
    double worst = 0.0;
    for (std::size_t j = 0; j < medium.n; ++j) {
      double x = medium.point(j);
      worst = std::max(worst, std::abs(half.amplitudes[j] -
                                       std::complex<double>(
                                           std::pow(kPi, -0.25) * std::exp(-0.5 * x * x), 0.0)));
    }
    CHECK(worst <= 1e-12);

    // t = log(1/hbar): uniformly delocalized, (hbar/pi)^{1/4} e^{-hbar x^2/2}.
    auto full = evolve_dilation(0.0, 0.0, env, hbar, std::log(1.0 / hbar), wide);
    worst = 0.0;
    for (std::size_t j = 0; j < wide.n; ++j) {
      double x = wide.point(j);
      double target = std::pow(hbar / kPi, 0.25) * std::exp(-0.5 * hbar * x * x);
      worst = std::max(worst, std::abs(full.amplitudes[j] - std::complex<double>(target, 0.0)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("a dilated state that outgrows the grid is rejected") {
  GridSpec grid{-2.0, 2.0, 1024};
  CHECK_THROWS_AS(
      evolve_dilation(0.0, 0.0, EnvelopeSpec::standard_gaussian(), 1e-3, 5.0, grid),
      MassEscape);
}

TEST_CASE("exact harmonic reference rotates the center") {
  GridSpec grid{-6.0, 6.0, 2048};
  double hbar = 1e-2;
  auto psi = evolve_exact_harmonic(1.0, 1.0, 0.0, hbar, kPi / 2.0, grid);
  auto m = moments(psi);
  CHECK(std::abs(m.q_mean - 0.0) < 1e-10);
  CHECK(std::abs(m.p_mean - (-1.0)) < 1e-10);
  CHECK(std::abs(norm(psi) - 1.0) < 1e-12);

  // Width is preserved for omega = 1 at all times.
  auto later = evolve_exact_harmonic(1.0, 1.0, 0.0, hbar, 5.3, grid);
  CHECK(std::abs(moments(later).delta_q - std::sqrt(hbar / 2)) < 1e-9);
}

TEST_CASE("exact free reference translates and spreads") {
  GridSpec grid{-12.0, 12.0, 2048};
  double hbar = 1e-2;
  auto psi = evolve_exact_free(0.0, 1.0, hbar, 2.0, grid);
  auto m = moments(psi);
  CHECK(std::abs(m.q_mean - 2.0) < 1e-10);
  CHECK(std::abs(m.p_mean - 1.0) < 1e-10);
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    auto spread = moments(evolve_exact_free(0.0, 1.0, hbar, t, grid));
    CHECK(std::abs(spread.delta_q * spread.delta_q - 0.5 * hbar * (1 + t * t)) < 1e-9);
  }
}

TEST_CASE("energy expectation is flat along split-operator evolution") {
  GridSpec grid{-2.0, 2.0, 2048};
  double hbar = 1e-3;
  auto psi0 = make_coherent_state(grid, hbar, 1.0 / std::sqrt(2.0), 0.0);
  auto h_op = kinetic_plus_potential(PotentialSpec::double_well().coefficients());
  auto record = evolve_split_operator(psi0, PotentialSpec::double_well(), 1e-3, 2000, 200);
  double e0 = expectation_diffop(record.snapshots.front(), h_op).real();
  for (const auto& snap : record.snapshots)
    CHECK(std::abs(expectation_diffop(snap, h_op).real() - e0) < 1e-8);
}

TEST_CASE("stability factor flags oversized steps") {
  GridSpec grid{-2.0, 2.0, 4096};
  double ok = stability_factor(PotentialSpec::double_well(), grid, 1e-3, 1e-3);
  double bad = stability_factor(PotentialSpec::double_well(), grid, 1e-3, 1.0);
  CHECK(ok <= 0.5);
  CHECK(bad > 0.5);
}
