#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ehrenfest/classical.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/phase_space.hpp"

using namespace ehrenfest;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent derivative check for the Hamiltonian vector field.
PhaseSpacePoint finite_difference_field(const SystemSpec& sys, PhaseSpacePoint x, double h = 1e-6) {
  double dh_dp = (hamiltonian_value(sys, {x.q, x.p + h}) - hamiltonian_value(sys, {x.q, x.p - h})) /
                 (2 * h);
  double dh_dq = (hamiltonian_value(sys, {x.q + h, x.p}) - hamiltonian_value(sys, {x.q - h, x.p})) /
                 (2 * h);
  return {dh_dp, -dh_dq};
}
}  // namespace

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian_value(SystemSpec::dilation(), {1.0, 2.0}) == 2.0);  // h = qp
  CHECK(hamiltonian_value(SystemSpec::double_well(), {0.0, 0.0}) == 0.0);
  CHECK(hamiltonian_value(SystemSpec::double_well(), {1.0 / std::sqrt(2.0), 0.0}) ==
        doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(hamiltonian_value(SystemSpec::harmonic(2.0), {1.0, 0.0}) == doctest::Approx(2.0));
  CHECK(hamiltonian_value(SystemSpec::free_particle(), {5.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("vector field matches the Hamiltonian gradient") {
  CHECK(vector_field(SystemSpec::dilation(), {0.3, -1.7}).q == doctest::Approx(0.3));
  CHECK(vector_field(SystemSpec::dilation(), {0.3, -1.7}).p == doctest::Approx(1.7));
  auto fp = vector_field(SystemSpec::double_well(), {0.0, 0.0});
  CHECK(fp.q == 0.0);
  CHECK(fp.p == 0.0);
  auto mid = vector_field(SystemSpec::double_well(), {0.5, 0.0});
  CHECK(mid.q == doctest::Approx(0.0));
  CHECK(mid.p == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& sys : {SystemSpec::double_well(), SystemSpec::dilation(), SystemSpec::harmonic(1.3),
                          SystemSpec::free_particle(),
                          SystemSpec::potential_well(PotentialSpec::custom({0.1, -0.3, 0.7, 0.2}))}) {
    for (int i = 0; i < 20; ++i) {
      PhaseSpacePoint x{u(rng), u(rng)};
      auto exact = vector_field(sys, x);
      auto fd = finite_difference_field(sys, x);
      CHECK(exact.q == doctest::Approx(fd.q).epsilon(1e-7));
      CHECK(exact.p == doctest::Approx(fd.p).epsilon(1e-7));
    }
  }
}

TEST_CASE("dilation flow is exact at every sample") {
  auto traj = integrate_flow(SystemSpec::dilation(), {1.0, 1.0}, 1.0, 1e-3);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 1.0);
  CHECK(traj.final_point().q == std::exp(1.0));
  CHECK(traj.final_point().p == std::exp(-1.0));
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.points[i].q == std::exp(traj.times[i]));
    CHECK(traj.points[i].p == std::exp(-traj.times[i]));
  }
}

TEST_CASE("double-well fixed point stays put") {
  auto traj = integrate_flow(SystemSpec::double_well(), {0.0, 0.0}, 5.0, 1e-3);
  CHECK(traj.final_point().q == 0.0);
  CHECK(traj.final_point().p == 0.0);
}

TEST_CASE("harmonic orbit returns after one period") {
  auto traj = integrate_flow(SystemSpec::harmonic(1.0), {1.0, 0.0}, 2.0 * kPi, 1e-3);
  CHECK(std::abs(traj.final_point().q - 1.0) < 1e-5);
  CHECK(std::abs(traj.final_point().p - 0.0) < 1e-5);

  // Closed-form rotation at interior times too.
  for (std::size_t i = 0; i < traj.times.size(); i += 500) {
    double t = traj.times[i];
    CHECK(traj.points[i].q == doctest::Approx(std::cos(t)).epsilon(1e-5));
    CHECK(traj.points[i].p == doctest::Approx(-std::sin(t)).epsilon(1e-5));
  }
}

TEST_CASE("verlet conserves energy on bounded double-well orbits") {
  auto sys = SystemSpec::double_well();
  for (PhaseSpacePoint x0 : {PhaseSpacePoint{0.5, 0.0}, PhaseSpacePoint{0.7, 0.3},
                             PhaseSpacePoint{0.0, 0.5}, PhaseSpacePoint{-0.8, 0.1},
                             PhaseSpacePoint{1.0, 0.2}}) {
    auto traj = integrate_flow(sys, x0, 100.0, 1e-3);
    double e0 = traj.energy.front();
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.energy.size(); ++i) {
      worst = std::max(worst, std::abs(traj.energy[i] - e0));
      CHECK(std::abs(traj.points[i].q) <= 2.0);
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("verlet is time-reversible") {
  auto sys = SystemSpec::double_well();
  PhaseSpacePoint x0{0.6, 0.2};
  auto fwd = integrate_flow(sys, x0, 3.0, 1e-3);
  auto bwd = integrate_flow(sys, fwd.final_point(), -3.0, 1e-3);
  CHECK(phase_distance(bwd.final_point(), x0) < 1e-8);
}

TEST_CASE("flow composition on a shared step grid") {
  for (const auto& sys : {SystemSpec::double_well(), SystemSpec::harmonic(1.0), SystemSpec::dilation()}) {
    PhaseSpacePoint x0{0.4, 0.3};
    auto ab = integrate_flow(sys, x0, 0.75, 1e-3).final_point();
    auto a = integrate_flow(sys, x0, 0.5, 1e-3).final_point();
    auto then_b = integrate_flow(sys, a, 0.25, 1e-3).final_point();
    CHECK(phase_distance(ab, then_b) < 1e-8);
  }
}

TEST_CASE("blow-up raises NonFiniteState") {
  auto runaway = SystemSpec::potential_well(PotentialSpec::custom({0.0, 0.0, 0.0, 0.0, -1.0}));
  CHECK_THROWS_AS(integrate_flow(runaway, {2.0, 0.0}, 20.0, 0.1), NonFiniteState);
}

TEST_CASE("separation exponents: dilation, harmonic, double well") {
  double lam_dilation = separation_exponent(SystemSpec::dilation(), {1.0, 0.0}, 1e-8, 10.0, 1e-3);
  CHECK(std::abs(lam_dilation - 1.0) < 0.01);

  double lam_harmonic = separation_exponent(SystemSpec::harmonic(1.0), {0.7, -0.1}, 1e-8, 10.0, 1e-3);
  CHECK(std::abs(lam_harmonic) < 0.01);

  double lam_dw = separation_exponent(SystemSpec::double_well(), {0.0, 0.0}, 1e-8, 11.0, 1e-3);
  CHECK(std::abs(lam_dw - std::sqrt(2.0)) < 0.03);
}

TEST_CASE("separation exponent with too few samples degenerates") {
  CHECK_THROWS_AS(separation_exponent(SystemSpec::dilation(), {1.0, 0.0}, 1e-8, 0.05, 0.01),
                  DegenerateWindow);
}

TEST_CASE("hyperbolic analysis of the dilation fixed point") {
  auto data = hyperbolic_analysis(SystemSpec::dilation(), {0.0, 0.0});
  CHECK(data.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(data.fixed_point.q == doctest::Approx(0.0));
  CHECK(data.unstable[0] == doctest::Approx(1.0));
  CHECK(data.unstable[1] == doctest::Approx(0.0));
  CHECK(data.stable[0] == doctest::Approx(0.0));
  CHECK(data.stable[1] == doctest::Approx(1.0));
}

TEST_CASE("hyperbolic analysis of the double-well origin") {
  auto data = hyperbolic_analysis(SystemSpec::double_well(), {1e-7, -1e-7});
  CHECK(data.lambda == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  // Eigenvectors of [[0,1],[2,0]]: (1, +/-sqrt 2)/sqrt 3.
  double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  CHECK(data.unstable[0] == doctest::Approx(inv_sqrt3).epsilon(1e-10));
  CHECK(data.unstable[1] == doctest::Approx(std::sqrt(2.0) * inv_sqrt3).epsilon(1e-10));
  CHECK(data.stable[0] == doctest::Approx(inv_sqrt3).epsilon(1e-10));
  CHECK(data.stable[1] == doctest::Approx(-std::sqrt(2.0) * inv_sqrt3).epsilon(1e-10));

  // Exact linearization maps the unstable direction onto lambda times itself.
  auto j = vector_field_jacobian(SystemSpec::double_well(), data.fixed_point);
  double r0 = j[0] * data.unstable[0] + j[1] * data.unstable[1];
  double r1 = j[2] * data.unstable[0] + j[3] * data.unstable[1];
  CHECK(std::abs(r0 - data.lambda * data.unstable[0]) < 1e-10);
  CHECK(std::abs(r1 - data.lambda * data.unstable[1]) < 1e-10);

  // And the exact Jacobian agrees with finite differences of the field.
  double h = 1e-6;
  auto fqp = vector_field(SystemSpec::double_well(), {data.fixed_point.q + h, data.fixed_point.p});
  auto fqm = vector_field(SystemSpec::double_well(), {data.fixed_point.q - h, data.fixed_point.p});
  CHECK(std::abs((fqp.p - fqm.p) / (2 * h) - j[2]) < 1e-6);
}

TEST_CASE("elliptic and degenerate points are rejected") {
  CHECK_THROWS_AS(hyperbolic_analysis(SystemSpec::harmonic(1.0), {0.0, 0.0}), NotHyperbolic);
  // The free particle has a line of degenerate fixed points.
  CHECK_THROWS_AS(hyperbolic_analysis(SystemSpec::free_particle(), {1.0, 0.5}), NoFixedPoint);
  CHECK_THROWS_AS(hyperbolic_analysis(SystemSpec::free_particle(), {1.0, 0.0}), NotHyperbolic);
}

TEST_CASE("separatrix of the double well at E = 0") {
  auto sys = SystemSpec::double_well();
  auto curve = separatrix(sys, 0.0, 2001);
  const auto* v = sys.potential();

  CHECK(curve.upper.size() == 2001);
  CHECK(curve.upper.front().q == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(curve.upper.back().q == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(curve.upper.front().p) < 1e-6);  // turning points carry p = 0
  CHECK(std::abs(curve.upper.back().p) < 1e-6);

  for (std::size_t i = 0; i < curve.upper.size(); ++i) {
    auto pt = curve.upper[i];
    CHECK(std::abs(0.5 * pt.p * pt.p + v->value(pt.q) - 0.0) <= 1e-12);  // closure
    CHECK(curve.lower[i].p == -pt.p);                                    // p -> -p symmetry
    CHECK(curve.lower[i].q == pt.q);
  }

  // Independent root check of the figure-eight waist: p(1/sqrt 2) = 1/sqrt 2
  // satisfies the energy equation on its own.
  double target = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(0.5 * target * target + v->value(target)) < 1e-12);
  double best_dq = 1e9, p_at = 0.0;
  for (const auto& pt : curve.upper) {
    if (std::abs(pt.q - target) < best_dq) {
      best_dq = std::abs(pt.q - target);
      p_at = pt.p;
    }
  }
  CHECK(best_dq < 2e-3);
  CHECK(p_at == doctest::Approx(target).epsilon(5e-3));
}

TEST_CASE("separatrix level set below the potential floor is empty") {
  CHECK_THROWS_AS(separatrix(SystemSpec::double_well(), -0.5, 101), EmptyLevelSet);
}

TEST_CASE("higher level sets are single ovals") {
  auto curve = separatrix(SystemSpec::double_well(), 0.2, 501);
  // Turning points at q^4 - q^2 = 0.2.
  double q_turn = std::sqrt((1.0 + std::sqrt(1.8)) / 2.0);
  CHECK(curve.upper.front().q == doctest::Approx(-q_turn).epsilon(1e-9));
  CHECK(curve.upper.back().q == doctest::Approx(q_turn).epsilon(1e-9));
  for (const auto& pt : curve.upper)
    CHECK(std::abs(0.5 * pt.p * pt.p + pt.q * pt.q * (pt.q * pt.q - 1.0) - 0.2) <= 1e-12);
}
