#ifndef EHRENFEST_CLASSICAL_HPP
#define EHRENFEST_CLASSICAL_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "ehrenfest/phase_space.hpp"

namespace ehrenfest {

// A sampled orbit of the Hamiltonian flow. times are strictly increasing for
// forward integration (strictly decreasing for backward); energy[i] is
// h(points[i]) recomputed at sample time.
struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseSpacePoint> points;
  std::vector<double> energy;

  PhaseSpacePoint final_point() const { return points.back(); }
};

// Hyperbolic fixed-point data: the refined fixed point, the positive exponent
// lambda and unit eigendirections of the linearized field (eigenvalues
// +lambda for unstable, -lambda for stable).
struct HyperbolicData {
  PhaseSpacePoint fixed_point;
  double lambda = 0.0;
  std::array<double, 2> unstable{};
  std::array<double, 2> stable{};
};

// The level set {h = E} of a potential-type system, sampled as two sign
// branches p = +/- sqrt(2(E - V(q))) over the classically allowed q-range.
struct SeparatrixCurve {
  double energy = 0.0;
  std::vector<PhaseSpacePoint> upper;  // p >= 0 branch, ordered by q
  std::vector<PhaseSpacePoint> lower;  // p <= 0 branch, ordered by q
};

// Propagates x0 for time t_final (either sign). dt > 0 bounds the step size;
// the actual step is |t_final|/ceil(|t_final|/dt) so the trajectory lands on
// t_final exactly and always contains t = 0. Potential-type systems use
// velocity Verlet (symplectic, time-reversible); the dilation flow is sampled
// from its closed form (q0 e^t, p0 e^-t). The caller keeps lambda*dt < 0.1
// for the system's largest local exponent. Throws NonFiniteState on blow-up.
Trajectory integrate_flow(const SystemSpec& sys, PhaseSpacePoint x0, double t_final, double dt);

// Least-squares estimate of the local separation exponent: integrates x0 and
// x0 + eps*u (u = unstable direction when a hyperbolic fixed point is found
// near x0, else (1,0)) and fits log separation against t. The fit window
// drops the startup transient (separation below 10*eps) and the nonlinear
// regime (separation >= 1e-2). Throws DegenerateWindow if < 10 samples remain.
double separation_exponent(const SystemSpec& sys, PhaseSpacePoint x0, double eps, double t_horizon,
                           double dt);

// Newton-refines a fixed point from `guess` (central-difference Jacobian,
// tolerance 1e-12 on the field, max 50 iterations) and eigen-decomposes the
// exact linearization there. Throws NoFixedPoint / NotHyperbolic.
HyperbolicData hyperbolic_analysis(const SystemSpec& sys, PhaseSpacePoint guess);

// Samples the level set {h = E} of a potential-type system with
// n_samples_per_branch points per sign branch. The allowed q-range is found
// by root-bracketing E - V(q) = 0 and refined by bisection, so every sample
// satisfies |h - E| <= 1e-12 and the turning points carry p = 0 exactly.
// Throws EmptyLevelSet when E < min V on the search window,
// std::invalid_argument if sys is not potential-type.
SeparatrixCurve separatrix(const SystemSpec& sys, double energy, std::size_t n_samples_per_branch);

// Minimum Euclidean distance from a phase-space point to the sampled curve.
double distance_to_curve(const SeparatrixCurve& curve, PhaseSpacePoint x);

}  // namespace ehrenfest

#endif  // EHRENFEST_CLASSICAL_HPP
