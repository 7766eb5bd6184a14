#include "ehrenfest/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ehrenfest/errors.hpp"

namespace ehrenfest {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 50;

// One velocity-Verlet step for h = p^2/2 + V(q). `force` must be -V'.
template <class Force>
PhaseSpacePoint verlet_step(PhaseSpacePoint x, double h, Force&& force) {
  double p_half = x.p + 0.5 * h * force(x.q);
  double q_next = x.q + h * p_half;
  double p_next = p_half + 0.5 * h * force(q_next);
  return {q_next, p_next};
}

Trajectory sample_dilation(PhaseSpacePoint x0, double t_final, std::size_t n_steps) {
  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.points.reserve(n_steps + 1);
  traj.energy.reserve(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    double t = t_final * static_cast<double>(i) / static_cast<double>(n_steps);
    PhaseSpacePoint x{x0.q * std::exp(t), x0.p * std::exp(-t)};
    traj.times.push_back(t);
    traj.points.push_back(x);
    traj.energy.push_back(x.q * x.p);
  }
  return traj;
}

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace

Trajectory integrate_flow(const SystemSpec& sys, PhaseSpacePoint x0, double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_flow: dt must be positive");
  if (!x0.finite()) throw NonFiniteState("integrate_flow: initial point not finite");
  double span = std::abs(t_final);
  if (span < dt) throw std::invalid_argument("integrate_flow: need dt <= |t_final|");

  auto n_steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-12));
  if (n_steps == 0) n_steps = 1;

  if (sys.is_dilation()) return sample_dilation(x0, t_final, n_steps);

  double h = t_final / static_cast<double>(n_steps);
  auto force = [&](double q) { return vector_field(sys, {q, 0.0}).p; };

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.points.reserve(n_steps + 1);
  traj.energy.reserve(n_steps + 1);
  traj.times.push_back(0.0);
  traj.points.push_back(x0);
  traj.energy.push_back(hamiltonian_value(sys, x0));

  PhaseSpacePoint x = x0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    x = verlet_step(x, h, force);
    if (!x.finite())
      throw NonFiniteState("integrate_flow: state diverged at t = " +
                           std::to_string(h * static_cast<double>(i)));
    traj.times.push_back(i == n_steps ? t_final : h * static_cast<double>(i));
    traj.points.push_back(x);
    traj.energy.push_back(hamiltonian_value(sys, x));
  }
  return traj;
}

double separation_exponent(const SystemSpec& sys, PhaseSpacePoint x0, double eps, double t_horizon,
                           double dt) {
  if (!(eps > 0.0)) throw std::invalid_argument("separation_exponent: eps must be positive");

  std::array<double, 2> dir{1.0, 0.0};
  try {
    dir = hyperbolic_analysis(sys, x0).unstable;
  } catch (const SimulationError&) {
    // No hyperbolic point near x0: perturb along q.
  }
  PhaseSpacePoint x1{x0.q + eps * dir[0], x0.p + eps * dir[1]};

  Trajectory a = integrate_flow(sys, x0, t_horizon, dt);
  Trajectory b = integrate_flow(sys, x1, t_horizon, dt);

  std::vector<double> sep(a.times.size());
  for (std::size_t i = 0; i < sep.size(); ++i) sep[i] = phase_distance(a.points[i], b.points[i]);

  // Window: skip the startup transient (separation still below 10*eps; when
  // it never grows past that there is no transient to skip), stop at the
  // nonlinear saturation threshold 1e-2.
  std::size_t start = 0;
  for (std::size_t i = 0; i < sep.size(); ++i) {
    if (sep[i] >= 10.0 * eps) {
      start = i;
      break;
    }
  }
  std::vector<double> t_fit, log_sep;
  for (std::size_t i = start; i < sep.size(); ++i) {
    if (sep[i] >= 1e-2) break;
    if (sep[i] <= 0.0) continue;
    t_fit.push_back(a.times[i]);
    log_sep.push_back(std::log(sep[i]));
  }
  if (t_fit.size() < 10)
    throw DegenerateWindow("separation_exponent: fit window has " + std::to_string(t_fit.size()) +
                           " samples (< 10)");
  return fit_slope(t_fit, log_sep);
}

HyperbolicData hyperbolic_analysis(const SystemSpec& sys, PhaseSpacePoint guess) {
  PhaseSpacePoint x = guess;
  const double fd = 1e-6;  // central-difference step for the Newton Jacobian

  bool converged = false;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    PhaseSpacePoint f = vector_field(sys, x);
    if (std::max(std::abs(f.q), std::abs(f.p)) <= kNewtonTol) {
      converged = true;
      break;
    }
    PhaseSpacePoint fqp = vector_field(sys, {x.q + fd, x.p});
    PhaseSpacePoint fqm = vector_field(sys, {x.q - fd, x.p});
    PhaseSpacePoint fpp = vector_field(sys, {x.q, x.p + fd});
    PhaseSpacePoint fpm = vector_field(sys, {x.q, x.p - fd});
    double j00 = (fqp.q - fqm.q) / (2 * fd), j01 = (fpp.q - fpm.q) / (2 * fd);
    double j10 = (fqp.p - fqm.p) / (2 * fd), j11 = (fpp.p - fpm.p) / (2 * fd);
    double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-14)
      throw NoFixedPoint("hyperbolic_analysis: singular Jacobian during Newton refinement");
    x.q -= (j11 * f.q - j01 * f.p) / det;
    x.p -= (-j10 * f.q + j00 * f.p) / det;
    if (!x.finite()) throw NoFixedPoint("hyperbolic_analysis: Newton iteration diverged");
  }
  if (!converged) {
    PhaseSpacePoint f = vector_field(sys, x);
    if (std::max(std::abs(f.q), std::abs(f.p)) > kNewtonTol)
      throw NoFixedPoint("hyperbolic_analysis: Newton did not converge in 50 iterations");
  }

  // Exact linearization at the refined point.
  auto j = vector_field_jacobian(sys, x);
  double tr = j[0] + j[3];
  double det = j[0] * j[3] - j[1] * j[2];
  double scale = std::max({std::abs(j[0]), std::abs(j[1]), std::abs(j[2]), std::abs(j[3]), 1.0});
  // A +/-lambda real pair needs zero trace and negative determinant.
  if (std::abs(tr) > 1e-9 * scale || det >= -1e-18 * scale * scale)
    throw NotHyperbolic("hyperbolic_analysis: eigenvalues are not a real +/-lambda pair");
  double lambda = std::sqrt(-det);

  auto eigvec = [&](double mu) -> std::array<double, 2> {
    // (J - mu I) v = 0; pick the row with the larger pivot.
    std::array<double, 2> v{};
    if (std::abs(j[1]) + std::abs(j[0] - mu) >= std::abs(j[2]) + std::abs(j[3] - mu))
      v = {j[1], mu - j[0]};
    else
      v = {mu - j[3], j[2]};
    double nrm = std::hypot(v[0], v[1]);
    v[0] /= nrm;
    v[1] /= nrm;
    // Deterministic orientation: first nonzero component positive.
    if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
      v[0] = -v[0];
      v[1] = -v[1];
    }
    return v;
  };

  HyperbolicData out;
  out.fixed_point = x;
  out.lambda = lambda;
  out.unstable = eigvec(lambda);
  out.stable = eigvec(-lambda);
  return out;
}

SeparatrixCurve separatrix(const SystemSpec& sys, double energy, std::size_t n_samples_per_branch) {
  const PotentialSpec* v = sys.potential();
  if (v == nullptr) throw std::invalid_argument("separatrix: system must be potential-type");
  if (n_samples_per_branch < 2)
    throw std::invalid_argument("separatrix: need at least 2 samples per branch");

  // Root-bracket E - V(q) = 0 on a wide scan window, then bisect to machine
  // precision so the turning points sit on the level set exactly.
  const double q_scan = 16.0;
  const std::size_t cells = 1 << 14;
  const double cell = 2.0 * q_scan / static_cast<double>(cells);
  auto g = [&](double q) { return energy - v->value(q); };

  std::vector<double> roots;
  double min_v = std::numeric_limits<double>::infinity();
  double prev_q = -q_scan, prev_g = g(prev_q);
  for (std::size_t i = 1; i <= cells; ++i) {
    double q = -q_scan + cell * static_cast<double>(i);
    double gq = g(q);
    min_v = std::min(min_v, v->value(q));
    if (prev_g == 0.0) {
      roots.push_back(prev_q);
    } else if (prev_g * gq < 0.0) {
      double lo = prev_q, hi = q, glo = prev_g;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if ((glo <= 0.0) == (gm <= 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      // Keep the side where the region is classically allowed (g >= 0).
      roots.push_back(g(lo) >= 0.0 ? lo : hi);
    }
    prev_q = q;
    prev_g = gq;
  }
  if (prev_g == 0.0) roots.push_back(prev_q);

  if (roots.empty()) {
    if (energy < min_v)
      throw EmptyLevelSet("separatrix: level set {h = E} is empty, E below min V");
    throw std::invalid_argument("separatrix: no turning points inside the scan window");
  }

  // The allowed interval containing the global minimum of V found on the
  // scan. Only roots where g turns strictly negative on the far side bound
  // the interval; interior tangencies (the separatrix waist at the fixed
  // point) do not end it.
  double q_min_v = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= cells; ++i) {
    double q = -q_scan + cell * static_cast<double>(i);
    if (v->value(q) < best) {
      best = v->value(q);
      q_min_v = q;
    }
  }
  double q_lo = -q_scan, q_hi = q_scan;
  for (double r : roots) {
    if (r <= q_min_v && g(r - cell) < 0.0) q_lo = std::max(q_lo, r);
    if (r >= q_min_v && g(r + cell) < 0.0) q_hi = std::min(q_hi, r);
  }

  SeparatrixCurve curve;
  curve.energy = energy;
  curve.upper.reserve(n_samples_per_branch);
  curve.lower.reserve(n_samples_per_branch);
  for (std::size_t i = 0; i < n_samples_per_branch; ++i) {
    double q = q_lo + (q_hi - q_lo) * static_cast<double>(i) /
                          static_cast<double>(n_samples_per_branch - 1);
    double p = std::sqrt(2.0 * std::max(0.0, g(q)));
    curve.upper.push_back({q, p});
    curve.lower.push_back({q, -p});
  }
  return curve;
}

double distance_to_curve(const SeparatrixCurve& curve, PhaseSpacePoint x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : curve.upper) best = std::min(best, phase_distance(pt, x));
  for (const auto& pt : curve.lower) best = std::min(best, phase_distance(pt, x));
  return best;
}

}  // namespace ehrenfest
