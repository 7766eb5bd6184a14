#include "ehrenfest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ehrenfest/detail/kahan.hpp"
#include "ehrenfest/text.hpp"

namespace ehrenfest {

namespace {

// Golden-section maximization of g on an adaptively expanded bracket around
// x0, clamped to [lo, hi]. Robust against the roundoff-flat plateau near a
// tight optimum: the interval keeps shrinking regardless of noise.
double golden_max(const std::function<double(double)>& g, double x0, double step, double lo,
                  double hi, double* achieved) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::max(lo, x0 - step);
  double b = std::min(hi, x0 + step);
  double g_mid = g(x0);
  for (int grow = 0; grow < 10; ++grow) {
    double ga = g(a), gb = g(b);
    if (g_mid >= ga && g_mid >= gb) break;
    if (ga > gb) {
      b = x0;
      g_mid = ga;
      x0 = a;
      a = std::max(lo, a - 2.0 * step);
      if (x0 == lo) break;
    } else {
      a = x0;
      g_mid = gb;
      x0 = b;
      b = std::min(hi, b + 2.0 * step);
      if (x0 == hi) break;
    }
    step *= 2.0;
  }

  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 90 && (b - a) > 0.0; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = g(x1);
    }
  }
  double x_best = (f1 > f2) ? x1 : x2;
  double f_best = std::max(f1, f2);
  if (achieved != nullptr) *achieved = f_best;
  return x_best;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return (v.size() % 2 == 1) ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

double gaussian_family_overlap(const Wavefunction& psi, double q, double p,
                               std::complex<double> width) {
  const double hbar = psi.hbar;
  const double re_w = width.real();
  if (!(re_w > 0.0)) return 0.0;
  const double dx = psi.grid.dx();
  const double amp = std::pow(re_w / (std::numbers::pi * hbar), 0.25);

  // The probe's Gaussian factor drops below 1e-31 outside this window.
  double half_width = 12.0 * std::sqrt(hbar / re_w);
  auto n = static_cast<std::ptrdiff_t>(psi.grid.n);
  auto j_lo = static_cast<std::ptrdiff_t>(std::ceil((q - half_width - psi.grid.x_min) / dx));
  auto j_hi = static_cast<std::ptrdiff_t>(std::floor((q + half_width - psi.grid.x_min) / dx));
  j_lo = std::max<std::ptrdiff_t>(j_lo, 0);
  j_hi = std::min<std::ptrdiff_t>(j_hi, n - 1);

  detail::ComplexKahanAccumulator acc;
  for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
    double x = psi.grid.point(static_cast<std::size_t>(j));
    double d = x - q;
    // conj of amp * exp(-w d^2 / (2 hbar)) * exp(i p x / hbar)
    std::complex<double> exponent(-re_w * d * d / (2.0 * hbar),
                                  width.imag() * d * d / (2.0 * hbar) - p * x / hbar);
    acc.add(amp * std::exp(exponent) * psi.amplitudes[static_cast<std::size_t>(j)]);
  }
  return std::abs(acc.value() * dx);
}

CoherentFit coherent_fit(const Wavefunction& psi, PhaseSpacePoint guess) {
  const double hbar = psi.hbar;
  const double sqrt_hbar = std::sqrt(hbar);
  const double p_band = psi.grid.nyquist_momentum(hbar);

  // Seed (q, p) at the local Husimi maximum around the guess.
  double q0 = guess.q, p0 = guess.p;
  {
    double best = -1.0;
    const int m = 8;
    for (int iq = -m; iq <= m; ++iq) {
      for (int ip = -m; ip <= m; ++ip) {
        double q = guess.q + 0.5 * sqrt_hbar * iq;
        double p = guess.p + 0.5 * sqrt_hbar * ip;
        if (q <= psi.grid.x_min || q >= psi.grid.x_max || std::abs(p) > p_band) continue;
        double o = gaussian_family_overlap(psi, q, p, 1.0);
        if (o > best) {
          best = o;
          q0 = q;
          p0 = p;
        }
      }
    }
  }

  // Coordinate descent over (q, p, ln Re w, Im w).
  double s = 0.0;   // ln Re w
  double v = 0.0;   // Im w
  double q = q0, p = p0;
  auto objective = [&](double qq, double pp, double ss, double vv) {
    return gaussian_family_overlap(psi, qq, pp, {std::exp(ss), vv});
  };

  const double s_lo = std::log(0.02), s_hi = std::log(50.0);
  const double v_lo = -25.0, v_hi = 25.0;
  double f_best = objective(q, p, s, v);

  constexpr int kMaxSweeps = 60;
  constexpr double kImprovementTol = 1e-12;
  int stall_count = 0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double f_before = f_best;
    q = golden_max([&](double x) { return objective(x, p, s, v); }, q, 0.5 * sqrt_hbar,
                   psi.grid.x_min, psi.grid.x_max, &f_best);
    p = golden_max([&](double x) { return objective(q, x, s, v); }, p, 0.5 * sqrt_hbar, -p_band,
                   p_band, &f_best);
    s = golden_max([&](double x) { return objective(q, p, x, v); }, s, 0.4, s_lo, s_hi, &f_best);
    v = golden_max([&](double x) { return objective(q, p, s, x); }, v, 0.4, v_lo, v_hi, &f_best);

    double improvement = f_best - f_before;
    if (improvement < kImprovementTol) {
      // Normalized overlap gradient; small means we sit at an optimum.
      double hq = 1e-7 * std::max(sqrt_hbar, 1e-6);
      double gq = (objective(q + hq, p, s, v) - objective(q - hq, p, s, v)) / (2 * hq) * sqrt_hbar;
      double gp = (objective(q, p + hq, s, v) - objective(q, p - hq, s, v)) / (2 * hq) * sqrt_hbar;
      double gs = (objective(q, p, s + 1e-7, v) - objective(q, p, s - 1e-7, v)) / 2e-7;
      double gv = (objective(q, p, s, v + 1e-7) - objective(q, p, s, v - 1e-7)) / 2e-7;
      double grad = std::max({std::abs(gq), std::abs(gp), std::abs(gs), std::abs(gv)});
      if (grad <= 1e-5) break;
      if (++stall_count >= 3) {
        CoherentFit best;
        best.center = {q, p};
        best.width = {std::exp(s), v};
        best.overlap = std::min(f_best, 1.0);
        best.residual = std::sqrt(std::max(0.0, 1.0 - best.overlap * best.overlap));
        throw OptimizerStalled("coherent_fit: no improvement for 3 sweeps away from an optimum",
                               best);
      }
    } else {
      stall_count = 0;
    }
  }

  CoherentFit fit;
  fit.center = {q, p};
  fit.width = {std::exp(s), v};
  fit.overlap = std::min(f_best, 1.0);
  double defect = 1.0 - fit.overlap;
  // Below a few ulp the defect is summation roundoff, not signal.
  if (defect <= 8.0 * std::numeric_limits<double>::epsilon()) {
    fit.residual = 0.0;
  } else {
    fit.residual = std::sqrt(defect * (1.0 + fit.overlap));
  }
  return fit;
}

LocalizationMetrics localization_metrics(const Wavefunction& psi, const SeparatrixCurve* curve,
                                         double tube_radius) {
  LocalizationMetrics out;
  out.delta_q = moments(psi).delta_q;

  detail::KahanAccumulator quartic;
  for (const auto& z : psi.amplitudes) quartic.add(std::norm(z) * std::norm(z));
  double p4 = quartic.value() * psi.grid.dx();
  out.inverse_participation_ratio = p4 > 0.0 ? 1.0 / p4 : 0.0;

  if (curve != nullptr) {
    double sqrt_hbar = std::sqrt(psi.hbar);
    double margin = tube_radius + 6.0 * sqrt_hbar;
    double q_lo = std::numeric_limits<double>::infinity(), q_hi = -q_lo;
    double p_lo = q_lo, p_hi = -q_lo;
    for (const auto& pt : curve->upper) {
      q_lo = std::min(q_lo, pt.q);
      q_hi = std::max(q_hi, pt.q);
      p_lo = std::min(p_lo, pt.p);
      p_hi = std::max(p_hi, pt.p);
    }
    for (const auto& pt : curve->lower) {
      p_lo = std::min(p_lo, pt.p);
      p_hi = std::max(p_hi, pt.p);
    }
    double spacing = sqrt_hbar / 3.0;
    auto nq = static_cast<std::size_t>(std::ceil((q_hi - q_lo + 2 * margin) / spacing)) + 1;
    auto np = static_cast<std::size_t>(std::ceil((p_hi - p_lo + 2 * margin) / spacing)) + 1;
    auto field = husimi(psi, uniform_lattice(q_lo - margin, q_hi + margin, nq),
                        uniform_lattice(p_lo - margin, p_hi + margin, np));
    out.tube_mass = tube_mass(field, *curve, tube_radius);
  }
  return out;
}

double egorov_error(const PotentialSpec& potential, const std::vector<double>& f_coefficients,
                    PhaseSpacePoint start, double t, double hbar, double dt, const GridSpec& grid) {
  if (!(t >= 0.0)) throw std::invalid_argument("egorov_error: t must be >= 0");

  SystemSpec sys = SystemSpec::potential_well(potential);
  Wavefunction psi0 = make_coherent_state(grid, hbar, start.q, start.p);

  ComplexPolynomial f(f_coefficients.begin(), f_coefficients.end());
  double quantum, classical_q;
  if (t == 0.0) {
    quantum = expectation_diffop(psi0, {f}).real();
    classical_q = start.q;
  } else {
    // Shared time grid: both propagators take the same number of kicks of the
    // same size, so the quadratic-potential case agrees to roundoff.
    auto n_steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
    if (n_steps == 0) n_steps = 1;
    double h = t / static_cast<double>(n_steps);
    auto record = evolve_split_operator(psi0, potential, h, n_steps, 0);
    quantum = expectation_diffop(record.final_state(), {f}).real();
    classical_q = integrate_flow(sys, start, t, std::min(dt, t)).final_point().q;
  }

  double f_classical = 0.0;
  for (std::size_t k = f_coefficients.size(); k-- > 0;)
    f_classical = f_classical * classical_q + f_coefficients[k];
  return std::abs(quantum - f_classical);
}

RevivalResult revival_detector(const EvolutionRecord& record, double t_a, double t_b) {
  if (record.times.size() < 3)
    throw WindowOutOfRange("revival_detector: record too short");
  if (!(t_a < t_b) || t_a < record.times.front() - 1e-12 || t_b > record.times.back() + 1e-12)
    throw WindowOutOfRange("revival_detector: window [" + format_double(t_a) + ", " +
                           format_double(t_b) + "] outside record [" +
                           format_double(record.times.front()) + ", " +
                           format_double(record.times.back()) + "]");

  std::vector<double> window_abs;
  std::size_t i_lo = record.times.size(), i_hi = 0;
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    if (record.times[i] >= t_a && record.times[i] <= t_b) {
      window_abs.push_back(std::abs(record.autocorrelation[i]));
      i_lo = std::min(i_lo, i);
      i_hi = std::max(i_hi, i);
    }
  }
  RevivalResult out;
  out.baseline = median(window_abs);

  double threshold = out.baseline + 0.1;
  for (std::size_t i = std::max<std::size_t>(i_lo, 1); i <= i_hi && i + 1 < record.times.size();
       ++i) {
    double h = std::abs(record.autocorrelation[i]);
    if (h <= threshold) continue;
    if (h > std::abs(record.autocorrelation[i - 1]) && h > std::abs(record.autocorrelation[i + 1])) {
      if (!out.peak_time || h > out.peak_height) {  // strict >, so ties keep the earliest
        out.peak_time = record.times[i];
        out.peak_height = h;
      }
    }
  }
  return out;
}

ScalingReport hbar_sweep(std::vector<double> hbar_values,
                         const std::function<double(double)>& diagnostic) {
  if (hbar_values.size() < 3)
    throw std::invalid_argument("hbar_sweep: need at least 3 hbar values");
  std::sort(hbar_values.begin(), hbar_values.end(), std::greater<>());
  for (double h : hbar_values)
    if (!(h > 0.0)) throw std::invalid_argument("hbar_sweep: hbar values must be positive");
  if (hbar_values.front() / hbar_values.back() < 100.0 * (1.0 - 1e-9))
    throw std::invalid_argument("hbar_sweep: values must span at least 2 decades");

  auto n = static_cast<std::ptrdiff_t>(hbar_values.size());
  std::vector<double> values(hbar_values.size(), 0.0);
  std::vector<std::string> failures(hbar_values.size());
  std::vector<std::string> failure_kinds(hbar_values.size());

  // Independent runs; results land in per-hbar slots so the outcome does not
  // depend on scheduling.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    try {
      values[idx] = diagnostic(hbar_values[idx]);
    } catch (const SimulationError& e) {
      failure_kinds[idx] = e.kind();
      failures[idx] = e.what();
    } catch (const std::exception& e) {
      failure_kinds[idx] = "SweepFailure";
      failures[idx] = e.what();
    }
  }
  for (std::size_t i = 0; i < hbar_values.size(); ++i) {
    if (!failure_kinds[i].empty())
      throw SimulationError(failure_kinds[i],
                            "hbar=" + format_double(hbar_values[i]) + ": " + failures[i]);
    if (!(values[i] > 0.0))
      throw SimulationError("SweepFailure", "hbar=" + format_double(hbar_values[i]) +
                                                ": diagnostic value " + format_double(values[i]) +
                                                " not positive, cannot fit a power law");
  }

  ScalingReport report;
  report.hbar_values = std::move(hbar_values);
  report.diagnostic_values = values;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  auto m = static_cast<double>(report.hbar_values.size());
  for (std::size_t i = 0; i < report.hbar_values.size(); ++i) {
    double x = std::log(report.hbar_values[i]);
    double y = std::log(report.diagnostic_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double intercept = (sy - report.exponent * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < report.hbar_values.size(); ++i) {
    double r = std::log(report.diagnostic_values[i]) -
               (intercept + report.exponent * std::log(report.hbar_values[i]));
    rss += r * r;
  }
  report.fit_residual = std::sqrt(rss / m);
  return report;
}

}  // namespace ehrenfest
