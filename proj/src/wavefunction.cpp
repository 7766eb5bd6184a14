#include "ehrenfest/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ehrenfest/detail/kahan.hpp"
#include "ehrenfest/errors.hpp"
#include "ehrenfest/fft.hpp"
#include "ehrenfest/text.hpp"

namespace ehrenfest {

namespace {

constexpr double kContainmentAtConstruction = 1e-8;
constexpr double kContainmentForDiagnostics = 1e-4;

std::complex<double> eval_poly(const ComplexPolynomial& c, double x) {
  std::complex<double> r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

void check_same_grid(const Wavefunction& a, const Wavefunction& b, const char* who) {
  if (!(a.grid == b.grid) || a.hbar != b.hbar)
    throw GridMismatch(std::string(who) + ": states live on different grids or hbar");
}

}  // namespace

EnvelopeSpec EnvelopeSpec::standard_gaussian() { return EnvelopeSpec(Kind::Standard, 1.0); }

EnvelopeSpec EnvelopeSpec::scaled_gaussian(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("EnvelopeSpec: width must be positive");
  return EnvelopeSpec(Kind::Scaled, s);
}

EnvelopeSpec EnvelopeSpec::custom_samples(double eta_min, double eta_max,
                                          std::vector<std::complex<double>> values) {
  if (values.size() < 8) throw std::invalid_argument("EnvelopeSpec: need at least 8 samples");
  if (!(eta_min < eta_max)) throw std::invalid_argument("EnvelopeSpec: bad eta range");
  EnvelopeSpec env(Kind::Custom, 1.0);
  env.eta_min_ = eta_min;
  env.eta_step_ = (eta_max - eta_min) / static_cast<double>(values.size() - 1);
  env.samples_ = std::move(values);

  detail::KahanAccumulator mass;
  for (const auto& v : env.samples_) mass.add(std::norm(v));
  double total = mass.value() * env.eta_step_;
  if (!(total > 0.0)) throw std::invalid_argument("EnvelopeSpec: samples have zero norm");
  double scale = 1.0 / std::sqrt(total);
  for (auto& v : env.samples_) v *= scale;
  return env;
}

std::complex<double> EnvelopeSpec::evaluate(double eta) const {
  switch (kind_) {
    case Kind::Standard:
      return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * eta * eta);
    case Kind::Scaled: {
      double s2 = width_ * width_;
      return std::pow(std::numbers::pi * s2, -0.25) * std::exp(-0.5 * eta * eta / s2);
    }
    case Kind::Custom: {
      double u = (eta - eta_min_) / eta_step_;
      if (u < 0.0 || u > static_cast<double>(samples_.size() - 1)) return 0.0;
      auto i1 = static_cast<std::ptrdiff_t>(u);
      auto last = static_cast<std::ptrdiff_t>(samples_.size()) - 1;
      double t = u - static_cast<double>(i1);
      auto at = [&](std::ptrdiff_t i) {
        return samples_[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last))];
      };
      // Catmull-Rom through the four surrounding samples.
      std::complex<double> p0 = at(i1 - 1), p1 = at(i1), p2 = at(i1 + 1), p3 = at(i1 + 2);
      return 0.5 * (2.0 * p1 + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (t * t) +
                    (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * (t * t * t));
    }
  }
  return 0.0;
}

Wavefunction make_coherent_state(const GridSpec& grid, double hbar, double q, double p,
                                 const EnvelopeSpec& envelope) {
  grid.validate();
  if (!(hbar > 0.0)) throw std::invalid_argument("make_coherent_state: hbar must be positive");

  Wavefunction psi;
  psi.grid = grid;
  psi.hbar = hbar;
  psi.amplitudes.resize(grid.n);
  double sqrt_hbar = std::sqrt(hbar);
  double amp = std::pow(hbar, -0.25);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double x = grid.point(j);
    double phase = p * x / hbar;
    psi.amplitudes[j] =
        amp * envelope.evaluate((x - q) / sqrt_hbar) * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  psi = normalized(std::move(psi));
  double edge = boundary_mass(psi);
  if (!(edge < kContainmentAtConstruction))
    throw MassEscape("make_coherent_state: boundary mass " + format_double(edge) +
                     " >= 1e-8; state too close to the grid edge");
  return psi;
}

double norm(const Wavefunction& psi) {
  detail::KahanAccumulator acc;
  for (const auto& z : psi.amplitudes) acc.add(std::norm(z));
  return std::sqrt(acc.value() * psi.grid.dx());
}

std::complex<double> inner_product(const Wavefunction& psi, const Wavefunction& phi) {
  check_same_grid(psi, phi, "inner_product");
  detail::ComplexKahanAccumulator acc;
  for (std::size_t j = 0; j < psi.amplitudes.size(); ++j)
    acc.add(std::conj(psi.amplitudes[j]) * phi.amplitudes[j]);
  return acc.value() * psi.grid.dx();
}

double boundary_mass(const Wavefunction& psi) {
  std::size_t n = psi.grid.n;
  std::size_t edge = std::max<std::size_t>(1, n / 40);  // 2.5% of points per side
  detail::KahanAccumulator acc;
  for (std::size_t j = 0; j < edge; ++j) {
    acc.add(std::norm(psi.amplitudes[j]));
    acc.add(std::norm(psi.amplitudes[n - 1 - j]));
  }
  return acc.value() * psi.grid.dx();
}

Wavefunction normalized(Wavefunction psi) {
  double nrm = norm(psi);
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw std::invalid_argument("normalized: state has zero or non-finite norm");
  double inv = 1.0 / nrm;
  for (auto& z : psi.amplitudes) z *= inv;
  return psi;
}

Moments moments(const Wavefunction& psi) {
  double edge = boundary_mass(psi);
  if (edge > kContainmentForDiagnostics)
    throw MassEscape("moments: boundary mass " + format_double(edge) + " > 1e-4");

  double dx = psi.grid.dx();
  detail::KahanAccumulator mass_acc, q_acc, q2_acc;
  for (std::size_t j = 0; j < psi.grid.n; ++j) {
    double w = std::norm(psi.amplitudes[j]) * dx;
    double x = psi.grid.point(j);
    mass_acc.add(w);
    q_acc.add(w * x);
    q2_acc.add(w * x * x);
  }
  double mass = mass_acc.value();

  // Momentum-space density: |F_m|^2 dx^2 / L sums to the grid norm^2.
  std::vector<std::complex<double>> f = psi.amplitudes;
  Fft fft(psi.grid.n);
  fft.forward(f);
  double wscale = dx * dx / psi.grid.length();
  detail::KahanAccumulator p_acc, p2_acc;
  for (std::size_t m = 0; m < psi.grid.n; ++m) {
    double pm = psi.hbar * psi.grid.wavenumber(m);
    double w = std::norm(f[m]) * wscale;
    p_acc.add(w * pm);
    p2_acc.add(w * pm * pm);
  }

  Moments out;
  out.q_mean = q_acc.value() / mass;
  out.p_mean = p_acc.value() / mass;
  out.delta_q = std::sqrt(std::max(0.0, q2_acc.value() / mass - out.q_mean * out.q_mean));
  out.delta_p = std::sqrt(std::max(0.0, p2_acc.value() / mass - out.p_mean * out.p_mean));
  out.uncertainty_product = out.delta_q * out.delta_p;
  return out;
}

std::complex<double> expectation_diffop(const Wavefunction& psi,
                                        const std::vector<ComplexPolynomial>& a) {
  if (a.size() > 3)
    throw OrderUnsupported("expectation_diffop: derivative order " + std::to_string(a.size() - 1) +
                           " > 2");

  std::size_t n = psi.grid.n;
  std::vector<std::complex<double>> h_psi(n, 0.0);

  if (!a.empty() && !a[0].empty()) {
    for (std::size_t j = 0; j < n; ++j)
      h_psi[j] += eval_poly(a[0], psi.grid.point(j)) * psi.amplitudes[j];
  }

  Fft fft(n);
  std::vector<std::complex<double>> f;
  if (a.size() > 1) {
    f = psi.amplitudes;
    fft.forward(f);
  }
  for (std::size_t order = 1; order < a.size(); ++order) {
    if (a[order].empty()) continue;
    std::vector<std::complex<double>> d = f;
    for (std::size_t m = 0; m < n; ++m) {
      double pm = psi.hbar * psi.grid.wavenumber(m);
      d[m] *= (order == 1) ? pm : pm * pm;
    }
    fft.inverse(d);
    for (std::size_t j = 0; j < n; ++j) h_psi[j] += eval_poly(a[order], psi.grid.point(j)) * d[j];
  }

  detail::ComplexKahanAccumulator acc;
  for (std::size_t j = 0; j < n; ++j) acc.add(std::conj(psi.amplitudes[j]) * h_psi[j]);
  return acc.value() * psi.grid.dx();
}

std::vector<ComplexPolynomial> kinetic_plus_potential(const std::vector<double>& v_coefficients) {
  std::vector<ComplexPolynomial> a(3);
  a[0].assign(v_coefficients.begin(), v_coefficients.end());
  a[2] = {std::complex<double>(0.5, 0.0)};
  return a;
}

void save_wavefunction(const std::filesystem::path& path, const Wavefunction& psi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_wavefunction: cannot open " + path.string());
  out << "# hbar=" << format_double(psi.hbar) << "\n";
  out << "# xmin=" << format_double(psi.grid.x_min) << "\n";
  out << "# xmax=" << format_double(psi.grid.x_max) << "\n";
  out << "# n=" << psi.grid.n << "\n";
  out << "x,re,im\n";
  for (std::size_t j = 0; j < psi.grid.n; ++j) {
    out << format_double(psi.grid.point(j)) << ',' << format_double(psi.amplitudes[j].real()) << ','
        << format_double(psi.amplitudes[j].imag()) << "\n";
  }
  if (!out) throw std::runtime_error("save_wavefunction: write failed for " + path.string());
}

Wavefunction load_wavefunction(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_wavefunction: cannot open " + path.string());

  Wavefunction psi;
  std::string line;
  bool have_n = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2);
      std::string val = line.substr(eq + 1);
      if (key == "hbar") psi.hbar = parse_double(val);
      else if (key == "xmin") psi.grid.x_min = parse_double(val);
      else if (key == "xmax") psi.grid.x_max = parse_double(val);
      else if (key == "n") {
        psi.grid.n = static_cast<std::size_t>(std::stoull(val));
        have_n = true;
      }
      continue;
    }
    if (line == "x,re,im") break;
    throw std::runtime_error("load_wavefunction: malformed header in " + path.string());
  }
  if (!have_n) throw std::runtime_error("load_wavefunction: missing n header in " + path.string());
  psi.grid.validate();

  psi.amplitudes.reserve(psi.grid.n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string x_s, re_s, im_s;
    if (!std::getline(row, x_s, ',') || !std::getline(row, re_s, ',') || !std::getline(row, im_s))
      throw std::runtime_error("load_wavefunction: malformed row in " + path.string());
    psi.amplitudes.emplace_back(parse_double(re_s), parse_double(im_s));
  }
  if (psi.amplitudes.size() != psi.grid.n)
    throw std::runtime_error("load_wavefunction: row count does not match n in " + path.string());
  return psi;
}

}  // namespace ehrenfest
