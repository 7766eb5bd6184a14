#include "ehrenfest/phase_space.hpp"

#include <stdexcept>

namespace ehrenfest {

namespace {

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  if (c.size() > 1) {
    d.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  } else {
    d.assign(1, 0.0);
  }
  return d;
}

void check_finite_coefficients(const std::vector<double>& c) {
  for (double v : c) {
    if (!std::isfinite(v)) throw std::invalid_argument("potential coefficients must be finite");
  }
}

}  // namespace

PotentialSpec::PotentialSpec(std::vector<double> c, bool is_dw)
    : coeff_(std::move(c)), is_double_well_(is_dw) {
  if (coeff_.empty()) coeff_.assign(1, 0.0);
  dcoeff_ = poly_derivative(coeff_);
  ddcoeff_ = poly_derivative(dcoeff_);
}

PotentialSpec PotentialSpec::double_well() {
  return PotentialSpec({0.0, 0.0, -1.0, 0.0, 1.0}, /*is_dw=*/true);
}

PotentialSpec PotentialSpec::quadratic(double k) {
  if (!std::isfinite(k)) throw std::invalid_argument("quadratic stiffness must be finite");
  return PotentialSpec({0.0, 0.0, 0.5 * k});
}

PotentialSpec PotentialSpec::custom(std::vector<double> coefficients) {
  if (coefficients.size() > kMaxDegree + 1)
    throw std::invalid_argument("custom potential limited to polynomial degree 8");
  check_finite_coefficients(coefficients);
  return PotentialSpec(std::move(coefficients));
}

double PotentialSpec::eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

SystemSpec SystemSpec::harmonic(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("harmonic frequency must be positive");
  return SystemSpec(Harmonic{omega});
}

double hamiltonian_value(const SystemSpec& sys, PhaseSpacePoint x) {
  return sys.visit([&](const auto& kind) -> double {
    using K = std::decay_t<decltype(kind)>;
    if constexpr (std::is_same_v<K, SystemSpec::PotentialWell>) {
      return 0.5 * x.p * x.p + kind.potential.value(x.q);
    } else if constexpr (std::is_same_v<K, SystemSpec::Dilation>) {
      return x.q * x.p;
    } else if constexpr (std::is_same_v<K, SystemSpec::Harmonic>) {
      return 0.5 * x.p * x.p + 0.5 * kind.omega * kind.omega * x.q * x.q;
    } else {
      return 0.5 * x.p * x.p;
    }
  });
}

PhaseSpacePoint vector_field(const SystemSpec& sys, PhaseSpacePoint x) {
  return sys.visit([&](const auto& kind) -> PhaseSpacePoint {
    using K = std::decay_t<decltype(kind)>;
    if constexpr (std::is_same_v<K, SystemSpec::PotentialWell>) {
      return {x.p, -kind.potential.derivative(x.q)};
    } else if constexpr (std::is_same_v<K, SystemSpec::Dilation>) {
      return {x.q, -x.p};
    } else if constexpr (std::is_same_v<K, SystemSpec::Harmonic>) {
      return {x.p, -kind.omega * kind.omega * x.q};
    } else {
      return {x.p, 0.0};
    }
  });
}

std::array<double, 4> vector_field_jacobian(const SystemSpec& sys, PhaseSpacePoint x) {
  return sys.visit([&](const auto& kind) -> std::array<double, 4> {
    using K = std::decay_t<decltype(kind)>;
    if constexpr (std::is_same_v<K, SystemSpec::PotentialWell>) {
      return {0.0, 1.0, -kind.potential.second_derivative(x.q), 0.0};
    } else if constexpr (std::is_same_v<K, SystemSpec::Dilation>) {
      return {1.0, 0.0, 0.0, -1.0};
    } else if constexpr (std::is_same_v<K, SystemSpec::Harmonic>) {
      return {0.0, 1.0, -kind.omega * kind.omega, 0.0};
    } else {
      return {0.0, 1.0, 0.0, 0.0};
    }
  });
}

}  // namespace ehrenfest
