#ifndef EHRENFEST_PHASE_SPACE_HPP
#define EHRENFEST_PHASE_SPACE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

namespace ehrenfest {

// A point (q, p) of the one-degree-of-freedom phase space, dimensionless units.
struct PhaseSpacePoint {
  double q = 0.0;
  double p = 0.0;

  bool finite() const { return std::isfinite(q) && std::isfinite(p); }
};

inline double phase_distance(PhaseSpacePoint a, PhaseSpacePoint b) {
  return std::hypot(a.q - b.q, a.p - b.p);
}

// One-dimensional polynomial potential V(x), stored as coefficients
// c[0] + c[1] x + ... + c[8] x^8. Derivatives are exact (coefficient shift),
// so no numerical differentiation ever enters the force evaluation.
class PotentialSpec {
 public:
  static constexpr std::size_t kMaxDegree = 8;

  // V(x) = x^2 (x^2 - 1), the double well whose top sits at the origin.
  static PotentialSpec double_well();
  // V(x) = k x^2 / 2.
  static PotentialSpec quadratic(double k);
  // Arbitrary polynomial, degree <= 8. Throws std::invalid_argument otherwise.
  static PotentialSpec custom(std::vector<double> coefficients);

  double value(double x) const { return eval(coeff_, x); }
  double derivative(double x) const { return eval(dcoeff_, x); }
  double second_derivative(double x) const { return eval(ddcoeff_, x); }

  const std::vector<double>& coefficients() const { return coeff_; }
  bool is_double_well() const { return is_double_well_; }

 private:
  explicit PotentialSpec(std::vector<double> c, bool is_dw = false);
  static double eval(const std::vector<double>& c, double x);

  std::vector<double> coeff_;
  std::vector<double> dcoeff_;
  std::vector<double> ddcoeff_;
  bool is_double_well_ = false;
};

// The dynamical system under study. Exactly one of the four kinds:
//   PotentialWell  h(q,p) = p^2/2 + V(q)
//   Dilation       h(q,p) = q p
//   Harmonic       h(q,p) = p^2/2 + omega^2 q^2 / 2
//   Free           h(q,p) = p^2/2
class SystemSpec {
 public:
  struct PotentialWell {
    PotentialSpec potential;
  };
  struct Dilation {};
  struct Harmonic {
    double omega;
  };
  struct Free {};

  static SystemSpec potential_well(PotentialSpec v) { return SystemSpec(PotentialWell{std::move(v)}); }
  static SystemSpec double_well() { return potential_well(PotentialSpec::double_well()); }
  static SystemSpec dilation() { return SystemSpec(Dilation{}); }
  static SystemSpec harmonic(double omega);
  static SystemSpec free_particle() { return SystemSpec(Free{}); }

  bool is_dilation() const { return std::holds_alternative<Dilation>(kind_); }
  bool is_potential_well() const { return std::holds_alternative<PotentialWell>(kind_); }
  const PotentialSpec* potential() const {
    auto* w = std::get_if<PotentialWell>(&kind_);
    return w ? &w->potential : nullptr;
  }
  const Harmonic* harmonic_kind() const { return std::get_if<Harmonic>(&kind_); }
  bool is_free() const { return std::holds_alternative<Free>(kind_); }

  template <class Visitor>
  auto visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), kind_);
  }

 private:
  using Kind = std::variant<PotentialWell, Dilation, Harmonic, Free>;
  explicit SystemSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// h(q, p) for the system's Hamiltonian. Total on finite inputs.
double hamiltonian_value(const SystemSpec& sys, PhaseSpacePoint x);

// (dq/dt, dp/dt) = (dh/dp, -dh/dq).
PhaseSpacePoint vector_field(const SystemSpec& sys, PhaseSpacePoint x);

// Jacobian of the vector field, row-major [[d qdot/dq, d qdot/dp],
// [d pdot/dq, d pdot/dp]]. Exact for every system kind (polynomial forces).
std::array<double, 4> vector_field_jacobian(const SystemSpec& sys, PhaseSpacePoint x);

}  // namespace ehrenfest

#endif  // EHRENFEST_PHASE_SPACE_HPP
