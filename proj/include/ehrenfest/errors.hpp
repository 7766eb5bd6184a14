#ifndef EHRENFEST_ERRORS_HPP
#define EHRENFEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ehrenfest {

// Base class for all failures raised by the library. `kind()` gives a stable
// machine-readable tag; the CLI maps kinds onto exit codes.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Classical integration produced NaN/inf (blow-up or step too large).
struct NonFiniteState : SimulationError {
  explicit NonFiniteState(const std::string& what) : SimulationError("NonFiniteState", what) {}
};

// Separation-exponent fit window ended up with too few samples.
struct DegenerateWindow : SimulationError {
  explicit DegenerateWindow(const std::string& what) : SimulationError("DegenerateWindow", what) {}
};

// Linearization eigenvalues are not a real +/-lambda pair.
struct NotHyperbolic : SimulationError {
  explicit NotHyperbolic(const std::string& what) : SimulationError("NotHyperbolic", what) {}
};

// Newton refinement of a fixed point did not converge.
struct NoFixedPoint : SimulationError {
  explicit NoFixedPoint(const std::string& what) : SimulationError("NoFixedPoint", what) {}
};

// Requested energy level set {h = E} is empty.
struct EmptyLevelSet : SimulationError {
  explicit EmptyLevelSet(const std::string& what) : SimulationError("EmptyLevelSet", what) {}
};

// Too much probability mass near the grid boundary; the periodic grid no
// longer represents the state faithfully.
struct MassEscape : SimulationError {
  explicit MassEscape(const std::string& what) : SimulationError("MassEscape", what) {}
};

// Two wavefunctions live on different grids (or different hbar).
struct GridMismatch : SimulationError {
  explicit GridMismatch(const std::string& what) : SimulationError("GridMismatch", what) {}
};

// Differential operator of order > 2 requested.
struct OrderUnsupported : SimulationError {
  explicit OrderUnsupported(const std::string& what) : SimulationError("OrderUnsupported", what) {}
};

// Requested momentum exceeds the grid's Nyquist band |p| <= pi*hbar/dx.
struct MomentumOutOfBand : SimulationError {
  explicit MomentumOutOfBand(const std::string& what) : SimulationError("MomentumOutOfBand", what) {}
};

// Revival search window is not contained in the evolution record.
struct WindowOutOfRange : SimulationError {
  explicit WindowOutOfRange(const std::string& what) : SimulationError("WindowOutOfRange", what) {}
};

// Experiment configuration rejected; message names the offending field.
struct ConfigInvalid : SimulationError {
  explicit ConfigInvalid(const std::string& what) : SimulationError("ConfigInvalid", what) {}
};

}  // namespace ehrenfest

#endif  // EHRENFEST_ERRORS_HPP
