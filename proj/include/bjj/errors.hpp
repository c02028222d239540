#pragma once

#include <stdexcept>
#include <string>

namespace bjj {

// Configuration / input validation problems (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Numerical failures (CLI exit code 3).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A trajectory ran into |Z| = 1, where the phase equations diverge and the
// two-mode reduction stops being meaningful.
class PoleApproach : public NumericalError {
  public:
    PoleApproach(double time, char species, double z)
        : NumericalError("pole approach: |Z_" + std::string(1, species) +
                         "| = " + std::to_string(std::abs(z)) + " at t = " +
                         std::to_string(time)),
          time_(time), species_(species), z_(z) {}

    double time() const { return time_; }
    char species() const { return species_; }
    double z() const { return z_; }

  private:
    double time_;
    char species_;
    double z_;
};

// The adaptive step controller drove the step size below the representable
// resolution (usually a sign of non-finite derivatives).
class StepFailure : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// An operation that requires symmetric parameters was called with
// asymmetric ones.
class SymmetryViolation : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// Newton iteration failed to converge for a seed.
class NoConvergence : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// A scan found no boundary in the requested range.
class NoTransition : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Classification thresholds straddled; carries the margin report.
class AmbiguousLabel : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// A supplied spatial mode is not unit-normalized.
class NormalizationError : public ConfigError {
  public:
    NormalizationError(const std::string& what, double measured_norm)
        : ConfigError(what), measured_norm_(measured_norm) {}

    double measured_norm() const { return measured_norm_; }

  private:
    double measured_norm_;
};

// Bad spatial grid (non-monotone, or array lengths disagree).
class GridError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// The symmetric/antisymmetric pair does not combine into left/right
// localized modes.
class DegenerateModes : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Filesystem problems (CLI exit code 4).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace bjj
