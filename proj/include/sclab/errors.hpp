#pragma once

#include <stdexcept>
#include <string>

namespace sclab {

// Base class for every failure the library raises deliberately.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SCLAB_DEFINE_ERROR(Name)                                    \
  struct Name : Error {                                             \
    explicit Name(const std::string& what) : Error(what) {}         \
  }

SCLAB_DEFINE_ERROR(GridMismatch);             // fields live on incompatible grids
SCLAB_DEFINE_ERROR(DomainMismatch);           // object does not fit the requested domain
SCLAB_DEFINE_ERROR(WindowTooSmall);           // dual-norm window has < 3 interior nodes
SCLAB_DEFINE_ERROR(CflViolation);             // requested step violates the stability bound
SCLAB_DEFINE_ERROR(SingularWeight);           // conductivity vanishes where flux must be carried
SCLAB_DEFINE_ERROR(DegenerateConductivity);   // sigma <= 0 inside the clipped state interval
SCLAB_DEFINE_ERROR(RankineHugoniotViolation); // shock speed inconsistent with its traces
SCLAB_DEFINE_ERROR(SupportViolation);         // test function not supported inside the domain
SCLAB_DEFINE_ERROR(ReductionFailed);          // no nonnegative atomic representation found
SCLAB_DEFINE_ERROR(SeparationViolated);       // atom families not uniformly separated
SCLAB_DEFINE_ERROR(CurveCrossing);            // characteristic strips collided
SCLAB_DEFINE_ERROR(ShootingFailed);           // no monotone connecting profile exists
SCLAB_DEFINE_ERROR(DecompositionDefect);      // drift part of the cost is not constant in x
SCLAB_DEFINE_ERROR(NonfiniteValue);           // NaN/inf appeared where a finite number is required
SCLAB_DEFINE_ERROR(SingularConductivity);     // entropy integrand non-integrable near a sigma zero
SCLAB_DEFINE_ERROR(NotImplemented);

#undef SCLAB_DEFINE_ERROR

// Configuration failures carry location info so the CLI can point at the
// offending line of the experiment file.
struct ConfigError : Error {
  int line = -1;
  std::string key;
  ConfigError(const std::string& what, int line_ = -1, std::string key_ = {})
      : Error(what), line(line_), key(std::move(key_)) {}
};

}  // namespace sclab
