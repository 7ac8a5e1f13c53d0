#pragma once

#include <stdexcept>
#include <string>

namespace fpmass {

// Bad input or an inconsistent request. The CLI exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that could not be carried out. The CLI exits with status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FPMASS_ERROR(name, base)      \
  class name : public base {          \
   public:                            \
    using base::base;                 \
  }

FPMASS_ERROR(ConfigError, UsageError);
FPMASS_ERROR(RegimeError, UsageError);
FPMASS_ERROR(WindowError, UsageError);
FPMASS_ERROR(AlignmentError, UsageError);
FPMASS_ERROR(MethodError, UsageError);
FPMASS_ERROR(GridMismatchError, UsageError);
FPMASS_ERROR(ModeError, UsageError);
FPMASS_ERROR(StabilityError, UsageError);
FPMASS_ERROR(UnsupportedError, UsageError);

FPMASS_ERROR(DegenerateError, NumericalError);
FPMASS_ERROR(ScaleError, NumericalError);
FPMASS_ERROR(QuadratureError, NumericalError);
FPMASS_ERROR(SingularSystemError, NumericalError);
FPMASS_ERROR(SingularIntegralError, NumericalError);
FPMASS_ERROR(IoError, NumericalError);

#undef FPMASS_ERROR

}  // namespace fpmass
