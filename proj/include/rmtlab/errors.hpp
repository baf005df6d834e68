#pragma once

#include <stdexcept>
#include <string>

namespace rmtlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RMTLAB_DEFINE_ERROR(Name)            \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

RMTLAB_DEFINE_ERROR(InvalidParameter);
RMTLAB_DEFINE_ERROR(PreconditionError);
RMTLAB_DEFINE_ERROR(NumericalBackendError);
RMTLAB_DEFINE_ERROR(ConvergenceError);
RMTLAB_DEFINE_ERROR(StabilityError);
RMTLAB_DEFINE_ERROR(SingularityError);
RMTLAB_DEFINE_ERROR(AccuracyError);
RMTLAB_DEFINE_ERROR(OutOfMassError);
RMTLAB_DEFINE_ERROR(CollisionError);
RMTLAB_DEFINE_ERROR(StepFailure);
RMTLAB_DEFINE_ERROR(IoError);

#undef RMTLAB_DEFINE_ERROR

} // namespace rmtlab
