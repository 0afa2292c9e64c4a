#pragma once

#include <stdexcept>
#include <string>

namespace eitmc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define EITMC_DEFINE_ERROR(Name)                  \
    struct Name : Error {                         \
        using Error::Error;                       \
    }

EITMC_DEFINE_ERROR(ConfigError);
EITMC_DEFINE_ERROR(AmbiguousProjection);
EITMC_DEFINE_ERROR(EllipticityViolation);
EITMC_DEFINE_ERROR(FactorizationFailure);
EITMC_DEFINE_ERROR(StuckAtCorner);
EITMC_DEFINE_ERROR(HorizonExceeded);
EITMC_DEFINE_ERROR(CalibrationDiverged);
EITMC_DEFINE_ERROR(CompatibilityViolation);
EITMC_DEFINE_ERROR(MissingCollar);
EITMC_DEFINE_ERROR(LocalTimeExhausted);
EITMC_DEFINE_ERROR(InsufficientData);
EITMC_DEFINE_ERROR(SolverDiverged);

#undef EITMC_DEFINE_ERROR

}  // namespace eitmc
