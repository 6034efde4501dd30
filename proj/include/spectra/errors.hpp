#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

// Error taxonomy. ValidationError maps to CLI exit code 2,
// NumericalError to exit code 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

#define SPECTRA_VALIDATION_ERROR(NAME)            \
    struct NAME : ValidationError {               \
        explicit NAME(const std::string& msg)     \
            : ValidationError(#NAME ": " + msg) {} \
    }

#define SPECTRA_NUMERICAL_ERROR(NAME)             \
    struct NAME : NumericalError {                \
        explicit NAME(const std::string& msg)     \
            : NumericalError(#NAME ": " + msg) {}  \
    }

SPECTRA_VALIDATION_ERROR(FlipNotAllowed);
SPECTRA_VALIDATION_ERROR(UnsupportedSurface);
SPECTRA_VALIDATION_ERROR(NotRegular);
SPECTRA_VALIDATION_ERROR(NonSimpleZero);
SPECTRA_VALIDATION_ERROR(NotDoublePole);
SPECTRA_VALIDATION_ERROR(InvalidDifferential);
SPECTRA_VALIDATION_ERROR(InvalidInput);
SPECTRA_VALIDATION_ERROR(ConflictingFlags);
SPECTRA_VALIDATION_ERROR(ActiveRay);
SPECTRA_VALIDATION_ERROR(ActiveBoundary);
SPECTRA_VALIDATION_ERROR(NotGeneric);
SPECTRA_VALIDATION_ERROR(NotSaddleFree);
SPECTRA_VALIDATION_ERROR(UnsupportedTopology);

SPECTRA_NUMERICAL_ERROR(PoleOfMap);
SPECTRA_NUMERICAL_ERROR(SheetAmbiguity);
SPECTRA_NUMERICAL_ERROR(Stalled);
SPECTRA_NUMERICAL_ERROR(UnresolvedCrossing);
SPECTRA_NUMERICAL_ERROR(SingularityOnPath);
SPECTRA_NUMERICAL_ERROR(ApparentSingularity);
SPECTRA_NUMERICAL_ERROR(SeedUnstable);
SPECTRA_NUMERICAL_ERROR(DegenerateQuadrilateral);
SPECTRA_NUMERICAL_ERROR(OverflowError);

#undef SPECTRA_VALIDATION_ERROR
#undef SPECTRA_NUMERICAL_ERROR

}  // namespace spectra
