#pragma once

#include <stdexcept>
#include <string>

namespace chainlab {

// Validation errors map to CLI exit code 1, everything else to 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

#define CHAINLAB_VALIDATION_ERROR(Name)                                        \
    class Name : public ValidationError {                                      \
    public:                                                                    \
        explicit Name(const std::string& what) : ValidationError(what) {}      \
    }

CHAINLAB_VALIDATION_ERROR(AsymmetricMatrix);
CHAINLAB_VALIDATION_ERROR(NegativeDistance);
CHAINLAB_VALIDATION_ERROR(NonzeroDiagonal);
CHAINLAB_VALIDATION_ERROR(TriangleViolation);
CHAINLAB_VALIDATION_ERROR(EmptySubset);
CHAINLAB_VALIDATION_ERROR(TooLarge);
CHAINLAB_VALIDATION_ERROR(PointNotInGround);
CHAINLAB_VALIDATION_ERROR(NotAdmissible);
CHAINLAB_VALIDATION_ERROR(AlphaMismatch);
CHAINLAB_VALIDATION_ERROR(GroundMismatch);
CHAINLAB_VALIDATION_ERROR(NonFiniteSample);
CHAINLAB_VALIDATION_ERROR(NegativeSample);
CHAINLAB_VALIDATION_ERROR(DimensionMismatch);
CHAINLAB_VALIDATION_ERROR(OracleMissing);
CHAINLAB_VALIDATION_ERROR(ConfigInvalid);
CHAINLAB_VALIDATION_ERROR(InsufficientReplications);
CHAINLAB_VALIDATION_ERROR(NotSymmetricClass);
CHAINLAB_VALIDATION_ERROR(DegenerateGrid);
CHAINLAB_VALIDATION_ERROR(UnknownSubcommand);

#undef CHAINLAB_VALIDATION_ERROR

// Signals an implementation bug: the merge construction's bound is a hard
// guarantee, so a violation means the merge or the evaluator is wrong.
class ConstructionBoundViolated : public RuntimeError {
public:
    explicit ConstructionBoundViolated(const std::string& what) : RuntimeError(what) {}
};

class IoError : public RuntimeError {
public:
    explicit IoError(const std::string& what) : RuntimeError(what) {}
};

}  // namespace chainlab
