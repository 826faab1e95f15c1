#pragma once

#include <stdexcept>
#include <string>

namespace selfboost {

enum class ErrorCode {
    // data / shape errors
    LengthMismatch,
    InsufficientLength,
    TooFewWindows,
    NotEnoughExtrema,
    TooFewExtrema,
    ShapeMismatch,
    ShapeInfeasible,
    TooFewPoints,
    AllActualsZero,
    MissingValue,
    IoError,
    // numerical failures
    ZeroVariance,
    SingularSystem,
    NaNLoss,
    NonPositiveRmse,
    GraphNotScalar,
    // configuration
    ConfigInvalid,
};

/// Library-wide exception. Every failure the public API can signal carries
/// one of the ErrorCode values above so callers (notably the CLI) can map
/// failures to exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

/// Process exit code category: 2 = configuration, 3 = data, 4 = numerical.
int exit_code_for(ErrorCode code);

}  // namespace selfboost
