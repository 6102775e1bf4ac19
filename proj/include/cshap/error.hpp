#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cshap {

enum class ErrorCode {
    MalformedRow,
    NonUniformStep,
    EmptyInput,
    DegenerateSplit,
    WindowTooLong,
    ZeroVariance,
    SingularSystem,
    WindowTooShort,
    TooManyConcepts,
    ModelFailure,
    LengthMismatch,
    InsufficientTrainingData,
    PeriodTooLong,
    SpawnFailure,
    ProtocolViolation,
    ModelTimeout,
    DegenerateVariance,
    InvalidArgument,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every module error carries a stable code so the CLI can emit a
// machine-readable record.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cshap
