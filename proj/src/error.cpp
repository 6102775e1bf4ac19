#include "cshap/error.hpp"

namespace cshap {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonUniformStep: return "NonUniformStep";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::TooManyConcepts: return "TooManyConcepts";
    case ErrorCode::ModelFailure: return "ModelFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InsufficientTrainingData: return "InsufficientTrainingData";
    case ErrorCode::PeriodTooLong: return "PeriodTooLong";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::ModelTimeout: return "ModelTimeout";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace cshap
