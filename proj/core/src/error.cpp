#include "selfboost/error.hpp"

namespace selfboost {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::InsufficientLength: return "InsufficientLength";
        case ErrorCode::TooFewWindows: return "TooFewWindows";
        case ErrorCode::NotEnoughExtrema: return "NotEnoughExtrema";
        case ErrorCode::TooFewExtrema: return "TooFewExtrema";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ShapeInfeasible: return "ShapeInfeasible";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::AllActualsZero: return "AllActualsZero";
        case ErrorCode::MissingValue: return "MissingValue";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::NaNLoss: return "NaNLoss";
        case ErrorCode::NonPositiveRmse: return "NonPositiveRmse";
        case ErrorCode::GraphNotScalar: return "GraphNotScalar";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid:
            return 2;
        case ErrorCode::ZeroVariance:
        case ErrorCode::SingularSystem:
        case ErrorCode::NaNLoss:
        case ErrorCode::NonPositiveRmse:
            return 4;
        default:
            return 3;
    }
}

}  // namespace selfboost
