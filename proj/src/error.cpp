#include "hypetc/error.hpp"

namespace hypetc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::MuOutOfRange: return "MuOutOfRange";
        case ErrorCode::AssumptionViolated: return "AssumptionViolated";
        case ErrorCode::DtTooCoarse: return "DtTooCoarse";
        case ErrorCode::VarrhoNotPositive: return "VarrhoNotPositive";
        case ErrorCode::MuBarNonpositive: return "MuBarNonpositive";
        case ErrorCode::NonNegativeM: return "NonNegativeM";
        case ErrorCode::SupercriticalFlow: return "SupercriticalFlow";
        case ErrorCode::SlopeMismatch: return "SlopeMismatch";
        case ErrorCode::GateSubmerged: return "GateSubmerged";
        case ErrorCode::OutputDirUnwritable: return "OutputDirUnwritable";
        case ErrorCode::ConfigMismatch: return "ConfigMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace hypetc
