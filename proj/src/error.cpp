#include "kresling/error.hpp"

namespace kresling {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveLength: return "NonPositiveLength";
        case ErrorCode::KindShapeMismatch: return "KindShapeMismatch";
        case ErrorCode::DegenerateCell: return "DegenerateCell";
        case ErrorCode::NonPositiveCircumference: return "NonPositiveCircumference";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::InfeasibleSection: return "InfeasibleSection";
        case ErrorCode::NotFoldable: return "NotFoldable";
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::NoSolution: return "NoSolution";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::TimeVaryingMode: return "TimeVaryingMode";
        case ErrorCode::UnsupportedMode: return "UnsupportedMode";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::StyleInfeasible: return "StyleInfeasible";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

}  // namespace kresling
