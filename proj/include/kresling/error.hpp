#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kresling {

enum class ErrorCode {
    NonPositiveLength,
    KindShapeMismatch,
    DegenerateCell,
    NonPositiveCircumference,
    NonConvergence,
    InfeasibleSection,
    NotFoldable,
    InvalidGeometry,
    NoSolution,
    InvalidArgument,
    NotConverged,
    TimeVaryingMode,
    UnsupportedMode,
    ParseError,
    SchemaViolation,
    NonPositiveValue,
    StyleInfeasible,
    IoError,
};

std::string_view error_name(ErrorCode code);

// All domain failures are reported with this type; the code names the failure
// class and what() carries the detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kresling
