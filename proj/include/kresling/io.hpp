#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kresling/equilibrium.hpp"
#include "kresling/schedules.hpp"
#include "kresling/sizing.hpp"

namespace kresling {

inline constexpr const char* kToolName = "kresling";
inline constexpr const char* kToolVersion = "1.0.0";

struct Provenance {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    // Parameters echoed in insertion order.
    std::vector<std::pair<std::string, std::string>> parameters;
};

// Documents written by `design` carry their measurements; hand-entered designs may
// omit them.
struct DesignDocument {
    std::optional<MeasurementSet> measurements;
    OrthosisDesign design;
    Provenance provenance;
};

// JSON text. Missing tolerance/alpha fall back to the defaults.
// Throws ParseError, SchemaViolation or NonPositiveValue.
MeasurementSet parse_measurements(const std::string& text);
std::string serialize_measurements(const MeasurementSet& m);

// Verifies the design against its measurements when present.
DesignDocument parse_design(const std::string& text);
std::string serialize_design(const DesignDocument& doc);

std::string format_number(double value);

std::string export_trajectory(const Trajectory& trajectory);
Trajectory parse_trajectory(const std::string& csv);

std::string export_schedule(const Schedule& schedule, double samples_per_second);
// Rebuilds piecewise-linear channels with one breakpoint per row.
Schedule parse_schedule(const std::string& csv);

std::string read_file(const std::string& path);
// Writes to a sibling temporary file, then renames it over `path`. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

MeasurementSet load_measurements(const std::string& path);
DesignDocument load_design(const std::string& path);

}  // namespace kresling
