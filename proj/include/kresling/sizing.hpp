#pragma once

#include <array>

#include "kresling/geometry.hpp"

namespace kresling {

inline constexpr int kSections = 5;
inline constexpr double kDefaultTolerance = 15.0;
inline constexpr double kDefaultAlpha = 60.0;
inline constexpr double kFirstSectionCreaseRatio = 0.6;
inline constexpr double kCreaseGrowth = 1.2;
inline constexpr int kMaxCreaseGrowthSteps = 64;

// c_{i.t}, c_{i.b} and h_i of one section, in mm.
struct SectionMeasurement {
    double c_top = 0.0;
    double c_bottom = 0.0;
    double height = 0.0;
};

// Sections ordered palm (1) to forearm (5).
struct MeasurementSet {
    std::array<SectionMeasurement, kSections> sections{};
    double tolerance = kDefaultTolerance;
    double alpha_deg = kDefaultAlpha;
};

void validate(const MeasurementSet& m);

struct SideLengths {
    double a1 = 0.0;
    double a2 = 0.0;
};

// Circumference (+ tolerance) split over six hexagon sides; no rounding.
SideLengths size_section(double c_top, double c_bottom, double tolerance);

// Section 1 takes b = 0.6 a1. Other sections start at b = a1 and grow by 20 %
// until b sin(alpha) > height.
double assign_crease_length(int section, double a1, double alpha_deg, double height);

bool check_semifold(double b, double alpha_deg, double height);

// units[i] is section i + 1. heights carry h_i so the design alone fixes the
// neutral pose. Sections 1 and 5 are attached to the limb and never move.
struct OrthosisDesign {
    std::array<UnitSpec, kSections> units{};
    std::array<double, kSections> heights{};
    std::array<bool, kSections> locked{true, false, false, false, true};
};

// Throws SchemaViolation when an interface or the chirality alternation is broken.
void validate(const OrthosisDesign& design);

OrthosisDesign design_orthosis(const MeasurementSet& m);

struct SectionClearance {
    double bottom = 0.0;  // 6 a1 - c_b
    double top = 0.0;     // 6 a2 - c_t
};

std::array<SectionClearance, kSections> fit_report(const OrthosisDesign& design, const MeasurementSet& m);

}  // namespace kresling
