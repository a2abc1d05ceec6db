#include "kresling/sizing.hpp"

#include <cmath>
#include <string>

#include "kresling/error.hpp"

namespace kresling {

namespace {

std::string section_label(int index) { return "section " + std::to_string(index + 1); }

}  // namespace

void validate(const MeasurementSet& m) {
    for (int i = 0; i < kSections; ++i) {
        const auto& s = m.sections[i];
        if (!(s.c_top > 0.0) || !(s.c_bottom > 0.0)) {
            throw Error(ErrorCode::NonPositiveCircumference, section_label(i) + " circumference must be positive");
        }
        if (!(s.height > 0.0)) {
            throw Error(ErrorCode::NonPositiveValue, section_label(i) + " height must be positive");
        }
    }
    for (int i = 0; i + 1 < kSections; ++i) {
        if (std::abs(m.sections[i].c_bottom - m.sections[i + 1].c_top) > 1e-6) {
            throw Error(ErrorCode::SchemaViolation,
                        section_label(i) + " bottom circumference differs from " + section_label(i + 1) + " top");
        }
    }
    if (!(m.tolerance >= 0.0)) throw Error(ErrorCode::NonPositiveValue, "tolerance must be non-negative");
    if (!(m.alpha_deg > 0.0 && m.alpha_deg < 180.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 180) degrees");
    }
}

SideLengths size_section(double c_top, double c_bottom, double tolerance) {
    if (!(c_top > 0.0) || !(c_bottom > 0.0)) {
        throw Error(ErrorCode::NonPositiveCircumference, "circumferences must be positive");
    }
    if (!(tolerance >= 0.0)) throw Error(ErrorCode::NonPositiveValue, "tolerance must be non-negative");
    if (c_top == c_bottom) {
        const double a = (c_top + tolerance) / 6.0;
        return {a, a};
    }
    return {(c_bottom + tolerance) / 6.0, (c_top + tolerance) / 6.0};
}

bool check_semifold(double b, double alpha_deg, double height) {
    return b * std::sin(alpha_deg * kDeg) > height;
}

double assign_crease_length(int section, double a1, double alpha_deg, double height) {
    if (section < 1 || section > kSections) {
        throw Error(ErrorCode::InvalidArgument, "section index must be 1..5");
    }
    if (!(a1 > 0.0)) throw Error(ErrorCode::NonPositiveLength, "a1 must be positive");
    if (!(height > 0.0)) throw Error(ErrorCode::NonPositiveValue, "height must be positive");
    if (section == 1) return kFirstSectionCreaseRatio * a1;

    double b = a1;
    for (int step = 0; step <= kMaxCreaseGrowthSteps; ++step) {
        if (check_semifold(b, alpha_deg, height)) return b;
        b *= kCreaseGrowth;
    }
    throw Error(ErrorCode::NonConvergence,
                section_label(section - 1) + " needs more than 64 crease growth steps");
}

void validate(const OrthosisDesign& design) {
    for (int i = 0; i < kSections; ++i) {
        validate(design.units[i]);
        if (!(design.heights[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveValue, section_label(i) + " height must be positive");
        }
    }
    for (int i = 0; i + 1 < kSections; ++i) {
        // Section i + 1 sits below section i (toward the forearm).
        if (!check_compatibility(design.units[i + 1], design.units[i])) {
            throw Error(ErrorCode::SchemaViolation,
                        section_label(i) + " and " + section_label(i + 1) + " do not share a hexagon side");
        }
        if (design.units[i].chirality == design.units[i + 1].chirality) {
            throw Error(ErrorCode::SchemaViolation, "chirality must alternate between adjacent units");
        }
    }
    if (!design.locked[0] || !design.locked[kSections - 1]) {
        throw Error(ErrorCode::SchemaViolation, "sections 1 and 5 must be locked");
    }
}

OrthosisDesign design_orthosis(const MeasurementSet& m) {
    validate(m);
    OrthosisDesign design;
    Chirality chirality = Chirality::CW;
    for (int i = 0; i < kSections; ++i) {
        const auto& s = m.sections[i];
        const SideLengths sides = size_section(s.c_top, s.c_bottom, m.tolerance);
        const double b = assign_crease_length(i + 1, sides.a1, m.alpha_deg, s.height);
        if (i > 0 && !check_semifold(b, m.alpha_deg, s.height)) {
            throw Error(ErrorCode::InfeasibleSection, section_label(i) + " cannot reach a semi-folded state");
        }
        const UnitKind kind =
            std::abs(sides.a1 - sides.a2) <= kSideMatchTolerance ? UnitKind::TKO : UnitKind::CKO;
        design.units[i] = make_unit_spec(kind, sides.a1, sides.a2, b, m.alpha_deg, chirality);
        design.heights[i] = s.height;
        chirality = opposite(chirality);
    }
    validate(design);
    return design;
}

std::array<SectionClearance, kSections> fit_report(const OrthosisDesign& design, const MeasurementSet& m) {
    std::array<SectionClearance, kSections> out;
    for (int i = 0; i < kSections; ++i) {
        out[i].bottom = 6.0 * design.units[i].a1 - m.sections[i].c_bottom;
        out[i].top = 6.0 * design.units[i].a2 - m.sections[i].c_top;
    }
    return out;
}

}  // namespace kresling
