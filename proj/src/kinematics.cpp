#include "kresling/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "kresling/detail/pose.hpp"
#include "kresling/error.hpp"

namespace kresling {

namespace {

using detail::Frame;

Frame<double> to_frame(const SpatialFrame& f, double extra_rotation_deg = 0.0) {
    Frame<double> out;
    out.center = f.center;
    const Vec3 e2 = f.normal.cross(f.reference);
    out.axes.col(0) = f.reference;
    out.axes.col(1) = e2;
    out.axes.col(2) = f.normal;
    if (extra_rotation_deg != 0.0) out.axes = out.axes * detail::rotation_z<double>(extra_rotation_deg * kDeg);
    return out;
}

SpatialFrame to_spatial(const Frame<double>& f, double radius) {
    SpatialFrame out;
    out.center = f.center;
    out.reference = f.axes.col(0);
    out.normal = f.axes.col(2);
    out.radius = radius;
    return out;
}

double bend_arccos(const UnitSpec& spec, double numerator) {
    validate(spec);
    const double s = std::sin(spec.alpha_deg * kDeg);
    const double arg = (numerator - spec.b * spec.b * s * s) / (4.0 * std::sqrt(3.0) * spec.a1 * spec.a2);
    if (arg > 1.0) throw Error(ErrorCode::NotFoldable, "hexagons cannot reach the contact state");
    if (arg < -1.0) throw Error(ErrorCode::InvalidGeometry, "crease too long for the hexagons");
    return std::acos(arg) / kDeg;
}

detail::UnitPose<double> place(const Frame<double>& bottom, const UnitSpec& spec, const UnitConfiguration& c) {
    const double beta = c.bend_angle_deg * kDeg;
    const double phi = c.bend_azimuth_deg * kDeg;
    return detail::place_unit<double>(bottom, spec.a1, spec.a2, c.height, c.twist_deg * kDeg, beta * std::cos(phi),
                                      beta * std::sin(phi));
}

UnitVertices to_vertices(const detail::UnitPose<double>& pose, double top_radius) {
    UnitVertices out;
    out.bottom = pose.bottom;
    out.top = pose.top;
    out.top_frame = to_spatial(pose.top_frame, top_radius);
    return out;
}

}  // namespace

TendonId::TendonId(int index) : index_(index) {
    if (index < 1 || index > kTendons) throw Error(ErrorCode::InvalidArgument, "tendon index must be 1..6");
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

double max_bend_angle_lateral(const UnitSpec& spec) {
    return bend_arccos(spec, 3.0 * spec.a1 * spec.a1 + 4.0 * spec.a2 * spec.a2);
}

double max_bend_angle_sagittal(const UnitSpec& spec) {
    return bend_arccos(spec, 4.0 * spec.a1 * spec.a1 + 3.0 * spec.a2 * spec.a2);
}

double neutral_twist(const UnitSpec& spec, double height) {
    validate(spec);
    if (!(height >= 0.0)) throw Error(ErrorCode::InvalidArgument, "height must be non-negative");
    const double arg = (spec.a1 * spec.a1 + spec.a2 * spec.a2 + height * height - spec.b * spec.b) /
                       (2.0 * spec.a1 * spec.a2);
    if (arg > 1.0 || arg < -1.0) {
        throw Error(ErrorCode::NoSolution, "no twist gives the slanted crease its length at this height");
    }
    return std::acos(arg) / kDeg;
}

UnitConfiguration neutral_configuration(const UnitSpec& spec, double height) {
    const double theta = neutral_twist(spec, height);
    return UnitConfiguration{height, spec.chirality == Chirality::CW ? -theta : theta, 0.0, 0.0};
}

UnitVertices unit_vertex_positions(const UnitSpec& spec, const UnitConfiguration& config,
                                   const SpatialFrame& bottom_frame) {
    return to_vertices(place(to_frame(bottom_frame), spec, config), spec.a2);
}

EdgeLengths edge_lengths(const UnitSpec& spec, const UnitConfiguration& config) {
    const UnitVertices v = unit_vertex_positions(spec, config, SpatialFrame{});
    const int s = chirality_shift(spec.chirality);
    EdgeLengths out;
    for (int k = 0; k < kCellsPerUnit; ++k) {
        const int next = detail::wrap_column(k + 1);
        out.mountain[k] = (v.top[k] - v.bottom[k]).norm();
        out.valley[k] = (v.top[detail::wrap_column(k + s)] - v.bottom[k]).norm();
        out.bottom_sides[k] = (v.bottom[next] - v.bottom[k]).norm();
        out.top_sides[k] = (v.top[next] - v.top[k]).norm();
    }
    return out;
}

double tendon_sector_center(TendonId tendon) { return wrap_degrees(60.0 * tendon.index() - 150.0); }

std::array<UnitVertices, kSections> stack_vertices(const OrthosisDesign& design, const StackConfiguration& stack) {
    std::array<UnitVertices, kSections> out;
    Frame<double> frame = to_frame(stack.base, stack.column_offset_deg);
    for (int i = kSections - 1; i >= 0; --i) {
        const auto pose = place(frame, design.units[i], stack.units[i]);
        out[i] = to_vertices(pose, design.units[i].a2);
        frame = pose.top_frame;
    }
    return out;
}

namespace {

// Tendon path: from the forearm anchor column, each unit contributes B_c -> T_{c+s}.
template <class Fn>
void walk_tendon(const OrthosisDesign& design, TendonId tendon, Fn&& segment) {
    int column = tendon.column();
    for (int i = kSections - 1; i >= 0; --i) {
        const int next = detail::wrap_column(column + chirality_shift(design.units[i].chirality));
        segment(i, column, next);
        column = next;
    }
}

}  // namespace

double tendon_column_offset(const OrthosisDesign& design) {
    StackConfiguration stack;
    for (int i = 0; i < kSections; ++i) stack.units[i] = neutral_configuration(design.units[i], design.heights[i]);
    const auto vertices = stack_vertices(design, stack);
    double sx = 0.0;
    double sy = 0.0;
    walk_tendon(design, TendonId(1), [&](int i, int from, int to) {
        if (design.locked[i]) return;
        const Vec3 mid = 0.5 * (vertices[i].bottom[from] + vertices[i].top[to]);
        const double az = std::atan2(mid.y(), mid.x());
        sx += std::cos(az);
        sy += std::sin(az);
    });
    const double center = std::atan2(sy, sx) / kDeg;
    return wrap_degrees(tendon_sector_center(TendonId(1)) - center);
}

StackConfiguration neutral_stack(const OrthosisDesign& design) {
    StackConfiguration stack;
    for (int i = 0; i < kSections; ++i) stack.units[i] = neutral_configuration(design.units[i], design.heights[i]);
    stack.base = SpatialFrame{};
    stack.base.radius = design.units[kSections - 1].a1;
    stack.column_offset_deg = tendon_column_offset(design);
    return stack;
}

SpatialFrame palm_frame(const StackConfiguration& stack) {
    Frame<double> frame = to_frame(stack.base, stack.column_offset_deg);
    for (int i = kSections - 1; i >= 0; --i) {
        const auto& c = stack.units[i];
        const double beta = c.bend_angle_deg * kDeg;
        const double phi = c.bend_azimuth_deg * kDeg;
        frame = detail::top_frame<double>(frame, c.height, c.twist_deg * kDeg, beta * std::cos(phi),
                                          beta * std::sin(phi));
    }
    return to_spatial(frame, 1.0);
}

double tendon_length(const OrthosisDesign& design, const StackConfiguration& stack, TendonId tendon) {
    const auto vertices = stack_vertices(design, stack);
    double total = 0.0;
    walk_tendon(design, tendon, [&](int i, int from, int to) {
        total += (vertices[i].top[to] - vertices[i].bottom[from]).norm();
    });
    return total;
}

std::array<double, kTendons> tendon_lengths(const OrthosisDesign& design, const StackConfiguration& stack) {
    const auto vertices = stack_vertices(design, stack);
    std::array<double, kTendons> out{};
    for (int t = 1; t <= kTendons; ++t) {
        double total = 0.0;
        walk_tendon(design, TendonId(t), [&](int i, int from, int to) {
            total += (vertices[i].top[to] - vertices[i].bottom[from]).norm();
        });
        out[t - 1] = total;
    }
    return out;
}

StackBend stack_bend_angle(const StackConfiguration& stack) {
    const SpatialFrame palm = palm_frame(stack);
    const Vec3& n0 = stack.base.normal;
    const Vec3 e1 = stack.base.reference;
    const Vec3 e2 = n0.cross(e1);
    const Vec3& n = palm.normal;
    StackBend out;
    out.beta_deg = std::atan2(n.cross(n0).norm(), n.dot(n0)) / kDeg;
    const double x = n.dot(e1);
    const double y = n.dot(e2);
    out.phi_deg = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x) / kDeg;
    return out;
}

BendReport theoretical_bend_report(const OrthosisDesign& design) {
    BendReport report;
    bool first = true;
    for (int i = 0; i < kSections; ++i) {
        if (design.locked[i]) continue;
        SectionBendLimits entry{i + 1, max_bend_angle_lateral(design.units[i]),
                                max_bend_angle_sagittal(design.units[i])};
        report.summed_lateral_deg += entry.lateral_deg;
        report.summed_sagittal_deg += entry.sagittal_deg;
        report.mixed_sum_deg += first ? entry.sagittal_deg : entry.lateral_deg;
        first = false;
        report.per_section.push_back(entry);
    }
    std::ostringstream note;
    note.precision(4);
    note << std::fixed;
    note << "dorsal/palmar total uses the sagittal limit for every movable section (" << report.summed_sagittal_deg
         << " deg); sagittal for the first movable section and lateral for the rest gives " << report.mixed_sum_deg
         << " deg";
    report.note = note.str();
    return report;
}

}  // namespace kresling
