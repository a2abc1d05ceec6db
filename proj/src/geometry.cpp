#include "kresling/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "kresling/error.hpp"

namespace kresling {

namespace {

Vec2 rotate_about(const Vec2& p, const Vec2& center, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Vec2 d = p - center;
    return center + Vec2(c * d.x() - s * d.y(), s * d.x() + c * d.y());
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Twice the signed area of a quadrilateral.
double quad_area2(const Cell& cell) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += cross2(cell.corners[i], cell.corners[(i + 1) % 4]);
    return sum;
}

}  // namespace

void validate(const UnitSpec& spec) {
    if (!(spec.a1 > 0.0) || !(spec.a2 > 0.0) || !(spec.b > 0.0)) {
        throw Error(ErrorCode::NonPositiveLength, "unit lengths must be positive");
    }
    if (!(spec.alpha_deg > 0.0 && spec.alpha_deg < 180.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 180) degrees");
    }
    const bool equal_sides = std::abs(spec.a1 - spec.a2) <= kSideMatchTolerance;
    if (spec.kind == UnitKind::TKO && !equal_sides) {
        throw Error(ErrorCode::KindShapeMismatch, "TKO unit requires a1 == a2");
    }
    if (spec.kind == UnitKind::CKO && equal_sides) {
        throw Error(ErrorCode::KindShapeMismatch, "CKO unit requires a1 != a2");
    }
}

UnitSpec make_unit_spec(UnitKind kind, double a1, double a2, double b, double alpha_deg,
                        Chirality chirality) {
    UnitSpec spec{kind, a1, a2, b, alpha_deg, chirality};
    validate(spec);
    if (kind == UnitKind::TKO) spec.a2 = spec.a1;
    return spec;
}

bool interface_compatible(double lower_top_side, double upper_bottom_side) {
    return std::abs(lower_top_side - upper_bottom_side) <= kInterfaceTolerance;
}

bool check_compatibility(const UnitSpec& lower, const UnitSpec& upper) {
    return interface_compatible(lower.a2, upper.a1);
}

double cell_tendon_diagonal(const UnitSpec& spec) {
    // The CKO layout shares B_k, B_{k+1}, T_{k+1} with the TKO construction, so one
    // formula covers both kinds.
    const double c = std::cos(spec.alpha_deg * kDeg);
    return std::sqrt(spec.a1 * spec.a1 + spec.b * spec.b - 2.0 * spec.a1 * spec.b * c);
}

CreasePattern unroll_strip(const UnitSpec& spec) {
    validate(spec);
    CreasePattern pattern;
    pattern.spec = spec;

    const double alpha = spec.alpha_deg * kDeg;
    // Leg leaves B_{k+1} at angle alpha from the bottom edge, leaning back over the cell.
    const Vec2 leg(-spec.b * std::cos(alpha), spec.b * std::sin(alpha));

    auto& B = pattern.bottom;
    auto& T = pattern.top;
    if (spec.kind == UnitKind::TKO) {
        for (int k = 0; k <= kCellsPerUnit; ++k) {
            B[k] = Vec2(k * spec.a1, 0.0);
            T[k] = B[k] + leg;
        }
    } else {
        // Cell k+1 is cell k rotated about a centre C = (a1/2, y). Requiring the
        // rotated top corner to advance by a chord of a2 gives a quadratic in y.
        const double ratio = spec.a2 / spec.a1;
        const double s = leg.y();
        const double half = 0.5 * spec.a1;
        const double qa = 1.0 - ratio * ratio;
        const double qc = (half + leg.x()) * (half + leg.x()) + s * s - ratio * ratio * half * half;
        const double disc = s * s - qa * qc;
        if (disc < 0.0) {
            throw Error(ErrorCode::DegenerateCell, "no annular layout for this CKO unit");
        }
        const double y = (s + std::sqrt(disc)) / qa;
        const Vec2 center(half, y);
        const Vec2 b0(0.0, 0.0);
        const Vec2 b1(spec.a1, 0.0);
        const Vec2 t1 = b1 + leg;
        const double step = std::atan2(cross2(b0 - center, b1 - center), (b0 - center).dot(b1 - center));
        const Vec2 t0 = rotate_about(t1, center, -step);
        for (int k = 0; k <= kCellsPerUnit; ++k) {
            B[k] = rotate_about(b0, center, k * step);
            T[k] = rotate_about(t0, center, k * step);
        }
    }

    if (spec.chirality == Chirality::CCW) {
        for (int k = 0; k <= kCellsPerUnit; ++k) {
            B[k].x() = -B[k].x();
            T[k].x() = -T[k].x();
        }
    }

    for (int k = 0; k < kCellsPerUnit; ++k) {
        Cell& cell = pattern.cells[k];
        cell.corners = {B[k], B[k + 1], T[k + 1], T[k]};
        // Both triangles of the cell must have area; collinear corners cannot fold.
        const double tri_a = cross2(B[k + 1] - B[k], T[k + 1] - B[k]);
        const double tri_b = cross2(T[k + 1] - B[k], T[k] - B[k]);
        const double scale = spec.a1 * spec.b;
        if (std::abs(tri_a) < 1e-9 * scale || std::abs(tri_b) < 1e-9 * scale ||
            std::abs(quad_area2(cell)) < 1e-9 * scale) {
            throw Error(ErrorCode::DegenerateCell, "cell " + std::to_string(k) + " is collinear");
        }
        pattern.eyelet_anchors[k] = B[k];
    }

    auto add = [&](const Vec2& a, const Vec2& b, CreaseKind kind, EdgeRole role, int left, int right) {
        pattern.creases.push_back(Crease{a, b, kind, role, left, right});
    };
    for (int k = 0; k < kCellsPerUnit; ++k) {
        add(B[k], B[k + 1], CreaseKind::Mountain, EdgeRole::BottomSide, k, -1);
        add(T[k], T[k + 1], CreaseKind::Mountain, EdgeRole::TopSide, k, -1);
        add(B[k], T[k + 1], CreaseKind::Valley, EdgeRole::Diagonal, k, k);
    }
    for (int k = 0; k <= kCellsPerUnit; ++k) {
        const bool end = (k == 0 || k == kCellsPerUnit);
        add(B[k], T[k], end ? CreaseKind::Boundary : CreaseKind::Mountain, EdgeRole::Leg,
            k == 0 ? -1 : k - 1, k == kCellsPerUnit ? -1 : k);
    }

    pattern.tab_edges.push_back(
        Crease{B[kCellsPerUnit], T[kCellsPerUnit], CreaseKind::Boundary, EdgeRole::Leg, kCellsPerUnit - 1, -1});
    for (int k = 0; k < kCellsPerUnit; ++k) {
        pattern.tab_edges.push_back(Crease{T[k], T[k + 1], CreaseKind::Mountain, EdgeRole::TopSide, k, -1});
    }
    return pattern;
}

SpatialFrame make_frame(const Vec3& center, const Vec3& normal, const Vec3& reference, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::NonPositiveLength, "frame radius must be positive");
    const double nn = normal.norm();
    const double rn = reference.norm();
    if (nn == 0.0 || rn == 0.0) throw Error(ErrorCode::InvalidGeometry, "frame axes must be non-zero");
    SpatialFrame frame;
    frame.center = center;
    frame.normal = normal / nn;
    frame.reference = reference / rn;
    if (std::abs(frame.normal.dot(frame.reference)) > 1e-9) {
        throw Error(ErrorCode::InvalidGeometry, "frame reference must be perpendicular to the normal");
    }
    frame.radius = radius;
    return frame;
}

std::array<Vec3, kCellsPerUnit> frame_vertices(const SpatialFrame& frame, double twist_offset_deg) {
    const Vec3 e1 = frame.reference;
    const Vec3 e2 = frame.normal.cross(e1);
    std::array<Vec3, kCellsPerUnit> out;
    for (int k = 0; k < kCellsPerUnit; ++k) {
        const double angle = (60.0 * k + twist_offset_deg) * kDeg;
        out[k] = frame.center + frame.radius * (std::cos(angle) * e1 + std::sin(angle) * e2);
    }
    return out;
}

}  // namespace kresling
