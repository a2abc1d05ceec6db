#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace kresling {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDeg = kPi / 180.0;
inline constexpr int kCellsPerUnit = 6;

// Lengths equal within this are treated as the same hexagon side.
inline constexpr double kSideMatchTolerance = 1e-9;
inline constexpr double kInterfaceTolerance = 1e-6;

enum class UnitKind { TKO, CKO };
enum class Chirality { CW, CCW };

inline Chirality opposite(Chirality c) { return c == Chirality::CW ? Chirality::CCW : Chirality::CW; }

// Column shift of the valley diagonal B_k -> T_{k+s}.
inline int chirality_shift(Chirality c) { return c == Chirality::CW ? 1 : -1; }

// One Kresling unit: bottom hexagon side a1, top side a2, slanted crease b and the
// cell base angle alpha (degrees). Lengths in mm.
struct UnitSpec {
    UnitKind kind = UnitKind::TKO;
    double a1 = 0.0;
    double a2 = 0.0;
    double b = 0.0;
    double alpha_deg = 60.0;
    Chirality chirality = Chirality::CW;
};

// Throws NonPositiveLength, InvalidArgument (alpha out of (0, 180)) or KindShapeMismatch.
UnitSpec make_unit_spec(UnitKind kind, double a1, double a2, double b, double alpha_deg,
                        Chirality chirality);
void validate(const UnitSpec& spec);

// Interface rule between stacked units: the lower unit's top side must equal the
// upper unit's bottom side.
bool interface_compatible(double lower_top_side, double upper_bottom_side);
bool check_compatibility(const UnitSpec& lower, const UnitSpec& upper);

// Short diagonal of a cell from its upper-right corner to its bottom-left vertex.
double cell_tendon_diagonal(const UnitSpec& spec);

enum class CreaseKind { Mountain, Valley, Boundary };
enum class EdgeRole { BottomSide, TopSide, Leg, Diagonal };

struct Crease {
    Vec2 from;
    Vec2 to;
    CreaseKind kind = CreaseKind::Mountain;
    EdgeRole role = EdgeRole::Leg;
    // Cells on either side; -1 where the edge is on the strip outline.
    int left_cell = -1;
    int right_cell = -1;

    double length() const { return (to - from).norm(); }
};

// Corners ordered B_k, B_{k+1}, T_{k+1}, T_k.
struct Cell {
    std::array<Vec2, 4> corners;
};

struct CreasePattern {
    UnitSpec spec;
    std::array<Vec2, kCellsPerUnit + 1> bottom;
    std::array<Vec2, kCellsPerUnit + 1> top;
    std::array<Cell, kCellsPerUnit> cells;
    std::vector<Crease> creases;
    // Bottom end B_k of each cell's tendon diagonal.
    std::array<Vec2, kCellsPerUnit> eyelet_anchors;
    // Closure edge (last leg) plus the top sides that join the next strip.
    std::vector<Crease> tab_edges;
};

// Planar layout of the six cells. TKO strips are straight; CKO strips follow an
// annulus. CCW is the mirror image (x -> -x) of CW. Throws DegenerateCell.
CreasePattern unroll_strip(const UnitSpec& spec);

// Rigid hexagonal frame. The radius doubles as the side length.
struct SpatialFrame {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 reference = Vec3::UnitX();
    double radius = 1.0;
};

SpatialFrame make_frame(const Vec3& center, const Vec3& normal, const Vec3& reference, double radius);

// Vertex k sits at azimuth 60 k + twist_offset_deg from the reference direction.
std::array<Vec3, kCellsPerUnit> frame_vertices(const SpatialFrame& frame, double twist_offset_deg);

}  // namespace kresling
