#pragma once

#include <array>
#include <string>
#include <vector>

#include "kresling/geometry.hpp"
#include "kresling/sizing.hpp"

namespace kresling {

inline constexpr int kTendons = 6;

// Pose of a unit's top frame relative to its bottom frame. Angles in degrees.
struct UnitConfiguration {
    double height = 0.0;
    double twist_deg = 0.0;
    double bend_azimuth_deg = 0.0;
    double bend_angle_deg = 0.0;
};

// units[i] is section i + 1. `base` is the forearm frame of section 5 whose
// reference direction points dorsal; the hexagon vertex columns sit at
// column_offset_deg from it.
struct StackConfiguration {
    std::array<UnitConfiguration, kSections> units{};
    SpatialFrame base{};
    double column_offset_deg = 0.0;
};

class TendonId {
public:
    explicit TendonId(int index);
    int index() const { return index_; }
    int column() const { return index_ - 1; }

private:
    int index_;
};

struct UnitVertices {
    std::array<Vec3, kCellsPerUnit> bottom;
    std::array<Vec3, kCellsPerUnit> top;
    SpatialFrame top_frame;
};

struct EdgeLengths {
    std::array<double, kCellsPerUnit> mountain{};      // B_k -> T_k
    std::array<double, kCellsPerUnit> valley{};        // B_k -> T_{k+s}
    std::array<double, kCellsPerUnit> bottom_sides{};  // B_k -> B_{k+1}
    std::array<double, kCellsPerUnit> top_sides{};     // T_k -> T_{k+1}
};

struct StackBend {
    double beta_deg = 0.0;
    double phi_deg = 0.0;
};

struct SectionBendLimits {
    int section = 0;
    double lateral_deg = 0.0;
    double sagittal_deg = 0.0;
};

struct BendReport {
    std::vector<SectionBendLimits> per_section;
    double summed_lateral_deg = 0.0;
    double summed_sagittal_deg = 0.0;
    // Sagittal limit for the first movable section, lateral for the others.
    double mixed_sum_deg = 0.0;
    std::string note;
};

// Hexagons touching with the opposite facets fully stretched. Radial/ulnar
// bending uses the lateral form, dorsal/palmar bending the sagittal form.
// Throws NotFoldable (argument > 1) or InvalidGeometry (argument < -1).
double max_bend_angle_lateral(const UnitSpec& spec);
double max_bend_angle_sagittal(const UnitSpec& spec);

// Magnitude of the twist at which B_k T_k has length b at the given height.
double neutral_twist(const UnitSpec& spec, double height);
// Signed neutral pose: CW units twist negatively so B_k -> T_{k+1} is the short diagonal.
UnitConfiguration neutral_configuration(const UnitSpec& spec, double height);

UnitVertices unit_vertex_positions(const UnitSpec& spec, const UnitConfiguration& config,
                                   const SpatialFrame& bottom_frame);
EdgeLengths edge_lengths(const UnitSpec& spec, const UnitConfiguration& config);

// Forearm-frame azimuth of tendon k's bending sector: 60 k - 150 degrees, so T2/T3
// straddle dorsal (0), T5/T6 palmar (180), T1 is radial (-90) and T4 ulnar (90).
double tendon_sector_center(TendonId tendon);

// Column offset that puts the geometric sector of T1 at tendon_sector_center(T1).
double tendon_column_offset(const OrthosisDesign& design);
StackConfiguration neutral_stack(const OrthosisDesign& design);

std::array<UnitVertices, kSections> stack_vertices(const OrthosisDesign& design, const StackConfiguration& stack);
SpatialFrame palm_frame(const StackConfiguration& stack);

double tendon_length(const OrthosisDesign& design, const StackConfiguration& stack, TendonId tendon);
std::array<double, kTendons> tendon_lengths(const OrthosisDesign& design, const StackConfiguration& stack);

// Angle between palm and forearm normals; phi is the azimuth of the palm normal in
// the forearm frame, in (-180, 180].
StackBend stack_bend_angle(const StackConfiguration& stack);

BendReport theoretical_bend_report(const OrthosisDesign& design);

double wrap_degrees(double deg);

}  // namespace kresling
