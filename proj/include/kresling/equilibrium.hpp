#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "kresling/kinematics.hpp"
#include "kresling/schedules.hpp"
#include "kresling/sizing.hpp"

namespace kresling {

inline constexpr double kDefaultFacetToCrease = 100.0;
inline constexpr double kDefaultContactToFacet = 1e4;
inline constexpr double kDefaultMarkerOffset = 100.0;
// Frame thickness kept between a hexagon's vertices and the opposite frame plane, mm.
inline constexpr double kDefaultFrameClearance = 1.0;
// Frame contact sets in at this fraction of a unit's bend limit.
inline constexpr double kBendContactOnset = 0.98;
// Degrees of freedom per movable unit: height, twist, tilt_x, tilt_y.
inline constexpr int kUnitDofs = 4;

struct ModelOptions {
    bool pin_section2 = false;
    // Extra sections held at their neutral pose (index 0 = section 1).
    std::array<bool, kSections> pinned{};
    double contact_to_facet = kDefaultContactToFacet;
    double frame_clearance_mm = kDefaultFrameClearance;
    double marker_offset_mm = kDefaultMarkerOffset;
};

struct ElasticModel {
    OrthosisDesign design;
    double crease_stiffness = 0.0;  // valley diagonals, N/mm
    double facet_stiffness = 0.0;   // slanted mountain edges, N/mm
    double contact_stiffness = 0.0; // frame contact, N/mm
    double frame_clearance_mm = kDefaultFrameClearance;
    std::array<bool, kSections> locked{};
    std::array<UnitConfiguration, kSections> neutral{};
    std::array<std::array<double, kCellsPerUnit>, kSections> rest_mountain{};
    std::array<std::array<double, kCellsPerUnit>, kSections> rest_valley{};
    std::array<double, kTendons> neutral_tendon_lengths{};
    // Smaller of the lateral and sagittal limits, for movable units only.
    std::array<double, kSections> bend_limit_deg{};
    double column_offset_deg = 0.0;
    double marker_offset_mm = kDefaultMarkerOffset;

    std::vector<int> free_units() const;
    int dimension() const { return kUnitDofs * static_cast<int>(free_units().size()); }
};

// Rest lengths come from each unit's neutral pose. Throws InvalidArgument unless
// facet >= crease > 0; propagates NoSolution and NotFoldable.
ElasticModel build_elastic_model(const OrthosisDesign& design, double crease_stiffness, double facet_stiffness,
                                 const ModelOptions& options = {});

// Parameters: per movable unit (palm to forearm order) height mm, twist rad and the
// tilt vector (beta cos phi, beta sin phi) in rad.
Eigen::VectorXd neutral_parameters(const ElasticModel& model);
StackConfiguration to_stack(const ElasticModel& model, const Eigen::VectorXd& parameters);
Eigen::VectorXd to_parameters(const ElasticModel& model, const StackConfiguration& stack);

struct EnergyValue {
    double energy = 0.0;
    Eigen::VectorXd gradient;
};

// Half the stiffness-weighted squared length deviations over mountain and valley edges.
EnergyValue total_energy(const ElasticModel& model, const Eigen::VectorXd& parameters);

struct TendonCommand {
    std::array<double, kTendons> contraction{};
};

void validate(const TendonCommand& command);

// total_energy + one-sided tendon penalty + frame contact.
double solver_objective(const ElasticModel& model, const Eigen::VectorXd& parameters, const TendonCommand& command,
                        double penalty_weight);
EnergyValue solver_objective_with_gradient(const ElasticModel& model, const Eigen::VectorXd& parameters,
                                           const TendonCommand& command, double penalty_weight);

struct SolveOptions {
    double energy_tolerance = 1e-8;
    int max_iterations = 5000;
    std::optional<double> penalty_weight;  // default 1e3 * crease stiffness
    std::optional<StackConfiguration> seed;
};

double penalty_weight(const ElasticModel& model, const SolveOptions& options);

struct SolveResult {
    StackConfiguration configuration;
    Eigen::VectorXd parameters;
    double energy = 0.0;          // objective value at the returned state
    double elastic_energy = 0.0;
    double seed_energy = 0.0;
    bool converged = false;
    double gradient_norm = 0.0;
    double gradient_threshold = 0.0;
    int iterations = 0;
};

SolveResult solve_equilibrium(const ElasticModel& model, const TendonCommand& command,
                              const SolveOptions& options = {});

struct TrajectorySample {
    double t = 0.0;
    Vec3 marker = Vec3::Zero();
    double beta_deg = 0.0;
    double phi_deg = 0.0;
    std::array<double, kTendons> tendon_lengths{};
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

Vec3 marker_position(const ElasticModel& model, const StackConfiguration& stack);
TrajectorySample sample_state(const ElasticModel& model, const StackConfiguration& stack, double t);

// Contraction ramps 0 -> max -> 0 over 14 s in `steps` evenly spaced samples, each
// solve seeded with the previous one. Throws NotConverged.
Trajectory sweep_single_tendon(const ElasticModel& model, TendonId tendon, int steps,
                               double max_contraction = kDefaultMaxContraction, const SolveOptions& options = {});

Trajectory run_schedule(const ElasticModel& model, const Schedule& schedule, double samples_per_second,
                        const SolveOptions& options = {});

}  // namespace kresling
