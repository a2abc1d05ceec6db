#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kresling {

enum class MotionMode {
    Extension,
    Flexion,
    RadialDeviation,
    UlnarDeviation,
    DTM,
    DTMMirror,
    Circumduction,
    WorkspaceSweep,
};

enum class TendonState { P, L };
using TendonStateVector = std::array<TendonState, 6>;
using TendonSet = std::vector<int>;

inline constexpr double kDefaultPullSeconds = 7.0;
inline constexpr double kDefaultLoosenSeconds = 7.0;
inline constexpr double kCircumductionLoosenSeconds = 14.0;
inline constexpr double kCircumductionPhaseSeconds = 3.5;
inline constexpr double kDefaultMaxContraction = 0.1;

std::string_view to_string(MotionMode mode);
std::optional<MotionMode> parse_motion_mode(std::string_view name);

// Rows of the movement/tendon-state table. Throws TimeVaryingMode for circumduction
// and the workspace sweep, UnsupportedMode for the mirrored DTM (no table row).
std::vector<TendonStateVector> mode_tendon_states(MotionMode mode);

// One set per table row (DTM has two). Circumduction returns all tendons.
std::vector<TendonSet> key_action_tendons(MotionMode mode);

struct Breakpoint {
    double t = 0.0;
    double value = 0.0;

    bool operator==(const Breakpoint&) const = default;
};

// Six piecewise-linear contraction channels on [0, duration]; every channel starts
// at t = 0 and ends at t = duration.
struct Schedule {
    double duration = 0.0;
    std::array<std::vector<Breakpoint>, 6> channels;

    double value(int channel, double t) const;
    std::array<double, 6> at(double t) const;

    bool operator==(const Schedule&) const = default;
};

// t = i / rate for i = 0, 1, ... up to the duration, plus the duration itself when
// the rate does not divide it. Throws InvalidArgument unless rate > 0.
std::vector<double> sample_times(double duration, double samples_per_second);

// Throws InvalidArgument when a channel is unsorted, discontinuous or leaves [0, 1].
void validate(const Schedule& schedule);

Schedule make_basic_schedule(MotionMode mode, double max_contraction, double pull_seconds = kDefaultPullSeconds,
                             double loosen_seconds = kDefaultLoosenSeconds);
Schedule make_workspace_schedule(double max_contraction, double pull_seconds = kDefaultPullSeconds,
                                 double loosen_seconds = kDefaultLoosenSeconds);
Schedule make_dtm_schedule(bool mirror, double max_contraction = kDefaultMaxContraction);
Schedule make_circumduction_schedule(double max_contraction = kDefaultMaxContraction);

// Dispatch by mode with the default timings.
Schedule make_schedule(MotionMode mode, double max_contraction);

}  // namespace kresling
