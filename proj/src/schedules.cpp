#include "kresling/schedules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "kresling/error.hpp"

namespace kresling {

namespace {

constexpr TendonState P = TendonState::P;
constexpr TendonState L = TendonState::L;

void check_contraction(double max_contraction) {
    if (!(max_contraction > 0.0 && max_contraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "max contraction must lie in (0, 1]");
    }
}

// Triangle 0 -> peak -> 0 starting at `start`, padded with zeros to [0, duration].
std::vector<Breakpoint> triangle(double start, double rise, double fall, double peak, double duration) {
    std::vector<Breakpoint> out;
    if (start > 0.0) out.push_back({0.0, 0.0});
    out.push_back({start, 0.0});
    out.push_back({start + rise, peak});
    out.push_back({start + rise + fall, 0.0});
    if (start + rise + fall < duration) out.push_back({duration, 0.0});
    return out;
}

std::vector<Breakpoint> idle(double duration) { return {{0.0, 0.0}, {duration, 0.0}}; }

Schedule idle_schedule(double duration) {
    Schedule s;
    s.duration = duration;
    for (auto& ch : s.channels) ch = idle(duration);
    return s;
}

}  // namespace

std::string_view to_string(MotionMode mode) {
    switch (mode) {
        case MotionMode::Extension: return "extension";
        case MotionMode::Flexion: return "flexion";
        case MotionMode::RadialDeviation: return "radial-deviation";
        case MotionMode::UlnarDeviation: return "ulnar-deviation";
        case MotionMode::DTM: return "dtm";
        case MotionMode::DTMMirror: return "dtm-mirror";
        case MotionMode::Circumduction: return "circumduction";
        case MotionMode::WorkspaceSweep: return "workspace";
    }
    return "unknown";
}

std::optional<MotionMode> parse_motion_mode(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
        return c == '_' ? '-' : static_cast<char>(std::tolower(c));
    });
    for (MotionMode m : {MotionMode::Extension, MotionMode::Flexion, MotionMode::RadialDeviation,
                         MotionMode::UlnarDeviation, MotionMode::DTM, MotionMode::DTMMirror,
                         MotionMode::Circumduction, MotionMode::WorkspaceSweep}) {
        if (lower == to_string(m)) return m;
    }
    if (lower == "radial") return MotionMode::RadialDeviation;
    if (lower == "ulnar") return MotionMode::UlnarDeviation;
    return std::nullopt;
}

std::vector<TendonStateVector> mode_tendon_states(MotionMode mode) {
    switch (mode) {
        case MotionMode::Extension: return {{L, P, P, L, L, L}};
        case MotionMode::Flexion: return {{L, L, L, L, P, P}};
        case MotionMode::RadialDeviation: return {{P, P, L, L, L, P}};
        case MotionMode::UlnarDeviation: return {{L, L, P, P, P, L}};
        case MotionMode::DTM: return {{P, P, P, L, L, L}, {L, L, L, P, P, P}};
        case MotionMode::Circumduction:
        case MotionMode::WorkspaceSweep:
            throw Error(ErrorCode::TimeVaryingMode, std::string(to_string(mode)) + " has no fixed tendon state");
        case MotionMode::DTMMirror: break;
    }
    throw Error(ErrorCode::UnsupportedMode, std::string(to_string(mode)) + " has no tendon-state row");
}

std::vector<TendonSet> key_action_tendons(MotionMode mode) {
    switch (mode) {
        case MotionMode::Extension: return {{2, 3}};
        case MotionMode::Flexion: return {{5, 6}};
        case MotionMode::RadialDeviation: return {{1}};
        case MotionMode::UlnarDeviation: return {{4}};
        case MotionMode::DTM: return {{2}, {5}};
        case MotionMode::DTMMirror: return {{3}, {6}};
        case MotionMode::Circumduction: return {{1, 2, 3, 4, 5, 6}};
        case MotionMode::WorkspaceSweep: break;
    }
    throw Error(ErrorCode::UnsupportedMode, std::string(to_string(mode)) + " has no key action tendons");
}

double Schedule::value(int channel, double t) const {
    const auto& bp = channels.at(static_cast<std::size_t>(channel));
    if (bp.empty() || t <= bp.front().t) return bp.empty() ? 0.0 : bp.front().value;
    if (t >= bp.back().t) return bp.back().value;
    const auto hi = std::upper_bound(bp.begin(), bp.end(), t, [](double x, const Breakpoint& b) { return x < b.t; });
    const auto lo = hi - 1;
    const double span = hi->t - lo->t;
    if (span <= 0.0) return hi->value;
    const double w = (t - lo->t) / span;
    return lo->value + w * (hi->value - lo->value);
}

std::vector<double> sample_times(double duration, double samples_per_second) {
    if (!(samples_per_second > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
    if (!(duration >= 0.0)) throw Error(ErrorCode::InvalidArgument, "duration must be non-negative");
    std::vector<double> times;
    const long count = static_cast<long>(std::floor(duration * samples_per_second + 1e-9));
    for (long i = 0; i <= count; ++i) times.push_back(static_cast<double>(i) / samples_per_second);
    if (duration - times.back() > 1e-9) times.push_back(duration);
    return times;
}

std::array<double, 6> Schedule::at(double t) const {
    std::array<double, 6> out{};
    for (int c = 0; c < 6; ++c) out[c] = value(c, t);
    return out;
}

void validate(const Schedule& schedule) {
    if (!(schedule.duration > 0.0)) throw Error(ErrorCode::InvalidArgument, "schedule duration must be positive");
    for (const auto& ch : schedule.channels) {
        if (ch.empty()) throw Error(ErrorCode::InvalidArgument, "schedule channel has no breakpoints");
        if (ch.front().t != 0.0 || ch.back().t != schedule.duration) {
            throw Error(ErrorCode::InvalidArgument, "schedule channel must span [0, duration]");
        }
        for (std::size_t i = 0; i < ch.size(); ++i) {
            if (!(ch[i].value >= 0.0 && ch[i].value <= 1.0)) {
                throw Error(ErrorCode::InvalidArgument, "schedule value outside [0, 1]");
            }
            if (i > 0 && !(ch[i].t > ch[i - 1].t)) {
                throw Error(ErrorCode::InvalidArgument, "schedule breakpoints must be strictly increasing");
            }
        }
    }
}

Schedule make_basic_schedule(MotionMode mode, double max_contraction, double pull_seconds, double loosen_seconds) {
    if (mode != MotionMode::Extension && mode != MotionMode::Flexion && mode != MotionMode::RadialDeviation &&
        mode != MotionMode::UlnarDeviation) {
        throw Error(ErrorCode::UnsupportedMode, std::string(to_string(mode)) + " is not a basic movement");
    }
    check_contraction(max_contraction);
    if (!(pull_seconds > 0.0) || !(loosen_seconds > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ramp durations must be positive");
    }
    Schedule s = idle_schedule(pull_seconds + loosen_seconds);
    const auto kat = key_action_tendons(mode);
    for (int tendon : kat.front()) {
        s.channels[tendon - 1] = triangle(0.0, pull_seconds, loosen_seconds, max_contraction, s.duration);
    }
    return s;
}

Schedule make_workspace_schedule(double max_contraction, double pull_seconds, double loosen_seconds) {
    check_contraction(max_contraction);
    if (!(pull_seconds > 0.0) || !(loosen_seconds > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ramp durations must be positive");
    }
    const double period = pull_seconds + loosen_seconds;
    Schedule s = idle_schedule(6.0 * period);
    for (int c = 0; c < 6; ++c) {
        s.channels[c] = triangle(c * period, pull_seconds, loosen_seconds, max_contraction, s.duration);
    }
    return s;
}

Schedule make_dtm_schedule(bool mirror, double max_contraction) {
    check_contraction(max_contraction);
    const double period = kDefaultPullSeconds + kDefaultLoosenSeconds;
    Schedule s = idle_schedule(2.0 * period);
    const auto kat = key_action_tendons(mirror ? MotionMode::DTMMirror : MotionMode::DTM);
    for (std::size_t phase = 0; phase < kat.size(); ++phase) {
        for (int tendon : kat[phase]) {
            s.channels[tendon - 1] = triangle(phase * period, kDefaultPullSeconds, kDefaultLoosenSeconds,
                                              max_contraction, s.duration);
        }
    }
    return s;
}

Schedule make_circumduction_schedule(double max_contraction) {
    check_contraction(max_contraction);
    const double last_start = 5.0 * kCircumductionPhaseSeconds;
    Schedule s = idle_schedule(last_start + kDefaultPullSeconds + kCircumductionLoosenSeconds);
    for (int c = 0; c < 6; ++c) {
        s.channels[c] = triangle(c * kCircumductionPhaseSeconds, kDefaultPullSeconds, kCircumductionLoosenSeconds,
                                 max_contraction, s.duration);
    }
    return s;
}

Schedule make_schedule(MotionMode mode, double max_contraction) {
    switch (mode) {
        case MotionMode::DTM: return make_dtm_schedule(false, max_contraction);
        case MotionMode::DTMMirror: return make_dtm_schedule(true, max_contraction);
        case MotionMode::Circumduction: return make_circumduction_schedule(max_contraction);
        case MotionMode::WorkspaceSweep: return make_workspace_schedule(max_contraction);
        default: return make_basic_schedule(mode, max_contraction);
    }
}

}  // namespace kresling
