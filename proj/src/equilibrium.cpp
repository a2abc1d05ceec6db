#include "kresling/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/AutoDiff>

#include "kresling/detail/pose.hpp"
#include "kresling/error.hpp"

namespace kresling {

namespace {

constexpr double kContactBlend = 0.05;  // mm
constexpr int kPolishIterations = 8;
constexpr int kMaxDimension = kUnitDofs * kSections;
using Derivatives = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDimension, 1>;
using Dual = Eigen::AutoDiffScalar<Derivatives>;

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

// Quadratic penalty k p^2 / 2 for p >= delta blended into a cubic below it, so the
// energy stays twice differentiable where contact starts.
template <class S>
S contact_penalty(const S& p, double k, double delta) {
    if (value_of(p) <= 0.0) return S(0.0);
    if (value_of(p) < delta) return k * p * p * p / (6.0 * delta);
    return k * (0.5 * p * p - 0.5 * delta * p + delta * delta / 6.0);
}

struct Terms {
    bool tendons = false;
    bool contact = false;
    const TendonCommand* command = nullptr;
    double penalty_weight = 0.0;
    // Frozen taut/slack pattern; keeps finite-difference Hessians on one branch of the penalty.
    const std::array<bool, kTendons>* taut = nullptr;
    std::array<double, kTendons>* stretch = nullptr;
};

template <class S>
detail::Frame<S> column_frame(const ElasticModel& model) {
    detail::Frame<S> f;
    // The model always uses the canonical forearm frame.
    const detail::M3<double> axes = detail::rotation_z<double>(model.column_offset_deg * kDeg);
    f.center = detail::V3<S>::Zero();
    f.axes = axes.cast<S>();
    return f;
}

template <class S>
S evaluate(const ElasticModel& model, const std::vector<S>& x, const Terms& terms) {
    S energy(0.0);
    std::array<detail::UnitPose<S>, kSections> poses;
    detail::Frame<S> frame = column_frame<S>(model);
    const double kf = model.facet_stiffness;
    const double kc = model.crease_stiffness;
    const double kcontact = model.contact_stiffness;
    const double gap = model.frame_clearance_mm;

    int slot = static_cast<int>(x.size()) / kUnitDofs;
    for (int i = kSections - 1; i >= 0; --i) {
        const UnitSpec& spec = model.design.units[i];
        S h, tw, tx, ty;
        if (model.locked[i]) {
            const auto& c = model.neutral[i];
            h = S(c.height);
            tw = S(c.twist_deg * kDeg);
            tx = S(0.0);
            ty = S(0.0);
        } else {
            --slot;
            h = x[kUnitDofs * slot];
            tw = x[kUnitDofs * slot + 1];
            tx = x[kUnitDofs * slot + 2];
            ty = x[kUnitDofs * slot + 3];
        }
        auto& pose = poses[i];
        pose = detail::place_unit<S>(frame, spec.a1, spec.a2, h, tw, tx, ty);
        const int shift = chirality_shift(spec.chirality);
        for (int k = 0; k < kCellsPerUnit; ++k) {
            const S lm = (pose.top[k] - pose.bottom[k]).norm() - model.rest_mountain[i][k];
            const S lv = (pose.top[detail::wrap_column(k + shift)] - pose.bottom[k]).norm() - model.rest_valley[i][k];
            energy += 0.5 * kf * lm * lm + 0.5 * kc * lv * lv;
        }
        if (terms.contact && !model.locked[i]) {
            const detail::V3<S> n_bottom = frame.axes.col(2);
            const detail::V3<S> n_top = pose.top_frame.axes.col(2);
            for (int k = 0; k < kCellsPerUnit; ++k) {
                const S above = (pose.top[k] - frame.center).dot(n_bottom);
                energy += contact_penalty<S>(gap - above, kcontact, kContactBlend);
                const S below = (pose.top_frame.center - pose.bottom[k]).dot(n_top);
                energy += contact_penalty<S>(gap - below, kcontact, kContactBlend);
            }
            const double onset = kBendContactOnset * model.bend_limit_deg[i] * kDeg;
            const S tilt2 = tx * tx + ty * ty;
            if (value_of(tilt2) > onset * onset) {
                using std::sqrt;
                energy += contact_penalty<S>((sqrt(tilt2) - onset) * spec.a1, kcontact, kContactBlend);
            }
        }
        frame = pose.top_frame;
    }

    if (terms.tendons) {
        for (int t = 0; t < kTendons; ++t) {
            const double target = (1.0 - terms.command->contraction[t]) * model.neutral_tendon_lengths[t];
            S length(0.0);
            int column = t;
            for (int i = kSections - 1; i >= 0; --i) {
                const int next = detail::wrap_column(column + chirality_shift(model.design.units[i].chirality));
                length += (poses[i].top[next] - poses[i].bottom[column]).norm();
                column = next;
            }
            const S stretch = length - target;
            if constexpr (std::is_same_v<S, double>) {
                if (terms.stretch) (*terms.stretch)[t] = stretch;
            }
            const bool active = terms.taut ? (*terms.taut)[t] : value_of(stretch) > 0.0;
            if (active) energy += 0.5 * terms.penalty_weight * stretch * stretch;
        }
    }
    return energy;
}

double evaluate_value(const ElasticModel& model, const Eigen::VectorXd& p, const Terms& terms) {
    std::vector<double> x(p.data(), p.data() + p.size());
    return evaluate<double>(model, x, terms);
}

EnergyValue evaluate_gradient(const ElasticModel& model, const Eigen::VectorXd& p, const Terms& terms) {
    const int n = static_cast<int>(p.size());
    std::vector<Dual> x(n);
    for (int j = 0; j < n; ++j) x[j] = Dual(p[j], n, j);
    const Dual e = evaluate<Dual>(model, x, terms);
    EnergyValue out;
    out.energy = e.value();
    out.gradient = Eigen::VectorXd::Zero(n);
    if (e.derivatives().size() == n) out.gradient = e.derivatives();
    return out;
}

void check_dimension(const ElasticModel& model, const Eigen::VectorXd& p) {
    if (p.size() != model.dimension()) {
        throw Error(ErrorCode::InvalidArgument, "parameter vector has the wrong dimension");
    }
}

Terms solver_terms(const TendonCommand& command, double weight) {
    return Terms{true, true, &command, weight};
}

}  // namespace

std::vector<int> ElasticModel::free_units() const {
    std::vector<int> out;
    for (int i = 0; i < kSections; ++i) {
        if (!locked[i]) out.push_back(i);
    }
    return out;
}

ElasticModel build_elastic_model(const OrthosisDesign& design, double crease_stiffness, double facet_stiffness,
                                 const ModelOptions& options) {
    validate(design);
    if (!(crease_stiffness > 0.0)) throw Error(ErrorCode::InvalidArgument, "crease stiffness must be positive");
    if (!(facet_stiffness >= crease_stiffness)) {
        throw Error(ErrorCode::InvalidArgument, "facet stiffness must be at least the crease stiffness");
    }
    if (!(options.contact_to_facet > 0.0)) throw Error(ErrorCode::InvalidArgument, "contact stiffness must be positive");
    if (!(options.frame_clearance_mm >= 0.0)) throw Error(ErrorCode::InvalidArgument, "frame clearance must be non-negative");

    ElasticModel model;
    model.design = design;
    model.crease_stiffness = crease_stiffness;
    model.facet_stiffness = facet_stiffness;
    model.contact_stiffness = options.contact_to_facet * facet_stiffness;
    model.marker_offset_mm = options.marker_offset_mm;
    model.frame_clearance_mm = options.frame_clearance_mm;
    for (int i = 0; i < kSections; ++i) {
        model.locked[i] = design.locked[i] || options.pinned[i] || (i == 1 && options.pin_section2);
    }

    const StackConfiguration stack = neutral_stack(design);
    model.column_offset_deg = stack.column_offset_deg;
    for (int i = 0; i < kSections; ++i) {
        model.neutral[i] = stack.units[i];
        const EdgeLengths lengths = edge_lengths(design.units[i], model.neutral[i]);
        model.rest_mountain[i] = lengths.mountain;
        model.rest_valley[i] = lengths.valley;
        if (!model.locked[i]) {
            model.bend_limit_deg[i] =
                std::min(max_bend_angle_lateral(design.units[i]), max_bend_angle_sagittal(design.units[i]));
        }
    }
    model.neutral_tendon_lengths = tendon_lengths(design, stack);
    return model;
}

Eigen::VectorXd neutral_parameters(const ElasticModel& model) {
    return to_parameters(model, to_stack(model, Eigen::VectorXd::Zero(0)));
}

StackConfiguration to_stack(const ElasticModel& model, const Eigen::VectorXd& parameters) {
    StackConfiguration stack;
    stack.base.radius = model.design.units[kSections - 1].a1;
    stack.column_offset_deg = model.column_offset_deg;
    stack.units = model.neutral;
    if (parameters.size() == 0) return stack;
    check_dimension(model, parameters);
    const auto free = model.free_units();
    for (std::size_t j = 0; j < free.size(); ++j) {
        const int i = free[j];
        const double tx = parameters[kUnitDofs * j + 2];
        const double ty = parameters[kUnitDofs * j + 3];
        UnitConfiguration& c = stack.units[i];
        c.height = parameters[kUnitDofs * j];
        c.twist_deg = parameters[kUnitDofs * j + 1] / kDeg;
        c.bend_angle_deg = std::hypot(tx, ty) / kDeg;
        c.bend_azimuth_deg = (tx == 0.0 && ty == 0.0) ? 0.0 : std::atan2(ty, tx) / kDeg;
    }
    return stack;
}

Eigen::VectorXd to_parameters(const ElasticModel& model, const StackConfiguration& stack) {
    const auto free = model.free_units();
    Eigen::VectorXd p(kUnitDofs * static_cast<int>(free.size()));
    for (std::size_t j = 0; j < free.size(); ++j) {
        const UnitConfiguration& c = stack.units[free[j]];
        const double beta = c.bend_angle_deg * kDeg;
        const double phi = c.bend_azimuth_deg * kDeg;
        p[kUnitDofs * j] = c.height;
        p[kUnitDofs * j + 1] = c.twist_deg * kDeg;
        p[kUnitDofs * j + 2] = beta * std::cos(phi);
        p[kUnitDofs * j + 3] = beta * std::sin(phi);
    }
    return p;
}

EnergyValue total_energy(const ElasticModel& model, const Eigen::VectorXd& parameters) {
    check_dimension(model, parameters);
    return evaluate_gradient(model, parameters, Terms{});
}

void validate(const TendonCommand& command) {
    for (double c : command.contraction) {
        if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tendon contraction must lie in [0, 1]");
    }
}

double solver_objective(const ElasticModel& model, const Eigen::VectorXd& parameters, const TendonCommand& command,
                        double weight) {
    check_dimension(model, parameters);
    return evaluate_value(model, parameters, solver_terms(command, weight));
}

EnergyValue solver_objective_with_gradient(const ElasticModel& model, const Eigen::VectorXd& parameters,
                                           const TendonCommand& command, double weight) {
    check_dimension(model, parameters);
    return evaluate_gradient(model, parameters, solver_terms(command, weight));
}

double penalty_weight(const ElasticModel& model, const SolveOptions& options) {
    return options.penalty_weight.value_or(1e3 * model.crease_stiffness);
}

namespace {

std::array<bool, kTendons> taut_pattern(const ElasticModel& model, const Eigen::VectorXd& p, const Terms& terms) {
    std::array<double, kTendons> stretch{};
    Terms probe = terms;
    probe.stretch = &stretch;
    std::vector<double> x(p.data(), p.data() + p.size());
    evaluate<double>(model, x, probe);
    std::array<bool, kTendons> taut{};
    for (int t = 0; t < kTendons; ++t) taut[t] = terms.tendons && stretch[t] > 0.0;
    return taut;
}

Eigen::MatrixXd finite_difference_hessian(const ElasticModel& model, const Eigen::VectorXd& x, const Terms& terms) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd probe = x;
    for (int j = 0; j < n; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
        probe[j] = x[j] + step;
        const Eigen::VectorXd gp = evaluate_gradient(model, probe, terms).gradient;
        probe[j] = x[j] - step;
        const Eigen::VectorXd gm = evaluate_gradient(model, probe, terms).gradient;
        probe[j] = x[j];
        h.col(j) = (gp - gm) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
}

// Damping metric: diagonal of H with the two tilt entries of a unit shared so the
// step stays equivariant under rotations of the tilt plane.
Eigen::VectorXd damping_diagonal(const Eigen::MatrixXd& h) {
    const int n = static_cast<int>(h.rows());
    Eigen::VectorXd d = h.diagonal().cwiseAbs();
    for (int j = 0; j + kUnitDofs - 1 < n; j += kUnitDofs) {
        const double tilt = 0.5 * (d[j + 2] + d[j + 3]);
        d[j + 2] = tilt;
        d[j + 3] = tilt;
    }
    const double floor = 1e-12 * std::max(1.0, d.maxCoeff());
    return d.cwiseMax(floor);
}

double force_scale(const ElasticModel& model) {
    double b = 0.0;
    for (const auto& u : model.design.units) b += u.b;
    return model.facet_stiffness * b / kSections;
}

}  // namespace

SolveResult solve_equilibrium(const ElasticModel& model, const TendonCommand& command, const SolveOptions& options) {
    validate(command);
    if (!(options.energy_tolerance > 0.0) || options.max_iterations <= 0) {
        throw Error(ErrorCode::InvalidArgument, "solver tolerance and iteration limit must be positive");
    }
    const Terms terms = solver_terms(command, penalty_weight(model, options));

    Eigen::VectorXd x = options.seed ? to_parameters(model, *options.seed) : neutral_parameters(model);
    EnergyValue current = evaluate_gradient(model, x, terms);

    SolveResult result;
    result.seed_energy = current.energy;
    result.gradient_threshold = 1e-2 * std::sqrt(options.energy_tolerance) * force_scale(model);
    const double floor = 1e-3 * result.gradient_threshold;

    double mu = 0.0;
    int iteration = 0;
    int stalled = 0;
    double best = std::numeric_limits<double>::infinity();
    while (iteration < options.max_iterations && x.size() > 0) {
        const double gnorm = current.gradient.norm();
        if (gnorm <= floor) break;
        // Past the threshold keep polishing only while the gradient still shrinks: at a
        // slack/taut kink of a tendon penalty Newton stops converging.
        if (gnorm < 0.5 * best) {
            best = gnorm;
            stalled = 0;
        } else if (gnorm <= result.gradient_threshold && ++stalled > kPolishIterations) {
            break;
        }
        const auto taut = taut_pattern(model, x, terms);
        Terms frozen = terms;
        frozen.taut = &taut;
        const Eigen::MatrixXd h = finite_difference_hessian(model, x, frozen);
        const Eigen::VectorXd d = damping_diagonal(h);
        bool accepted = false;
        Eigen::VectorXd trial;
        double trial_energy = 0.0;
        EnergyValue trial_eval;
        while (mu < 1e20) {
            Eigen::MatrixXd a = h;
            a.diagonal() += mu * d;
            const Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() == Eigen::Success) {
                trial = x - llt.solve(current.gradient);
                trial_energy = evaluate_value(model, trial, terms);
                if (std::isfinite(trial_energy) && trial_energy < current.energy) {
                    accepted = true;
                    break;
                }
                // Energy differences drown in rounding near the minimum; fall back to the gradient.
                if (std::isfinite(trial_energy) &&
                    trial_energy <= current.energy + 1e-13 * std::abs(current.energy)) {
                    trial_eval = evaluate_gradient(model, trial, terms);
                    if (trial_eval.gradient.norm() < 0.5 * current.gradient.norm()) {
                        accepted = true;
                        break;
                    }
                }
            }
            mu = (mu == 0.0) ? 1e-8 : mu * 10.0;
        }
        ++iteration;
        if (!accepted) break;
        x = trial;
        current = evaluate_gradient(model, x, terms);
        mu = (mu < 1e-7) ? 0.0 : mu * 0.1;
    }

    result.parameters = x;
    result.configuration = to_stack(model, x);
    result.energy = current.energy;
    result.elastic_energy = evaluate_value(model, x, Terms{});
    result.gradient_norm = current.gradient.norm();
    result.converged = result.gradient_norm <= result.gradient_threshold;
    result.iterations = iteration;
    return result;
}

Vec3 marker_position(const ElasticModel& model, const StackConfiguration& stack) {
    const SpatialFrame palm = palm_frame(stack);
    return palm.center + model.marker_offset_mm * palm.normal;
}

TrajectorySample sample_state(const ElasticModel& model, const StackConfiguration& stack, double t) {
    TrajectorySample s;
    s.t = t;
    s.marker = marker_position(model, stack);
    const StackBend bend = stack_bend_angle(stack);
    s.beta_deg = bend.beta_deg;
    s.phi_deg = bend.phi_deg;
    s.tendon_lengths = tendon_lengths(model.design, stack);
    return s;
}

namespace {

template <class CommandAt>
Trajectory quasi_static(const ElasticModel& model, const std::vector<double>& times, CommandAt&& command_at,
                        const SolveOptions& options) {
    Trajectory out;
    out.samples.reserve(times.size());
    SolveOptions opts = options;
    for (double t : times) {
        const TendonCommand command = command_at(t);
        const SolveResult r = solve_equilibrium(model, command, opts);
        if (!r.converged) {
            throw Error(ErrorCode::NotConverged, "equilibrium solve failed at t = " + std::to_string(t) + " s");
        }
        out.samples.push_back(sample_state(model, r.configuration, t));
        opts.seed = r.configuration;
    }
    return out;
}

}  // namespace

Trajectory sweep_single_tendon(const ElasticModel& model, TendonId tendon, int steps, double max_contraction,
                               const SolveOptions& options) {
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "a sweep needs at least two steps");
    if (!(max_contraction > 0.0 && max_contraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "max contraction must lie in (0, 1]");
    }
    const double period = kDefaultPullSeconds + kDefaultLoosenSeconds;
    std::vector<double> times(steps);
    for (int i = 0; i < steps; ++i) times[i] = period * i / (steps - 1);
    return quasi_static(
        model, times,
        [&](double t) {
            TendonCommand c;
            const double ramp = t <= kDefaultPullSeconds ? t / kDefaultPullSeconds : (period - t) / kDefaultLoosenSeconds;
            c.contraction[tendon.column()] = std::clamp(max_contraction * ramp, 0.0, 1.0);
            return c;
        },
        options);
}

Trajectory run_schedule(const ElasticModel& model, const Schedule& schedule, double samples_per_second,
                        const SolveOptions& options) {
    validate(schedule);
    return quasi_static(
        model, sample_times(schedule.duration, samples_per_second),
        [&](double t) {
            TendonCommand c;
            c.contraction = schedule.at(t);
            for (double& v : c.contraction) v = std::clamp(v, 0.0, 1.0);
            return c;
        },
        options);
}

}  // namespace kresling
