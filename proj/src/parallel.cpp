#include "kresling/parallel.hpp"

#include <exception>

namespace kresling {

std::vector<double> evaluate_objective_batch_serial(const ElasticModel& model,
                                                    const std::vector<Eigen::VectorXd>& states,
                                                    const TendonCommand& command, double penalty_weight) {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out[i] = solver_objective(model, states[i], command, penalty_weight);
    }
    return out;
}

std::vector<double> evaluate_objective_batch_parallel(const ElasticModel& model,
                                                      const std::vector<Eigen::VectorXd>& states,
                                                      const TendonCommand& command, double penalty_weight) {
    std::vector<double> out(states.size());
    const long n = static_cast<long>(states.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = solver_objective(model, states[i], command, penalty_weight);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::array<Trajectory, kTendons> workspace_sweeps_serial(const ElasticModel& model, int steps,
                                                         double max_contraction, const SolveOptions& options) {
    std::array<Trajectory, kTendons> out;
    for (int t = 0; t < kTendons; ++t) {
        out[t] = sweep_single_tendon(model, TendonId(t + 1), steps, max_contraction, options);
    }
    return out;
}

std::array<Trajectory, kTendons> workspace_sweeps_parallel(const ElasticModel& model, int steps,
                                                           double max_contraction, const SolveOptions& options) {
    std::array<Trajectory, kTendons> out;
    std::array<std::exception_ptr, kTendons> failures;
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < kTendons; ++t) {
        try {
            out[t] = sweep_single_tendon(model, TendonId(t + 1), steps, max_contraction, options);
        } catch (...) {
            failures[t] = std::current_exception();
        }
    }
    // Report the lowest failing tendon, as the serial loop would.
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return out;
}

WorkspaceSummary summarize_workspace(const std::array<Trajectory, kTendons>& sweeps) {
    WorkspaceSummary s;
    for (int t = 0; t < kTendons; ++t) {
        for (const auto& sample : sweeps[t].samples) {
            if (sample.beta_deg > s.max_beta_deg[t]) {
                s.max_beta_deg[t] = sample.beta_deg;
                s.phi_at_max_deg[t] = sample.phi_deg;
            }
        }
    }
    return s;
}

}  // namespace kresling
