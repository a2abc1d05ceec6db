#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "kresling/equilibrium.hpp"

namespace kresling {

// Solver objective at many parameter vectors. The parallel variant splits the batch
// over OpenMP threads; both return identical values in input order.
std::vector<double> evaluate_objective_batch_serial(const ElasticModel& model,
                                                    const std::vector<Eigen::VectorXd>& states,
                                                    const TendonCommand& command, double penalty_weight);
std::vector<double> evaluate_objective_batch_parallel(const ElasticModel& model,
                                                      const std::vector<Eigen::VectorXd>& states,
                                                      const TendonCommand& command, double penalty_weight);

// One single-tendon sweep per tendon. Each sweep's warm-start chain stays in one lane,
// so the parallel result does not depend on the thread count.
std::array<Trajectory, kTendons> workspace_sweeps_serial(const ElasticModel& model, int steps,
                                                         double max_contraction, const SolveOptions& options = {});
std::array<Trajectory, kTendons> workspace_sweeps_parallel(const ElasticModel& model, int steps,
                                                           double max_contraction, const SolveOptions& options = {});

struct WorkspaceSummary {
    std::array<double, kTendons> max_beta_deg{};
    std::array<double, kTendons> phi_at_max_deg{};
};

WorkspaceSummary summarize_workspace(const std::array<Trajectory, kTendons>& sweeps);

}  // namespace kresling
