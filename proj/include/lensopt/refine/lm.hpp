#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lensopt/niching/archive.hpp"
#include "lensopt/optics/types.hpp"

namespace lensopt::refine {

/// Axis-aligned box the refinement is confined to.
struct Box {
    Vector6 lo;
    Vector6 hi;

    static Box curvature_box();
    static Box unbounded();

    Vector6 clip(const Vector6& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

/// Residual map; empty optional marks an infeasible point.
using ResidualFn = std::function<std::optional<Eigen::VectorXd>(const Vector6&)>;

class InfeasibleNeighborhood : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Central-difference Jacobian with step h. A coordinate whose +h or -h
/// perturbation leaves the box gets a one-sided difference instead. Throws
/// InfeasibleNeighborhood if any perturbed point is infeasible.
Eigen::MatrixXd jacobian_fd(const ResidualFn& residuals, const Vector6& x, double h, const Box& box);

/// Returns which columns jacobian_fd would difference one-sidedly.
std::array<bool, kNumSurfaces> one_sided_columns(const Vector6& x, double h, const Box& box);

enum class Termination {
    merit_stagnation,
    max_iterations,
    infeasible_step_wall,
    singular_system,
};

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct RefineResult {
    Vector6 start = Vector6::Zero();
    Vector6 refined = Vector6::Zero();
    double merit_before = 0.0;
    double merit_after = 0.0;
    int iterations = 0;  // accepted steps
    bool converged = false;
    Termination termination = Termination::max_iterations;
};

struct LmSettings {
    int max_iter = 200;
    double damping0 = 1e-6;
    double h = 1e-6;
    /// Relative merit improvement counted as stagnation.
    double stagnation_tol = 1e-10;
    int stagnation_steps = 3;
    /// Consecutive rejected trials before giving up on the current point.
    int max_rejections = 60;
    int max_singular_escalations = 20;
    Box box = Box::curvature_box();
    /// Called after every accepted step with the new point and merit.
    std::function<void(const Vector6&, double)> on_accept;
};

/// Levenberg-Marquardt on (J^T J + mu I) delta = -J^T r with mu halved on
/// accept and doubled on reject; iterates are clipped into settings.box.
RefineResult lm_refine(const ResidualFn& residuals, const Vector6& x0, const LmSettings& settings);

struct RefineSummary {
    std::vector<RefineResult> results;
    int skipped_infeasible = 0;
};

/// Refines every feasible record of the last `depth` generations. Results
/// keep archive order; points are processed on `threads` workers (0 = all
/// hardware threads).
RefineSummary refine_archive(std::span<const niching::EvaluationRecord> archive, int depth,
                             const ResidualFn& residuals, const LmSettings& settings, unsigned threads = 0);

void write_refine_results(std::ostream& out, std::span<const RefineResult> results);
void write_refine_results(const std::filesystem::path& path, std::span<const RefineResult> results);
std::vector<RefineResult> read_refine_results(std::istream& in);
std::vector<RefineResult> read_refine_results(const std::filesystem::path& path);

}  // namespace lensopt::refine
