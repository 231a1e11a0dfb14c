#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "lensopt/niching/archive.hpp"
#include "lensopt/niching/cma_constants.hpp"
#include "lensopt/optics/types.hpp"

namespace lensopt::niching {

using Rng = std::mt19937_64;

struct NichingConfig {
    int q = 20;       // target niches
    int p = 5;        // extra kernels beyond the target niche count
    int lambda = 10;  // offspring per kernel
    int kappa = 20;   // non-peak reset cycle, generations
    double sigma0 = 0.05;
    double rho = 0.18;
    long budget = 25000;
    Vector6 domain_lo = Vector6::Constant(-kCurvatureBound);
    Vector6 domain_hi = Vector6::Constant(kCurvatureBound);
    int archive_depth = 10;

    int kernels() const { return q + p; }
    long evaluations_per_generation() const { return static_cast<long>(kernels()) * lambda; }
    void validate() const;
};

NichingConfig niching_config_from_json(const nlohmann::json& j);
nlohmann::json niching_config_to_json(const NichingConfig& c);

struct NicheState {
    Vector6 peak = Vector6::Zero();
    double fitness = std::numeric_limits<double>::infinity();
    double sigma = 0.05;
    Matrix6 covariance = Matrix6::Identity();
    Vector6 path_sigma = Vector6::Zero();
    Vector6 path_c = Vector6::Zero();
    int age = 0;
};

struct PeakIndividual {
    Vector6 vector = Vector6::Zero();
    double merit = 0.0;
    int niche_id = 0;
};

/// Fitness-ordered peaks, pairwise at least rho apart.
struct DynamicPeakSet {
    std::vector<PeakIndividual> peaks;

    bool contains_niche(int niche_id) const;
};

/// Greedy sweep in ascending merit (ties: lexicographic vector order, then
/// input index); a candidate joins iff it is >= rho from every accepted peak.
DynamicPeakSet select_dynamic_peaks(std::span<const EvaluationRecord> population, double rho, int max_peaks);

/// Coordinate-wise clip into [lo, hi].
Vector6 repair_to_boundary(const Vector6& x, const Vector6& lo, const Vector6& hi);

/// Symmetrizes the covariance and floors its eigenvalues at 1e-14 of the
/// largest. Returns true if anything had to be changed beyond symmetrization.
bool repair_covariance(Matrix6& covariance);

/// lambda draws from N(peak, sigma^2 C), each repaired into the box.
std::vector<Vector6> sample_offspring(NicheState& kernel, int lambda, Rng& rng, const Vector6& lo,
                                      const Vector6& hi);

/// (1,lambda) update: the mean moves to the best offspring unconditionally;
/// step size and covariance follow the cumulative evolution paths.
void update_kernel(NicheState& kernel, const Vector6& best_offspring, double best_merit, const CmaConstants& cma);

/// Fresh kernel: uniform mean in the box, sigma0, identity covariance.
NicheState fresh_kernel(Rng& rng, const NichingConfig& config);

/// On generations divisible by kappa, re-initializes every kernel whose peak
/// is absent from the peak set. Returns the number of kernels reset.
int reset_non_peaks(std::vector<NicheState>& kernels, const DynamicPeakSet& dps, int generation, Rng& rng,
                    const NichingConfig& config);

struct Evaluation {
    double merit;
    bool feasible;
};

using Objective = std::function<Evaluation(const Vector6&)>;

/// Thrown by an objective callback to abort the run.
class ObjectiveFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NichingResult {
    std::vector<EvaluationRecord> archive;
    DynamicPeakSet final_peaks;
    std::vector<NicheState> kernels;
    int generations = 0;
    long objective_calls = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// Called after each generation with the peak set and kernel states.
using GenerationObserver =
    std::function<void(int generation, const DynamicPeakSet& dps, std::span<const NicheState> kernels)>;

/// Runs generations while a full generation still fits in the budget.
/// `threads` parallelizes objective calls within a generation (0 = all
/// hardware threads); results do not depend on it.
NichingResult run_niching(const NichingConfig& config, const Objective& objective, std::uint64_t seed,
                          const GenerationObserver& observer = {}, unsigned threads = 1);

}  // namespace lensopt::niching
