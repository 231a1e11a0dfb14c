#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lensopt/niching/archive.hpp"
#include "lensopt/optics/types.hpp"

namespace lensopt::analysis {

struct InfeasibilityStudyConfig {
    int reps = 100;
    int subsample = 500;
    int k_minima = 10;
    int sw_subsample = 5000;
    double alpha = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

InfeasibilityStudyConfig infeasibility_config_from_json(const nlohmann::json& j);
nlohmann::json infeasibility_config_to_json(const InfeasibilityStudyConfig& c);

class InsufficientPopulation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InfeasibilityRep {
    int rep = 0;
    std::vector<double> minima;  // k smallest pairwise distances, ascending
    double w = 0.0;
    double p_value = 0.0;
    std::string error;  // non-empty when the normality test could not run
};

struct InfeasibilityStudy {
    InfeasibilityStudyConfig config;
    std::size_t eligible = 0;
    std::vector<InfeasibilityRep> reps;

    /// Repetitions with a p-value above alpha, over those with a p-value.
    double normal_fraction() const;
};

/// True iff every coordinate is more than 1e-9 from both bounds.
bool strictly_inside(const Vector6& x, const Vector6& lo, const Vector6& hi);

/// Infeasible archive records strictly inside the box.
std::vector<Vector6> interior_infeasible(std::span<const niching::EvaluationRecord> archive, const Vector6& lo,
                                         const Vector6& hi);

/// Per repetition: a subsample without replacement, its k smallest pairwise
/// distances, and the Shapiro-Wilk p-value of sw_subsample of its pairwise
/// distances. Repetition r draws from its own generator seeded by (seed, r).
InfeasibilityStudy infeasibility_study(std::span<const Vector6> points, const InfeasibilityStudyConfig& config);

}  // namespace lensopt::analysis
