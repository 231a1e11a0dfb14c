#include "lensopt/analysis/infeasibility.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "lensopt/analysis/shapiro_wilk.hpp"

namespace lensopt::analysis {

namespace {

constexpr double kInteriorMargin = 1e-9;

// First `count` entries of `pool` become a uniform sample without replacement.
template <typename T>
void partial_shuffle(std::vector<T>& pool, std::size_t count, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
}

}  // namespace

void InfeasibilityStudyConfig::validate() const {
    if (reps < 1) throw ConfigError("infeasibility study needs reps >= 1");
    if (subsample < 2) throw ConfigError("infeasibility subsample must be at least 2");
    const long pairs = static_cast<long>(subsample) * (subsample - 1) / 2;
    if (k_minima < 1 || k_minima >= pairs)
        throw ConfigError(fmt::format("k_minima must lie in [1, {})", pairs));
    if (sw_subsample < 3 || sw_subsample > pairs)
        throw ConfigError(fmt::format("sw_subsample must lie in [3, {}]", pairs));
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

InfeasibilityStudyConfig infeasibility_config_from_json(const nlohmann::json& j) {
    InfeasibilityStudyConfig c;
    try {
        if (j.contains("reps")) c.reps = j.at("reps").get<int>();
        if (j.contains("subsample")) c.subsample = j.at("subsample").get<int>();
        if (j.contains("k_minima")) c.k_minima = j.at("k_minima").get<int>();
        if (j.contains("sw_subsample")) c.sw_subsample = j.at("sw_subsample").get<int>();
        if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad infeasibility config: {}", e.what()));
    }
    c.validate();
    return c;
}

nlohmann::json infeasibility_config_to_json(const InfeasibilityStudyConfig& c) {
    return {{"reps", c.reps},
            {"subsample", c.subsample},
            {"k_minima", c.k_minima},
            {"sw_subsample", c.sw_subsample},
            {"alpha", c.alpha},
            {"seed", c.seed}};
}

double InfeasibilityStudy::normal_fraction() const {
    int tested = 0, normal = 0;
    for (const auto& r : reps) {
        if (!r.error.empty()) continue;
        ++tested;
        if (r.p_value > config.alpha) ++normal;
    }
    return tested == 0 ? 0.0 : static_cast<double>(normal) / tested;
}

bool strictly_inside(const Vector6& x, const Vector6& lo, const Vector6& hi) {
    return ((x - lo).array() > kInteriorMargin).all() && ((hi - x).array() > kInteriorMargin).all();
}

std::vector<Vector6> interior_infeasible(std::span<const niching::EvaluationRecord> archive, const Vector6& lo,
                                         const Vector6& hi) {
    std::vector<Vector6> out;
    for (const auto& r : archive)
        if (!r.feasible && strictly_inside(r.vector, lo, hi)) out.push_back(r.vector);
    return out;
}

InfeasibilityStudy infeasibility_study(std::span<const Vector6> points, const InfeasibilityStudyConfig& config) {
    config.validate();
    InfeasibilityStudy study;
    study.config = config;
    study.eligible = points.size();
    const auto sub = static_cast<std::size_t>(config.subsample);
    if (points.size() < sub)
        throw InsufficientPopulation(
            fmt::format("insufficient_population: {} eligible points, subsample needs {}", points.size(), sub));

    std::vector<std::size_t> pool(points.size());
    std::vector<double> distances;
    distances.reserve(sub * (sub - 1) / 2);
    for (int rep = 0; rep < config.reps; ++rep) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(rep)};
        std::mt19937_64 rng(seq);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        partial_shuffle(pool, sub, rng);

        distances.clear();
        for (std::size_t i = 0; i < sub; ++i)
            for (std::size_t j = i + 1; j < sub; ++j) distances.push_back((points[pool[i]] - points[pool[j]]).norm());

        InfeasibilityRep row;
        row.rep = rep;
        const auto k = static_cast<std::size_t>(config.k_minima);
        partial_shuffle(distances, static_cast<std::size_t>(config.sw_subsample), rng);
        std::vector<double> tested(distances.begin(), distances.begin() + config.sw_subsample);
        std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k - 1), distances.end());
        row.minima.assign(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(row.minima.begin(), row.minima.end());
        try {
            const auto sw = shapiro_wilk(tested);
            row.w = sw.w;
            row.p_value = sw.p_value;
        } catch (const ShapiroWilkError& e) {
            row.w = row.p_value = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
        study.reps.push_back(std::move(row));
    }
    return study;
}

}  // namespace lensopt::analysis
