#include "lensopt/niching/niching.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "lensopt/util/parallel.hpp"

namespace lensopt::niching {

namespace {

constexpr double kEigenFloor = 1e-14;
// Step-size guard rails; the upper one stops random walks on penalty plateaus.
constexpr double kMinSigma = 1e-20;
constexpr double kMaxSigma = 1.0;

bool lexicographic_less(const Vector6& a, const Vector6& b) {
    for (int k = 0; k < kNumSurfaces; ++k) {
        if (a[k] < b[k]) return true;
        if (b[k] < a[k]) return false;
    }
    return false;
}

Vector6 vector_from_json(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != kNumSurfaces)
        throw ConfigError(fmt::format("niching key '{}' must be an array of 6 numbers", key));
    Vector6 out;
    for (int k = 0; k < kNumSurfaces; ++k) out[k] = v[static_cast<std::size_t>(k)].get<double>();
    return out;
}

}  // namespace

void NichingConfig::validate() const {
    if (q < 1 || p < 0) throw ConfigError("niching needs q >= 1 and p >= 0");
    if (lambda < 1) throw ConfigError("lambda must be positive");
    if (kappa < 1) throw ConfigError("kappa must be positive");
    if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
    if (!(rho > 0.0)) throw ConfigError("niche radius rho must be positive");
    if (budget < evaluations_per_generation())
        throw ConfigError(fmt::format("budget {} is below one generation ({} evaluations)", budget,
                                      evaluations_per_generation()));
    if ((domain_hi.array() < domain_lo.array()).any()) throw ConfigError("domain_hi must be >= domain_lo");
    if (archive_depth < 0) throw ConfigError("archive depth must be non-negative");
}

NichingConfig niching_config_from_json(const nlohmann::json& j) {
    NichingConfig c;
    try {
        if (j.contains("q")) c.q = j.at("q").get<int>();
        if (j.contains("p")) c.p = j.at("p").get<int>();
        if (j.contains("lambda")) c.lambda = j.at("lambda").get<int>();
        if (j.contains("kappa")) c.kappa = j.at("kappa").get<int>();
        if (j.contains("sigma0")) c.sigma0 = j.at("sigma0").get<double>();
        if (j.contains("rho")) c.rho = j.at("rho").get<double>();
        if (j.contains("budget")) c.budget = j.at("budget").get<long>();
        if (j.contains("archive_depth")) c.archive_depth = j.at("archive_depth").get<int>();
        if (j.contains("domain_lo")) c.domain_lo = vector_from_json(j, "domain_lo");
        if (j.contains("domain_hi")) c.domain_hi = vector_from_json(j, "domain_hi");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad niching config: {}", e.what()));
    }
    c.validate();
    return c;
}

nlohmann::json niching_config_to_json(const NichingConfig& c) {
    return {{"q", c.q},
            {"p", c.p},
            {"lambda", c.lambda},
            {"kappa", c.kappa},
            {"sigma0", c.sigma0},
            {"rho", c.rho},
            {"budget", c.budget},
            {"archive_depth", c.archive_depth},
            {"domain_lo", std::vector<double>(c.domain_lo.begin(), c.domain_lo.end())},
            {"domain_hi", std::vector<double>(c.domain_hi.begin(), c.domain_hi.end())}};
}

bool DynamicPeakSet::contains_niche(int niche_id) const {
    return std::any_of(peaks.begin(), peaks.end(), [&](const auto& pk) { return pk.niche_id == niche_id; });
}

DynamicPeakSet select_dynamic_peaks(std::span<const EvaluationRecord> population, double rho, int max_peaks) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = population[a];
        const auto& rb = population[b];
        if (ra.merit != rb.merit) return ra.merit < rb.merit;
        if (lexicographic_less(ra.vector, rb.vector)) return true;
        if (lexicographic_less(rb.vector, ra.vector)) return false;
        return a < b;
    });

    DynamicPeakSet dps;
    for (std::size_t idx : order) {
        if (static_cast<int>(dps.peaks.size()) >= max_peaks) break;
        const auto& cand = population[idx];
        const bool separated = std::all_of(dps.peaks.begin(), dps.peaks.end(),
                                           [&](const auto& pk) { return (pk.vector - cand.vector).norm() >= rho; });
        if (separated) dps.peaks.push_back({cand.vector, cand.merit, cand.niche_id});
    }
    return dps;
}

Vector6 repair_to_boundary(const Vector6& x, const Vector6& lo, const Vector6& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

bool repair_covariance(Matrix6& covariance) {
    covariance = 0.5 * (covariance + covariance.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(covariance);
    const Vector6 values = eig.eigenvalues();
    const double top = values.maxCoeff();
    if (!(top > 0.0) || !values.allFinite()) {
        covariance = Matrix6::Identity();
        return true;
    }
    const double floor = kEigenFloor * top;
    if (values.minCoeff() >= floor) return false;
    const Vector6 floored = values.cwiseMax(floor);
    covariance = eig.eigenvectors() * floored.asDiagonal() * eig.eigenvectors().transpose();
    covariance = 0.5 * (covariance + covariance.transpose()).eval();
    return true;
}

std::vector<Vector6> sample_offspring(NicheState& kernel, int lambda, Rng& rng, const Vector6& lo,
                                      const Vector6& hi) {
    repair_covariance(kernel.covariance);
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(kernel.covariance);
    const Matrix6 transform = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector6> out;
    out.reserve(static_cast<std::size_t>(lambda));
    for (int i = 0; i < lambda; ++i) {
        Vector6 z;
        for (int k = 0; k < kNumSurfaces; ++k) z[k] = normal(rng);
        out.push_back(repair_to_boundary(kernel.peak + kernel.sigma * (transform * z), lo, hi));
    }
    return out;
}

void update_kernel(NicheState& kernel, const Vector6& best_offspring, double best_merit, const CmaConstants& cma) {
    const Vector6 step = (best_offspring - kernel.peak) / kernel.sigma;
    kernel.peak = best_offspring;
    kernel.fitness = best_merit;
    ++kernel.age;

    repair_covariance(kernel.covariance);
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(kernel.covariance);
    const Matrix6 inv_sqrt =
        eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

    kernel.path_sigma = (1.0 - cma.c_sigma) * kernel.path_sigma +
                        std::sqrt(cma.c_sigma * (2.0 - cma.c_sigma) * cma.mu_eff) * (inv_sqrt * step);
    const double norm_ps = kernel.path_sigma.norm();
    const double correction = std::sqrt(1.0 - std::pow(1.0 - cma.c_sigma, 2.0 * kernel.age));
    const bool h_sigma = norm_ps / correction < cma.h_sigma_threshold;

    kernel.path_c = (1.0 - cma.c_c) * kernel.path_c;
    if (h_sigma) kernel.path_c += std::sqrt(cma.c_c * (2.0 - cma.c_c) * cma.mu_eff) * step;

    const double decay = 1.0 - cma.c_1 + (h_sigma ? 0.0 : cma.c_1 * cma.c_c * (2.0 - cma.c_c));
    kernel.covariance = decay * kernel.covariance + cma.c_1 * kernel.path_c * kernel.path_c.transpose();
    repair_covariance(kernel.covariance);

    kernel.sigma *= std::exp((cma.c_sigma / cma.d_sigma) * (norm_ps / cma.chi_n - 1.0));
    kernel.sigma = std::clamp(kernel.sigma, kMinSigma, kMaxSigma);
}

NicheState fresh_kernel(Rng& rng, const NichingConfig& config) {
    NicheState k;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < kNumSurfaces; ++i)
        k.peak[i] = config.domain_lo[i] + unit(rng) * (config.domain_hi[i] - config.domain_lo[i]);
    k.sigma = config.sigma0;
    return k;
}

int reset_non_peaks(std::vector<NicheState>& kernels, const DynamicPeakSet& dps, int generation, Rng& rng,
                    const NichingConfig& config) {
    if (generation % config.kappa != 0) return 0;
    int resets = 0;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        if (dps.contains_niche(static_cast<int>(i))) continue;
        kernels[i] = fresh_kernel(rng, config);
        ++resets;
    }
    return resets;
}

NichingResult run_niching(const NichingConfig& config, const Objective& objective, std::uint64_t seed,
                          const GenerationObserver& observer, unsigned threads) {
    config.validate();
    const auto cma = CmaConstants::for_dimension(kNumSurfaces);
    Rng rng(seed);
    NichingResult result;
    result.kernels.reserve(static_cast<std::size_t>(config.kernels()));
    for (int i = 0; i < config.kernels(); ++i) result.kernels.push_back(fresh_kernel(rng, config));

    const long per_generation = config.evaluations_per_generation();
    const auto lambda = static_cast<std::size_t>(config.lambda);
    std::vector<Vector6> batch;
    std::vector<std::optional<Evaluation>> evals;

    for (int generation = 1; result.objective_calls + per_generation <= config.budget; ++generation) {
        batch.clear();
        for (auto& kernel : result.kernels) {
            auto offspring = sample_offspring(kernel, config.lambda, rng, config.domain_lo, config.domain_hi);
            batch.insert(batch.end(), offspring.begin(), offspring.end());
        }

        evals.assign(batch.size(), std::nullopt);
        std::string failure;
        try {
            util::parallel_for(batch.size(), threads, [&](std::size_t i) { evals[i] = objective(batch[i]); });
        } catch (const ObjectiveFailure& e) {
            failure = e.what();
        }

        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (!evals[i]) break;
            result.archive.push_back(EvaluationRecord{batch[i], evals[i]->merit, evals[i]->feasible, generation,
                                                      static_cast<int>(i / lambda)});
            ++result.objective_calls;
        }
        if (!failure.empty()) {
            result.aborted = true;
            result.abort_reason = failure;
            break;
        }

        std::vector<EvaluationRecord> peaks;
        peaks.reserve(result.kernels.size());
        for (std::size_t k = 0; k < result.kernels.size(); ++k) {
            std::size_t best = k * lambda;
            for (std::size_t i = best + 1; i < (k + 1) * lambda; ++i) {
                if (evals[i]->merit < evals[best]->merit) best = i;
            }
            update_kernel(result.kernels[k], batch[best], evals[best]->merit, cma);
            // A kernel stuck on the penalty plateau marks no basin; leaving it
            // out of the peak set recycles it at the next reset.
            if (!evals[best]->feasible) continue;
            peaks.push_back(EvaluationRecord{result.kernels[k].peak, result.kernels[k].fitness, evals[best]->feasible,
                                             generation, static_cast<int>(k)});
        }

        result.final_peaks = peaks.empty() ? DynamicPeakSet{} : select_dynamic_peaks(peaks, config.rho, config.q);
        result.generations = generation;
        if (observer) observer(generation, result.final_peaks, result.kernels);
        reset_non_peaks(result.kernels, result.final_peaks, generation, rng, config);
    }
    return result;
}

}  // namespace lensopt::niching
