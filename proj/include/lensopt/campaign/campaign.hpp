#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lensopt/analysis/derivatives.hpp"
#include "lensopt/analysis/infeasibility.hpp"
#include "lensopt/analysis/solution_sets.hpp"
#include "lensopt/niching/niching.hpp"
#include "lensopt/optics/types.hpp"
#include "lensopt/refine/lm.hpp"

namespace lensopt::campaign {

struct AnalysisSettings {
    double dedup_tol = 1e-4;
    std::vector<double> delta_sweep = analysis::default_delta_sweep();
    /// Consensus gradient norm below which a refined point counts as critical.
    double critical_gradient_tol = 1e-3;
    analysis::InfeasibilityStudyConfig infeasibility;
};

struct CampaignConfig {
    std::optional<std::filesystem::path> prescription_path;  // empty: built-in default layout
    optics::Prescription prescription;
    optics::MeritWeights weights;
    niching::NichingConfig niching;
    refine::LmSettings lm;
    AnalysisSettings analysis;
    int runs = 5;
    std::filesystem::path output_dir = "campaign_out";
    std::uint64_t master_seed = 1;
    unsigned threads = 1;

    void validate() const;
};

/// Relative prescription paths resolve against `base_dir`. A missing
/// infeasibility seed defaults to the master seed.
CampaignConfig campaign_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json campaign_config_to_json(const CampaignConfig& c);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

/// SplitMix64 of the master seed and the run index.
std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index);

std::filesystem::path run_directory(const CampaignConfig& c, int run_index);

class MissingArtifact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lens merit as a scalar field; infeasible designs map to an empty optional.
/// Points outside the curvature box are traced rather than rejected.
analysis::ScalarFn lens_scalar_fn(const optics::Prescription& p, const optics::MeritWeights& w);

struct RunSummary {
    int run = 0;
    std::uint64_t seed = 0;
    int generations = 0;
    long evaluations = 0;
    long infeasible = 0;
    std::size_t refined = 0;
    int skipped_infeasible = 0;
    std::size_t optima = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// One niching run, refinement of its archive tail and duplicate filtering.
/// Writes archive.tsv, refine.tsv, optima.tsv and run.json into the run directory.
RunSummary execute_run(const CampaignConfig& c, int run_index);

/// All runs plus the resolved configuration (campaign.json) in the output directory.
std::vector<RunSummary> cmd_run(const CampaignConfig& c);

struct RunCounts {
    int run = 0;
    long evaluations = 0;
    long infeasible = 0;
    long interior_infeasible = 0;
    long unique_feasible = 0;
    long unique_infeasible = 0;
    long unique_total = 0;
    std::size_t optima = 0;
    std::size_t critical = 0;
    std::size_t critical_within_decade = 0;  // merit <= 10x the best critical merit
    double best_critical_merit = 0.0;
};

struct KnownMatch {
    analysis::ScoredPoint known;
    int hits = 0;  // runs whose optima contain a point within the match tolerance
    double nearest = 0.0;
};

struct CampaignReport {
    std::vector<RunCounts> runs;
    RunCounts totals;
    std::vector<std::vector<analysis::CriticalPointReport>> critical;  // per run, optima order
    std::vector<analysis::ScoredPoint> found;                          // pooled optima, deduplicated
    analysis::DistanceStudy within_found;
    std::optional<analysis::DistanceStudy> within_known;
    std::optional<analysis::DistanceStudy> found_vs_known;
    std::vector<KnownMatch> matches;
    std::optional<analysis::InfeasibilityStudy> infeasibility;
    std::string infeasibility_notice;
    double infeasible_fraction = 0.0;
    double interior_infeasible_fraction = 0.0;
    std::vector<std::filesystem::path> manifest;  // relative to the analysis directory
};

/// Reads every run directory, writes tables, charts, summary.md and
/// manifest.tsv into <output_dir>/analysis.
CampaignReport cmd_analyze(const CampaignConfig& c, const std::optional<std::filesystem::path>& known_optima);

/// Ray table and headline numbers of one design; optionally an image-plane spot chart.
void cmd_trace(const optics::Prescription& p, const optics::MeritWeights& w, const Vector6& curvatures,
               std::ostream& out, const std::optional<std::filesystem::path>& spot_svg = std::nullopt);

void cmd_refine(const CampaignConfig& c, const Vector6& start, std::ostream& out);
void cmd_classify(const CampaignConfig& c, const Vector6& point, std::ostream& out);

}  // namespace lensopt::campaign
