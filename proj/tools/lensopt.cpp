// lensopt: campaign driver (run, analyze, trace, refine, classify).
// Exit codes: 0 success, 1 usage, 2 IO/config, 3 internal.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "lensopt/campaign/campaign.hpp"

namespace fs = std::filesystem;
using lensopt::campaign::CampaignConfig;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> runs;
    std::optional<unsigned> threads;
};

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw lensopt::ConfigError(fmt::format("cannot open config '{}'", path.string()));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lensopt::ConfigError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
    }
}

// Flags are applied to the JSON before parsing so derived defaults follow them.
CampaignConfig resolve(const Overrides& o, bool prefer_campaign_json) {
    nlohmann::json j = nlohmann::json::object();
    fs::path base = fs::current_path();
    if (!o.config.empty()) {
        j = read_json(o.config);
        base = fs::path(o.config).parent_path();
    } else if (prefer_campaign_json && o.out && fs::exists(fs::path(*o.out) / "campaign.json")) {
        j = read_json(fs::path(*o.out) / "campaign.json");
    }
    if (!j.is_object()) throw lensopt::ConfigError("campaign config must be a JSON object");
    if (o.seed) {
        j["master_seed"] = *o.seed;
        if (j.contains("analysis") && j["analysis"].contains("infeasibility"))
            j["analysis"]["infeasibility"].erase("seed");
    }
    if (o.out) j["output_dir"] = *o.out;
    if (o.runs) j["runs"] = *o.runs;
    if (o.threads) j["threads"] = *o.threads;
    return lensopt::campaign::campaign_config_from_json(j, base);
}

lensopt::Vector6 to_vector(const std::vector<double>& v) {
    lensopt::Vector6 out;
    for (int k = 0; k < lensopt::kNumSurfaces; ++k) out[k] = v[static_cast<std::size_t>(k)];
    return out;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "campaign configuration (JSON)");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Niching CMA-ES + damped least squares lens-design campaign"};
    app.require_subcommand(1);
    Overrides o;
    std::optional<std::string> known;
    std::optional<std::string> svg;
    std::vector<double> curvatures;

    auto* run = app.add_subcommand("run", "niching runs, archive refinement and duplicate filtering");
    add_common(run, o);
    run->add_option("--seed", o.seed, "master seed");
    run->add_option("--out", o.out, "output directory");
    run->add_option("--runs", o.runs, "number of independent runs")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "critical points, distance and infeasibility studies");
    add_common(analyze, o);
    analyze->add_option("--seed", o.seed, "master seed");
    analyze->add_option("--out", o.out, "campaign output directory");
    analyze->add_option("--runs", o.runs, "number of runs to read")->check(CLI::PositiveNumber);
    analyze->add_option("--known-optima", known, "reference optima (c1..c6 merit per line)");

    auto* trace = app.add_subcommand("trace", "ray table of one design");
    add_common(trace, o);
    trace->add_option("--svg", svg, "write an image-plane spot chart");
    trace->add_option("curvatures", curvatures, "c1 .. c6 [1/mm]")->expected(6)->required();

    auto* refine = app.add_subcommand("refine", "damped least squares from one start vector");
    add_common(refine, o);
    refine->add_option("curvatures", curvatures, "c1 .. c6 [1/mm]")->expected(6)->required();

    auto* classify = app.add_subcommand("classify", "finite-difference critical-point report");
    add_common(classify, o);
    classify->add_option("curvatures", curvatures, "c1 .. c6 [1/mm]")->expected(6)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            const auto config = resolve(o, false);
            for (const auto& s : lensopt::campaign::cmd_run(config))
                fmt::print("run {:02d}: seed {} generations {} evaluations {} infeasible {} refined {} optima {}{}\n",
                           s.run, s.seed, s.generations, s.evaluations, s.infeasible, s.refined, s.optima,
                           s.aborted ? " (aborted: " + s.abort_reason + ")" : "");
        } else if (analyze->parsed()) {
            const auto config = resolve(o, true);
            const auto report =
                lensopt::campaign::cmd_analyze(config, known ? std::optional<fs::path>(*known) : std::nullopt);
            fmt::print("analysis written to {}\n", (config.output_dir / "analysis").string());
            fmt::print("critical points within 10x of best per run:");
            for (const auto& r : report.runs) fmt::print(" {}", r.critical_within_decade);
            fmt::print("\ninfeasible fraction {:.4f}, strictly inside the domain {:.4f}\n", report.infeasible_fraction,
                       report.interior_infeasible_fraction);
            if (!report.infeasibility) fmt::print("{}\n", report.infeasibility_notice);
        } else {
            const auto config = resolve(o, false);
            const auto x = to_vector(curvatures);
            if (trace->parsed())
                lensopt::campaign::cmd_trace(config.prescription, config.weights, x, std::cout,
                                             svg ? std::optional<fs::path>(*svg) : std::nullopt);
            else if (refine->parsed())
                lensopt::campaign::cmd_refine(config, x, std::cout);
            else
                lensopt::campaign::cmd_classify(config, x, std::cout);
        }
    } catch (const lensopt::ConfigError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    } catch (const lensopt::DomainError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    } catch (const lensopt::campaign::MissingArtifact& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    } catch (const lensopt::analysis::InfeasibleStencil& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "internal error: {}\n", e.what());
        return 3;
    }
    return 0;
}
