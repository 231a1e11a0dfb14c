#include "lensopt/campaign/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "lensopt/analysis/report_io.hpp"
#include "lensopt/optics/prescription_io.hpp"
#include "lensopt/optics/trace.hpp"
#include "lensopt/refine/lens_residuals.hpp"
#include "lensopt/util/parallel.hpp"

namespace lensopt::campaign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDecade = 10.0;

refine::LmSettings lm_from_json(const json& j, refine::LmSettings s) {
    if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<int>();
    if (j.contains("damping0")) s.damping0 = j.at("damping0").get<double>();
    if (j.contains("h")) s.h = j.at("h").get<double>();
    if (j.contains("stagnation_tol")) s.stagnation_tol = j.at("stagnation_tol").get<double>();
    if (j.contains("stagnation_steps")) s.stagnation_steps = j.at("stagnation_steps").get<int>();
    if (j.contains("max_rejections")) s.max_rejections = j.at("max_rejections").get<int>();
    return s;
}

json lm_to_json(const refine::LmSettings& s) {
    return {{"max_iter", s.max_iter},
            {"damping0", s.damping0},
            {"h", s.h},
            {"stagnation_tol", s.stagnation_tol},
            {"stagnation_steps", s.stagnation_steps},
            {"max_rejections", s.max_rejections}};
}

refine::LmSettings lm_for(const CampaignConfig& c) {
    auto s = c.lm;
    s.box = {c.niching.domain_lo, c.niching.domain_hi};
    return s;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    out << j.dump(2) << '\n';
}

void require_file(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw MissingArtifact(fmt::format("missing artifact '{}'", path.string()));
}

std::string run_name(int run_index) { return fmt::format("run_{:02d}", run_index); }

std::vector<double> as_vector(const Vector6& v) { return {v.begin(), v.end()}; }

}  // namespace

void CampaignConfig::validate() const {
    prescription.validate();
    weights.validate();
    niching.validate();
    analysis.infeasibility.validate();
    if (runs < 1) throw ConfigError("run count must be at least 1");
    if (!(analysis.dedup_tol > 0.0)) throw ConfigError("dedup_tol must be positive");
    if (!(analysis.critical_gradient_tol > 0.0)) throw ConfigError("critical_gradient_tol must be positive");
    if (analysis.delta_sweep.empty()) throw ConfigError("delta sweep must not be empty");
    for (double d : analysis.delta_sweep)
        if (!(d > 0.0)) throw ConfigError("delta sweep entries must be positive");
    if (lm.max_iter < 0) throw ConfigError("lm max_iter must be non-negative");
    if (!(lm.damping0 > 0.0) || !(lm.h > 0.0)) throw ConfigError("lm damping0 and h must be positive");
    if (lm.stagnation_steps < 1 || lm.max_rejections < 1) throw ConfigError("lm step counters must be positive");
}

CampaignConfig campaign_config_from_json(const json& j, const fs::path& base_dir) {
    CampaignConfig c;
    try {
        if (!j.is_object()) throw ConfigError("campaign config must be a JSON object");
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("prescription")) {
            const auto& p = j.at("prescription");
            if (p.is_string()) {
                fs::path path = p.get<std::string>();
                if (path.is_relative()) path = base_dir / path;
                c.prescription_path = path;
                c.prescription = optics::load_prescription(path);
            } else {
                c.prescription = optics::prescription_from_json(p);
            }
        }
        if (j.contains("weights")) c.weights = optics::weights_from_json(j.at("weights"));
        if (j.contains("niching")) c.niching = niching::niching_config_from_json(j.at("niching"));
        if (j.contains("lm")) c.lm = lm_from_json(j.at("lm"), c.lm);
        c.analysis.infeasibility.seed = c.master_seed;
        if (j.contains("analysis")) {
            const auto& a = j.at("analysis");
            if (a.contains("dedup_tol")) c.analysis.dedup_tol = a.at("dedup_tol").get<double>();
            if (a.contains("delta_sweep")) c.analysis.delta_sweep = a.at("delta_sweep").get<std::vector<double>>();
            if (a.contains("critical_gradient_tol"))
                c.analysis.critical_gradient_tol = a.at("critical_gradient_tol").get<double>();
            if (a.contains("infeasibility")) {
                auto inf = a.at("infeasibility");
                if (!inf.contains("seed")) inf["seed"] = c.master_seed;
                c.analysis.infeasibility = analysis::infeasibility_config_from_json(inf);
            }
        }
        if (j.contains("runs")) c.runs = j.at("runs").get<int>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("bad campaign config: {}", e.what()));
    }
    c.validate();
    return c;
}

json campaign_config_to_json(const CampaignConfig& c) {
    json j;
    j["prescription"] = optics::prescription_to_json(c.prescription);
    j["weights"] = optics::weights_to_json(c.weights);
    j["niching"] = niching::niching_config_to_json(c.niching);
    j["lm"] = lm_to_json(c.lm);
    j["analysis"] = {{"dedup_tol", c.analysis.dedup_tol},
                     {"delta_sweep", c.analysis.delta_sweep},
                     {"critical_gradient_tol", c.analysis.critical_gradient_tol},
                     {"infeasibility", analysis::infeasibility_config_to_json(c.analysis.infeasibility)}};
    j["runs"] = c.runs;
    j["output_dir"] = c.output_dir.string();
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    return j;
}

CampaignConfig load_campaign_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open campaign config '{}'", path.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return campaign_config_from_json(j, path.parent_path());
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, int run_index) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(run_index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

fs::path run_directory(const CampaignConfig& c, int run_index) { return c.output_dir / run_name(run_index); }

analysis::ScalarFn lens_scalar_fn(const optics::Prescription& p, const optics::MeritWeights& w) {
    return [p, w](const Vector6& x) -> std::optional<double> {
        const auto outcome = optics::trace_design(p.with_curvatures(x));
        if (!outcome.feasible) return std::nullopt;
        return optics::merit_of(outcome, w);
    };
}

RunSummary execute_run(const CampaignConfig& c, int run_index) {
    RunSummary s;
    s.run = run_index;
    s.seed = derive_run_seed(c.master_seed, run_index);
    const fs::path dir = run_directory(c, run_index);
    fs::create_directories(dir);

    const auto& p = c.prescription;
    const auto& w = c.weights;
    auto objective = [&](const Vector6& x) {
        const auto outcome = optics::trace_design(p.with_curvatures(x));
        return niching::Evaluation{optics::merit_of(outcome, w), outcome.feasible};
    };
    const auto result = niching::run_niching(c.niching, objective, s.seed, {}, c.threads);
    s.generations = result.generations;
    s.evaluations = result.objective_calls;
    s.aborted = result.aborted;
    s.abort_reason = result.abort_reason;
    double worst_feasible = -std::numeric_limits<double>::infinity();
    for (const auto& r : result.archive) {
        if (r.feasible)
            worst_feasible = std::max(worst_feasible, r.merit);
        else
            ++s.infeasible;
    }
    if (worst_feasible >= w.infeasible_penalty)
        throw std::logic_error(fmt::format("feasible merit {} reaches the infeasible penalty {}", worst_feasible,
                                           w.infeasible_penalty));
    niching::write_archive(dir / "archive.tsv", result.archive);

    const auto refined = refine::refine_archive(result.archive, c.niching.archive_depth,
                                                refine::make_lens_residual_fn(p, w), lm_for(c), c.threads);
    s.refined = refined.results.size();
    s.skipped_infeasible = refined.skipped_infeasible;
    refine::write_refine_results(dir / "refine.tsv", refined.results);

    std::vector<analysis::ScoredPoint> points;
    for (const auto& r : refined.results)
        if (std::isfinite(r.merit_after) && r.merit_after < w.infeasible_penalty)
            points.push_back({r.refined, r.merit_after});
    const auto optima = analysis::filter_duplicates(points, c.analysis.dedup_tol);
    s.optima = optima.size();
    analysis::write_scored_points(dir / "optima.tsv", optima);

    write_json(dir / "run.json", {{"run", s.run},
                                  {"seed", s.seed},
                                  {"generations", s.generations},
                                  {"evaluations", s.evaluations},
                                  {"infeasible", s.infeasible},
                                  {"refined", s.refined},
                                  {"skipped_infeasible", s.skipped_infeasible},
                                  {"optima", s.optima},
                                  {"aborted", s.aborted},
                                  {"abort_reason", s.abort_reason}});
    return s;
}

std::vector<RunSummary> cmd_run(const CampaignConfig& c) {
    c.validate();
    fs::create_directories(c.output_dir);
    write_json(c.output_dir / "campaign.json", campaign_config_to_json(c));
    std::vector<RunSummary> out;
    for (int i = 0; i < c.runs; ++i) out.push_back(execute_run(c, i));
    return out;
}

CampaignReport cmd_analyze(const CampaignConfig& c, const std::optional<fs::path>& known_optima) {
    CampaignReport report;
    const fs::path adir = c.output_dir / "analysis";
    for (int i = 0; i < c.runs; ++i) {
        require_file(run_directory(c, i) / "archive.tsv");
        require_file(run_directory(c, i) / "refine.tsv");
        require_file(run_directory(c, i) / "optima.tsv");
    }
    if (known_optima) require_file(*known_optima);
    fs::create_directories(adir);

    auto add = [&](const fs::path& name) {
        report.manifest.push_back(name);
        return adir / name;
    };
    const auto merit_fn = lens_scalar_fn(c.prescription, c.weights);

    std::vector<Vector6> interior;
    std::vector<std::vector<analysis::ScoredPoint>> run_optima;
    for (int i = 0; i < c.runs; ++i) {
        const auto archive = niching::read_archive(run_directory(c, i) / "archive.tsv");
        auto optima = analysis::read_scored_points(run_directory(c, i) / "optima.tsv");

        RunCounts counts;
        counts.run = i;
        counts.evaluations = static_cast<long>(archive.size());
        std::set<std::array<double, kNumSurfaces>> seen_feasible, seen_infeasible;
        for (const auto& r : archive) {
            std::array<double, kNumSurfaces> key;
            std::copy(r.vector.begin(), r.vector.end(), key.begin());
            if (r.feasible) {
                seen_feasible.insert(key);
                continue;
            }
            ++counts.infeasible;
            seen_infeasible.insert(key);
            if (analysis::strictly_inside(r.vector, c.niching.domain_lo, c.niching.domain_hi)) {
                ++counts.interior_infeasible;
                interior.push_back(r.vector);
            }
        }
        counts.unique_feasible = static_cast<long>(seen_feasible.size());
        counts.unique_infeasible = static_cast<long>(seen_infeasible.size());
        counts.unique_total = counts.unique_feasible + counts.unique_infeasible;
        counts.optima = optima.size();

        std::vector<std::optional<analysis::CriticalPointReport>> slots(optima.size());
        util::parallel_for(optima.size(), c.threads, [&](std::size_t k) {
            try {
                slots[k] = analysis::classify_critical_point(merit_fn, optima[k].x, c.analysis.delta_sweep);
            } catch (const analysis::InfeasibleStencil&) {
            }
        });
        std::vector<analysis::CriticalPointReport> reports;
        for (auto& s : slots)
            if (s) reports.push_back(std::move(*s));
        counts.best_critical_merit = std::numeric_limits<double>::infinity();
        for (const auto& r : reports) {
            if (r.consensus_probe().gradient_norm < c.analysis.critical_gradient_tol) {
                ++counts.critical;
                counts.best_critical_merit = std::min(counts.best_critical_merit, r.value);
            }
        }
        for (const auto& r : reports)
            if (r.consensus_probe().gradient_norm < c.analysis.critical_gradient_tol &&
                r.value <= kDecade * counts.best_critical_merit)
                ++counts.critical_within_decade;

        analysis::write_critical_reports(add(run_name(i) + "_critical.tsv"), reports);
        analysis::write_delta_sweeps(add(run_name(i) + "_delta_sweep.tsv"), reports);
        report.critical.push_back(std::move(reports));
        report.runs.push_back(counts);
        run_optima.push_back(std::move(optima));

        auto& t = report.totals;
        t.evaluations += counts.evaluations;
        t.infeasible += counts.infeasible;
        t.interior_infeasible += counts.interior_infeasible;
        t.unique_feasible += counts.unique_feasible;
        t.unique_infeasible += counts.unique_infeasible;
        t.unique_total += counts.unique_total;
        t.optima += counts.optima;
        t.critical += counts.critical;
        t.critical_within_decade += counts.critical_within_decade;
    }
    report.totals.run = -1;
    if (report.totals.evaluations > 0) {
        report.infeasible_fraction = static_cast<double>(report.totals.infeasible) / report.totals.evaluations;
        report.interior_infeasible_fraction =
            static_cast<double>(report.totals.interior_infeasible) / report.totals.evaluations;
    }

    std::vector<analysis::ScoredPoint> pooled;
    for (const auto& o : run_optima) pooled.insert(pooled.end(), o.begin(), o.end());
    report.found = analysis::filter_duplicates(pooled, c.analysis.dedup_tol);
    analysis::write_scored_points(add("found_optima.tsv"), report.found);
    report.within_found = analysis::distance_study("found", report.found);
    analysis::write_distance_pairs(add("found_distances.tsv"), report.within_found);
    analysis::write_distance_rows(add("found_distance_rows.tsv"), report.within_found);
    analysis::write_histogram_svg(add("found_distances.svg"), "Pairwise distances among found optima",
                                  "Euclidean distance", report.within_found.distances);

    if (known_optima) {
        const auto known = analysis::read_scored_points(*known_optima);
        report.within_known = analysis::distance_study("known", known);
        analysis::write_distance_pairs(add("known_distances.tsv"), *report.within_known);
        analysis::write_histogram_svg(add("known_distances.svg"), "Pairwise distances among known optima",
                                      "Euclidean distance", report.within_known->distances);
        report.found_vs_known =
            analysis::distance_study("known_vs_found", known, std::span<const analysis::ScoredPoint>(report.found));
        analysis::write_distance_pairs(add("known_vs_found_distances.tsv"), *report.found_vs_known);
        analysis::write_distance_rows(add("known_vs_found_rows.tsv"), *report.found_vs_known);
        analysis::write_histogram_svg(add("known_vs_found_distances.svg"), "Distances from known to found optima",
                                      "Euclidean distance", report.found_vs_known->distances);

        for (const auto& k : known) {
            KnownMatch m;
            m.known = k;
            m.nearest = std::numeric_limits<double>::infinity();
            for (const auto& f : report.found) m.nearest = std::min(m.nearest, (f.x - k.x).norm());
            for (const auto& o : run_optima)
                if (std::any_of(o.begin(), o.end(),
                                [&](const auto& f) { return (f.x - k.x).norm() <= c.analysis.dedup_tol; }))
                    ++m.hits;
            report.matches.push_back(m);
        }
        std::ofstream out(add("known_matches.tsv"));
        out << "# index\tc1\tc2\tc3\tc4\tc5\tc6\tmerit\thits\tnearest\n";
        for (std::size_t i = 0; i < report.matches.size(); ++i) {
            const auto& m = report.matches[i];
            fmt::print(out, "{}", i);
            for (double v : m.known.x) fmt::print(out, "\t{}", v);
            fmt::print(out, "\t{}\t{}\t{}\n", m.known.merit, m.hits, m.nearest);
        }
    }

    if (interior.empty()) {
        report.infeasibility_notice = "infeasibility study skipped: no infeasible points strictly inside the domain";
    } else {
        try {
            report.infeasibility = analysis::infeasibility_study(interior, c.analysis.infeasibility);
        } catch (const analysis::InsufficientPopulation& e) {
            report.infeasibility_notice = fmt::format("infeasibility study skipped: {}", e.what());
        }
    }
    if (report.infeasibility) {
        const auto& st = *report.infeasibility;
        analysis::write_infeasibility_table(add("infeasibility.tsv"), st);
        std::vector<analysis::Series> minima(static_cast<std::size_t>(st.config.k_minima));
        analysis::Series pvalues{"p-value", {}};
        for (std::size_t k = 0; k < minima.size(); ++k) minima[k].label = fmt::format("{}", k + 1);
        for (const auto& r : st.reps) {
            for (std::size_t k = 0; k < r.minima.size(); ++k) minima[k].values.push_back(r.minima[k]);
            pvalues.values.push_back(r.p_value);
        }
        analysis::write_strip_svg(add("infeasibility_minima.svg"), "Smallest pairwise distances per subsample",
                                  "distance", minima);
        analysis::write_strip_svg(add("infeasibility_pvalues.svg"), "Shapiro-Wilk p-values of subsampled distances",
                                  "p-value", std::span<const analysis::Series>(&pvalues, 1), st.config.alpha);
    }

    {
        std::ofstream out(add("counts.tsv"));
        out << "# run\tevaluations\tinfeasible\tinterior_infeasible\tunique_feasible\tunique_infeasible\t"
               "unique_total\toptima\tcritical\tcritical_within_decade\tbest_critical_merit\n";
        auto row = [&](const std::string& name, const RunCounts& r) {
            fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", name, r.evaluations, r.infeasible,
                       r.interior_infeasible, r.unique_feasible, r.unique_infeasible, r.unique_total, r.optima,
                       r.critical, r.critical_within_decade, r.best_critical_merit);
        };
        for (const auto& r : report.runs) row(run_name(r.run), r);
        row("total", report.totals);
    }

    {
        std::ofstream out(add("summary.md"));
        fmt::print(out, "# Campaign summary\n\n");
        fmt::print(out, "Runs: {}. Master seed: {}.\n\n", c.runs, c.master_seed);
        fmt::print(out, "| run | evaluations | infeasible | interior infeasible | optima | critical | within 10x of best |\n");
        fmt::print(out, "|---|---|---|---|---|---|---|\n");
        for (const auto& r : report.runs)
            fmt::print(out, "| {} | {} | {} | {} | {} | {} | {} |\n", r.run, r.evaluations, r.infeasible,
                       r.interior_infeasible, r.optima, r.critical, r.critical_within_decade);
        fmt::print(out, "\nInfeasible fraction of all evaluations: {:.4f}.\n", report.infeasible_fraction);
        fmt::print(out, "Infeasible and strictly inside the domain: {:.4f}.\n", report.interior_infeasible_fraction);
        fmt::print(out, "Unique evaluated designs: {} feasible, {} infeasible.\n", report.totals.unique_feasible,
                   report.totals.unique_infeasible);
        fmt::print(out, "Pooled optima after duplicate filtering: {}.\n", report.found.size());
        if (!report.found.empty()) fmt::print(out, "Best merit found: {}.\n", report.found.front().merit);
        if (report.within_found.summary) {
            const auto& s = *report.within_found.summary;
            fmt::print(out, "Distances among found optima: min {:.4g}, mean {:.4g}, max {:.4g}.\n", s.min, s.mean,
                       s.max);
        } else {
            fmt::print(out, "Distances among found optima: fewer than two optima, no distances.\n");
        }
        if (!report.matches.empty()) {
            const auto located = std::count_if(report.matches.begin(), report.matches.end(),
                                               [](const auto& m) { return m.hits > 0; });
            fmt::print(out, "Known optima located in at least one run: {} of {}.\n", located, report.matches.size());
        }
        if (report.infeasibility) {
            fmt::print(out, "Infeasibility study: {} repetitions over {} eligible points, {:.0f}% normal at alpha {}.\n",
                       report.infeasibility->reps.size(), report.infeasibility->eligible,
                       100.0 * report.infeasibility->normal_fraction(), report.infeasibility->config.alpha);
        } else {
            fmt::print(out, "{}.\n", report.infeasibility_notice);
        }
    }

    report.manifest.push_back("manifest.tsv");
    std::ofstream out(adir / "manifest.tsv");
    out << "# path\n";
    for (const auto& m : report.manifest) fmt::print(out, "{}\n", m.string());
    return report;
}

void cmd_trace(const optics::Prescription& p, const optics::MeritWeights& w, const Vector6& curvatures,
               std::ostream& out, const std::optional<fs::path>& spot_svg) {
    if ((curvatures.cwiseAbs().array() > kCurvatureBound).any())
        throw DomainError(fmt::format("curvatures must lie in [-{0}, {0}]", kCurvatureBound));
    const auto o = optics::trace_design(p.with_curvatures(curvatures));
    fmt::print(out, "# feasible\t{}\n", o.feasible ? "yes" : "no");
    fmt::print(out, "# failure_kind\t{}\n", optics::to_string(o.failure_kind));
    if (!std::isfinite(o.effl)) fmt::print(out, "# note\tzero optical power\n");
    fmt::print(out, "# spot_rms\t{}\n# effl\t{}\n# pmag\t{}\n", o.spot_rms, o.effl, o.pmag);
    fmt::print(out, "# object_distance\t{}\n# image_distance\t{}\n", o.object_distance, o.image_distance);
    fmt::print(out, "# merit\t{}\n", optics::merit_of(o, w));
    fmt::print(out, "# ray\theight\tx\ty\tdx\tdy\n");
    for (const auto& r : o.rays)
        fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\n", r.ray_index, r.height_index, r.x, r.y, r.dx, r.dy);

    if (spot_svg) {
        std::vector<analysis::PointSeries> series(p.object_heights.size());
        for (std::size_t h = 0; h < series.size(); ++h) series[h].label = fmt::format("h = {} mm", p.object_heights[h]);
        for (const auto& r : o.rays) series[static_cast<std::size_t>(r.height_index)].points.emplace_back(r.dx, r.dy);
        analysis::write_scatter_svg(*spot_svg, "Spot diagram, centroid-relative", "dx [mm]", "dy [mm]", series);
    }
}

void cmd_refine(const CampaignConfig& c, const Vector6& start, std::ostream& out) {
    const auto r = refine::lm_refine(refine::make_lens_residual_fn(c.prescription, c.weights), start, lm_for(c));
    fmt::print(out, "start\t{}\n", fmt::join(as_vector(r.start), "\t"));
    fmt::print(out, "refined\t{}\n", fmt::join(as_vector(r.refined), "\t"));
    fmt::print(out, "merit_before\t{}\nmerit_after\t{}\n", r.merit_before, r.merit_after);
    fmt::print(out, "iterations\t{}\nconverged\t{}\ntermination\t{}\n", r.iterations, r.converged ? "yes" : "no",
               refine::to_string(r.termination));
}

void cmd_classify(const CampaignConfig& c, const Vector6& point, std::ostream& out) {
    const auto r =
        analysis::classify_critical_point(lens_scalar_fn(c.prescription, c.weights), point, c.analysis.delta_sweep);
    fmt::print(out, "point\t{}\nmerit\t{}\n", fmt::join(as_vector(r.point), "\t"), r.value);
    fmt::print(out, "# delta\tevaluable\tgradient_norm\tlambda1\tlambda2\tlambda3\tlambda4\tlambda5\tlambda6\tverdict\n");
    for (const auto& p : r.sweep)
        fmt::print(out, "{}\t{}\t{}\t{}\t{}\n", p.delta, p.evaluable ? 1 : 0, p.gradient_norm,
                   fmt::join(as_vector(p.spectrum), "\t"), p.evaluable ? analysis::to_string(p.verdict) : "-");
    fmt::print(out, "consensus_delta\t{}\n", r.consensus_probe().delta);
    fmt::print(out, "condition_number\t{}\ndominance_ratio\t{}\nverdict\t{}\n", r.condition_number, r.dominance_ratio,
               analysis::to_string(r.verdict));
}

}  // namespace lensopt::campaign
