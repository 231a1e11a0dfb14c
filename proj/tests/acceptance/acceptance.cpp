// Acceptance battery: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <fmt/format.h>

#include "lensopt/analysis/shapiro_wilk.hpp"
#include "lensopt/campaign/campaign.hpp"
#include "lensopt/optics/trace.hpp"
#include "lensopt/refine/lens_residuals.hpp"
#include "lensopt/refine/lm.hpp"
#include "support.hpp"

using namespace lensopt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !o.pass;
    std::cout << fmt::format("{} {} {}: {}", o.pass ? "PASS" : "FAIL", id, name, o.detail) << std::endl;
}

Outcome paraxial() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> n_dist(1.4, 1.9), t_dist(0.5, 10.0), c_dist(-0.05, 0.05);
    const auto t0 = Clock::now();
    double worst_effl = 0, worst_pmag = 0;
    int lenses = 0;
    while (lenses < 1000) {
        optics::Prescription p;
        const double n = n_dist(rng), t = t_dist(rng), c1 = c_dist(rng), c2 = c_dist(rng);
        p.curvatures << c1, c2, 0, 0, 0, 0;
        p.thicknesses[0] = t;
        p.refractive_indices = {1.0, n, 1.0, 1.0, 1.0, 1.0, 1.0};
        const double power = (n - 1) * (c1 - c2 + (n - 1) * t * c1 * c2 / n);
        if (power <= 1e-4) continue;  // m = -1 needs a converging lens
        const auto conj = optics::solve_conjugates(p);
        if (!conj) return {false, fmt::format("no conjugate for a converging singlet (power {})", power)};
        ++lenses;
        const double effl = optics::effective_focal_length(optics::paraxial_trace(p));
        worst_effl = std::max(worst_effl, test_support::rel_diff(effl, 1.0 / power));
        worst_pmag = std::max(worst_pmag, std::abs(optics::paraxial_magnification(p, *conj) + 1.0));
    }
    const double elapsed = seconds_since(t0);
    return {worst_effl <= 1e-9 && worst_pmag <= 1e-10 && elapsed < 1.0,
            fmt::format("1000 singlets, max EFFL rel err {:.2e} (<= 1e-9), max |pmag + 1| {:.2e} (<= 1e-10), {:.3f} s",
                        worst_effl, worst_pmag, elapsed)};
}

Outcome merit_coherence() {
    const optics::Prescription p;
    const optics::MeritWeights w;
    double worst = 0;
    bool exact_at_targets = true;
    for (const auto& c : test_support::feasible_designs(100, 202)) {
        const auto outcome = optics::trace_design(p.with_curvatures(c));
        const auto r = refine::lens_residuals(outcome, w);
        if (!r) return {false, "residuals missing on a feasible design"};
        worst = std::max(worst, test_support::rel_diff(r->squaredNorm(), optics::merit_of(outcome, w)));
        auto on_target = outcome;
        on_target.effl = w.effl_target;
        on_target.pmag = w.pmag_target;
        exact_at_targets = exact_at_targets && optics::merit_of(on_target, w) == outcome.spot_rms;
    }
    return {worst <= 1e-12 && exact_at_targets,
            fmt::format("100 feasible designs, max rel |r|^2 vs merit {:.2e} (<= 1e-12), merit == spot at targets: {}",
                        worst, exact_at_targets ? "yes" : "no")};
}

Outcome snell_and_scaling() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-1, 1), idx(1.0, 1.9);
    double worst_invariant = 0, worst_reverse = 0;
    int refractions = 0;
    while (refractions < 100000) {
        const Eigen::Vector3d normal = Eigen::Vector3d(u(rng), u(rng), 1 + std::abs(u(rng))).normalized();
        const Eigen::Vector3d in = Eigen::Vector3d(u(rng), u(rng), 1.5 + std::abs(u(rng))).normalized();
        const double n1 = idx(rng), n2 = idx(rng);
        const auto out = optics::refract(in, normal, n1, n2);
        if (!out) continue;
        ++refractions;
        worst_invariant = std::max(worst_invariant, (n1 * in.cross(normal) - n2 * out->cross(normal)).norm());
        const auto back = optics::refract(-*out, normal, n2, n1);
        worst_reverse = back ? std::max(worst_reverse, (-*back - in).norm()) : 1.0;
    }
    double worst_scale = 0;
    for (const auto& c : test_support::feasible_designs(10, 304)) {
        const auto base = optics::trace_design(optics::Prescription{}.with_curvatures(c));
        const auto big = optics::trace_design(optics::Prescription{}.with_curvatures(c).scaled(2.5));
        if (!big.feasible) return {false, "scaled design became infeasible"};
        worst_scale = std::max({worst_scale, test_support::rel_diff(big.spot_rms, 2.5 * base.spot_rms),
                                test_support::rel_diff(big.effl, 2.5 * base.effl),
                                test_support::rel_diff(big.pmag, base.pmag)});
    }
    return {worst_invariant <= 1e-10 && worst_reverse <= 1e-10 && worst_scale <= 1e-9,
            fmt::format("1e5 refractions, invariant {:.2e}, reversal {:.2e} (<= 1e-10); scaling x2.5 on 10 designs "
                        "{:.2e} (<= 1e-9)",
                        worst_invariant, worst_reverse, worst_scale)};
}

Outcome niching_benchmark() {
    const auto minima = test_support::himmelblau_minima_by_grid();
    if (minima.size() != 4) return {false, fmt::format("grid oracle found {} minima", minima.size())};
    const auto config = test_support::himmelblau_config(10000);
    const auto t0 = Clock::now();
    int full = 0;
    bool separated = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r = niching::run_niching(
            config, test_support::himmelblau_objective(), seed,
            [&](int, const niching::DynamicPeakSet& dps, std::span<const niching::NicheState>) {
                for (std::size_t i = 0; i < dps.peaks.size(); ++i)
                    for (std::size_t j = i + 1; j < dps.peaks.size(); ++j)
                        separated = separated && (dps.peaks[i].vector - dps.peaks[j].vector).norm() >= config.rho;
            });
        full += test_support::minima_found(r.final_peaks, minima, 0.05) == 4;
    }
    const double elapsed = seconds_since(t0);
    return {full >= 9 && separated && elapsed < 60.0,
            fmt::format("all 4 minima within 0.05 in {}/10 runs (>= 9), separation held: {}, {:.1f} s (< 60)", full,
                        separated ? "yes" : "no", elapsed)};
}

Outcome lm_oracle() {
    double worst_affine = 0;
    int worst_steps = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        Eigen::MatrixXd a(12, 6);
        Eigen::VectorXd b(12);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = g(rng);
        const Vector6 want = a.colPivHouseholderQr().solve(-b);
        refine::LmSettings s;
        s.box = refine::Box::unbounded();
        s.h = 1e-3;  // exact differences on affine maps; keeps the rounding floor below 1e-10
        std::vector<Vector6> iterates;
        s.on_accept = [&](const Vector6& x, double) { iterates.push_back(x); };
        refine::lm_refine([&](const Vector6& x) -> std::optional<Eigen::VectorXd> { return Eigen::VectorXd(a * x + b); },
                          Vector6::Zero(), s);
        // Error after at most two accepted steps.
        const std::size_t k = std::min<std::size_t>(2, iterates.size());
        if (k == 0) return {false, "affine problem took no step"};
        int steps = 1;
        while (steps < static_cast<int>(k) && (iterates[static_cast<std::size_t>(steps) - 1] - want).cwiseAbs().maxCoeff() > 1e-10)
            ++steps;
        worst_steps = std::max(worst_steps, steps);
        worst_affine = std::max(worst_affine, (iterates[static_cast<std::size_t>(steps) - 1] - want).cwiseAbs().maxCoeff());
    }

    refine::LmSettings s;
    s.box = {Vector6::Zero(), Vector6::Zero()};
    s.box.lo.head<2>().setConstant(-2.0);
    s.box.hi.head<2>().setConstant(2.0);
    Vector6 x0 = Vector6::Zero();
    x0.head<2>() << -1.2, 1.0;
    const auto r = refine::lm_refine(
        [](const Vector6& x) -> std::optional<Eigen::VectorXd> {
            Eigen::VectorXd res(2);
            res << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
            return res;
        },
        x0, s);
    const double rosen_err = (r.refined.head<2>() - Eigen::Vector2d(1, 1)).cwiseAbs().maxCoeff();
    return {worst_affine <= 1e-10 && worst_steps <= 2 && rosen_err <= 1e-6 && r.iterations <= 200,
            fmt::format("affine: max error {:.2e} after <= {} steps (1e-10, <= 2); Rosenbrock: error {:.2e} in {} "
                        "iterations (1e-6, <= 200)",
                        worst_affine, worst_steps, rosen_err, r.iterations)};
}

Outcome shapiro_wilk_references() {
    struct Ref {
        int n;
        double p_a, p_b;
    };
    // scipy.stats.shapiro on centred triple-Weyl data and its exponential transform.
    constexpr Ref refs[] = {{20, 0.7575086430107076, 5.0850703033588305e-05},
                            {50, 0.6880851183709324, 1.3902541637939079e-08},
                            {500, 0.019721336799453006, 9.558733357353741e-29},
                            {5000, 5.965324105277919e-08, 1.1194425555775217e-68}};
    double worst = 0;
    for (const auto& ref : refs) {
        std::vector<double> a, b;
        for (int i = 1; i <= ref.n; ++i) {
            double s = -1.5;
            for (double p : {2.0, 3.0, 5.0}) s += i * std::sqrt(p) - std::floor(i * std::sqrt(p));
            a.push_back(s);
            b.push_back(std::exp(2 * s));
        }
        worst = std::max({worst, std::abs(analysis::shapiro_wilk(a).p_value - ref.p_a),
                          std::abs(analysis::shapiro_wilk(b).p_value - ref.p_b)});
    }
    return {worst <= 2e-3, fmt::format("n in {{20, 50, 500, 5000}}, max |p - p_ref| {:.2e} (<= 2e-3)", worst)};
}

struct CampaignState {
    fs::path root;
    std::optional<campaign::CampaignReport> report;
    std::string error;
};

campaign::CampaignConfig default_single_run(const fs::path& out) {
    auto c = campaign::load_campaign_config(LENSOPT_DATA_DIR "/campaign_default.json");
    c.runs = 1;
    c.output_dir = out;
    c.threads = 0;
    return c;
}

Outcome desk_campaign(CampaignState& st) {
    const auto t0 = Clock::now();
    const auto config = default_single_run(st.root / "first");
    campaign::cmd_run(config);
    st.report = campaign::cmd_analyze(config, std::nullopt);
    const auto& rc = st.report->runs.front();
    const auto& crit = st.report->critical.front();
    bool all_feasible = true;
    for (const auto& r : crit) all_feasible = all_feasible && std::isfinite(r.value);
    std::size_t minima = 0, pvalues = 0, reps = 0;
    if (st.report->infeasibility) {
        reps = st.report->infeasibility->reps.size();
        for (const auto& r : st.report->infeasibility->reps) {
            minima += r.minima.size();
            pvalues += r.error.empty();
        }
    }
    const bool tables = fs::exists(config.output_dir / "analysis/found_distances.tsv") &&
                        fs::exists(config.output_dir / "analysis/infeasibility.tsv");
    return {rc.critical_within_decade >= 10 && all_feasible && reps == 100 && minima == 1000 && pvalues == 100 &&
                tables,
            fmt::format("{} critical points (grad < 1e-3) of {} optima, {} within 10x of best merit {:.6g} (>= 10); "
                        "infeasibility table {} reps, {} minima, {} p-values (100/1000/100); {:.0f} s",
                        rc.critical, rc.optima, rc.critical_within_decade, rc.best_critical_merit, reps, minima,
                        pvalues, seconds_since(t0))};
}

Outcome infeasibility_presence(const CampaignState& st) {
    if (!st.report) return {false, "campaign did not complete"};
    return {st.report->interior_infeasible_fraction > 0.0,
            fmt::format("infeasible fraction {:.4f}, strictly inside the domain {:.4f} (> 0); reference point 0.57",
                        st.report->infeasible_fraction, st.report->interior_infeasible_fraction)};
}

Outcome determinism(const CampaignState& st) {
    campaign::cmd_run(default_single_run(st.root / "second"));
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::recursive_directory_iterator(st.root / "first")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), st.root / "first");
        if (*rel.begin() == "analysis") continue;
        ++files;
        const auto other = st.root / "second" / rel;
        if (!fs::exists(other)) {
            ++differ;
        } else if (rel == "campaign.json") {
            // The resolved config names its own output directory.
            auto ja = nlohmann::json::parse(test_support::slurp(e.path()));
            auto jb = nlohmann::json::parse(test_support::slurp(other));
            ja.erase("output_dir");
            jb.erase("output_dir");
            differ += ja != jb;
        } else {
            differ += test_support::slurp(e.path()) != test_support::slurp(other);
        }
    }
    return {files > 0 && differ == 0, fmt::format("{} run artifacts compared, {} differ", files, differ)};
}

}  // namespace

int main() {
    test_support::TempDir tmp("acceptance");
    CampaignState st{tmp.path(), std::nullopt, {}};
    report(1, "paraxial correctness", paraxial);
    report(2, "merit coherence", merit_coherence);
    report(3, "Snell and scaling properties", snell_and_scaling);
    report(4, "niching benchmark", niching_benchmark);
    report(5, "LM oracle", lm_oracle);
    report(6, "Shapiro-Wilk references", shapiro_wilk_references);
    report(7, "desk-scale campaign", [&] { return desk_campaign(st); });
    report(8, "infeasibility presence", [&] { return infeasibility_presence(st); });
    report(9, "determinism", [&] { return determinism(st); });
    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
