#include <sstream>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "lensopt/niching/niching.hpp"
#include "support.hpp"

using namespace lensopt;
using namespace lensopt::niching;

namespace {

EvaluationRecord record(double x0, double merit, int niche = 0) {
    EvaluationRecord r;
    r.vector[0] = x0;
    r.merit = merit;
    r.feasible = true;
    r.niche_id = niche;
    return r;
}

double sphere(const Vector6& x, const Vector6& centre) { return (x - centre).squaredNorm(); }

std::string archive_text(const std::vector<EvaluationRecord>& a) {
    std::ostringstream out;
    write_archive(out, a);
    return out.str();
}

void check_separated(const DynamicPeakSet& dps, double rho) {
    for (std::size_t i = 0; i < dps.peaks.size(); ++i)
        for (std::size_t j = i + 1; j < dps.peaks.size(); ++j)
            REQUIRE((dps.peaks[i].vector - dps.peaks[j].vector).norm() >= rho);
}

}  // namespace

TEST_CASE("CMA constants for n = 6") {
    const auto c = CmaConstants::for_dimension(6);
    CHECK(c.c_sigma == doctest::Approx(0.25));
    CHECK(c.d_sigma == doctest::Approx(1.25));
    CHECK(c.c_c == doctest::Approx(0.4032258).epsilon(1e-6));
    CHECK(c.c_1 == doctest::Approx(0.0368392).epsilon(1e-5));
    CHECK(c.chi_n == doctest::Approx(2.3506677).epsilon(1e-6));
    CHECK(c.h_sigma_threshold == doctest::Approx(3.9625542).epsilon(1e-6));
}

TEST_CASE("select_dynamic_peaks: greedy sweep examples") {
    const std::vector<EvaluationRecord> pop{record(0.0, 1), record(0.05, 2), record(0.5, 3)};
    auto dps = select_dynamic_peaks(pop, 0.18, 2);
    REQUIRE(dps.peaks.size() == 2);
    CHECK(dps.peaks[0].vector[0] == 0.0);
    CHECK(dps.peaks[1].vector[0] == 0.5);

    dps = select_dynamic_peaks(std::vector{record(0.1, 4.0, 7)}, 0.18, 20);
    REQUIRE(dps.peaks.size() == 1);
    CHECK(dps.peaks[0].niche_id == 7);
    CHECK(dps.contains_niche(7));
    CHECK_FALSE(dps.contains_niche(0));

    const std::vector<EvaluationRecord> crowd{record(0.01, 3), record(0.02, 1.5), record(0.03, 2), record(0.0, 9)};
    dps = select_dynamic_peaks(crowd, 0.18, 20);
    REQUIRE(dps.peaks.size() == 1);
    CHECK(dps.peaks[0].merit == 1.5);
}

TEST_CASE("select_dynamic_peaks: ties break by vector order then index") {
    const std::vector<EvaluationRecord> pop{record(0.4, 1.0, 0), record(-0.4, 1.0, 1), record(-0.4, 1.0, 2)};
    const auto dps = select_dynamic_peaks(pop, 0.18, 20);
    REQUIRE(dps.peaks.size() == 2);
    CHECK(dps.peaks[0].niche_id == 1);
    CHECK(dps.peaks[1].niche_id == 0);
}

TEST_CASE("property: peak sets are separated and merit ordered") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EvaluationRecord> pop(60);
        for (auto& r : pop) {
            for (auto& v : r.vector) v = u(rng);
            r.merit = u(rng);
        }
        const auto dps = select_dynamic_peaks(pop, 0.18, 20);
        check_separated(dps, 0.18);
        CHECK(dps.peaks.size() <= 20);
        for (std::size_t i = 1; i < dps.peaks.size(); ++i) CHECK(dps.peaks[i - 1].merit <= dps.peaks[i].merit);
        // Every rejected individual is within rho of a better accepted peak.
        for (const auto& r : pop) {
            bool covered = false;
            for (const auto& pk : dps.peaks)
                covered = covered || (pk.vector - r.vector).norm() < 0.18;
            if (dps.peaks.size() < 20) CHECK(covered);
        }
    }
}

TEST_CASE("repair_to_boundary clips into the box") {
    const Vector6 lo = Vector6::Constant(-0.25), hi = Vector6::Constant(0.25);
    Vector6 x = Vector6::Zero();
    x[0] = 0.30;
    Vector6 want = Vector6::Zero();
    want[0] = 0.25;
    CHECK(repair_to_boundary(x, lo, hi) == want);
    const Vector6 inside = Vector6::Constant(0.1);
    CHECK(repair_to_boundary(inside, lo, hi) == inside);
    CHECK(repair_to_boundary(Vector6::Constant(-0.9), lo, hi) == Vector6::Constant(-0.25));
}

TEST_CASE("repair_covariance floors the spectrum") {
    Matrix6 c = Matrix6::Identity();
    CHECK_FALSE(repair_covariance(c));
    CHECK(c == Matrix6::Identity());

    Vector6 v = Vector6::Ones();
    c = v * v.transpose();  // rank one
    CHECK(repair_covariance(c));
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(c);
    // Reassembly from the eigenbasis perturbs eigenvalues by about eps * max.
    CHECK(eig.eigenvalues().minCoeff() >= 0.9e-14 * eig.eigenvalues().maxCoeff());
    CHECK((c - c.transpose()).norm() == 0.0);

    c = Matrix6::Constant(std::nan(""));
    CHECK(repair_covariance(c));
    CHECK(c == Matrix6::Identity());
}

TEST_CASE("sample_offspring: zero step, mean bound and determinism") {
    const Vector6 lo = Vector6::Constant(-0.25), hi = Vector6::Constant(0.25);
    NicheState k;
    k.peak = Vector6::Constant(0.1);
    k.sigma = 0.0;
    Rng rng(1);
    for (const auto& x : sample_offspring(k, 10, rng, lo, hi)) CHECK(x == k.peak);

    k.peak = Vector6::Zero();
    k.sigma = 0.05;
    const int n = 100000;
    const auto draws = sample_offspring(k, n, rng, lo, hi);
    Vector6 mean = Vector6::Zero();
    for (const auto& x : draws) mean += x;
    mean /= n;
    CHECK(mean.cwiseAbs().maxCoeff() < 3 * 0.05 / std::sqrt(double(n)));

    Rng a(42), b(42);
    NicheState ka = k, kb = k;
    CHECK(sample_offspring(ka, 10, a, lo, hi) == sample_offspring(kb, 10, b, lo, hi));

    // Every draw lands in the box even with a wide step.
    k.sigma = 1.0;
    for (const auto& x : sample_offspring(k, 500, rng, lo, hi)) {
        CHECK((x.array() >= lo.array()).all());
        CHECK((x.array() <= hi.array()).all());
    }
}

TEST_CASE("update_kernel: a single kernel converges on the sphere") {
    const auto cma = CmaConstants::for_dimension(6);
    const Vector6 lo = Vector6::Constant(-0.25), hi = Vector6::Constant(0.25);
    const Vector6 centre = Vector6::Constant(0.03);
    Rng rng(7);
    NicheState k;
    k.peak = Vector6::Constant(-0.15);
    k.sigma = 0.05;
    const double merit0 = sphere(k.peak, centre);
    for (int g = 0; g < 200; ++g) {
        const auto off = sample_offspring(k, 10, rng, lo, hi);
        std::size_t best = 0;
        for (std::size_t i = 1; i < off.size(); ++i)
            if (sphere(off[i], centre) < sphere(off[best], centre)) best = i;
        update_kernel(k, off[best], sphere(off[best], centre), cma);
    }
    CHECK(k.fitness * 10 <= merit0);
    CHECK(k.sigma * 10 <= 0.05);
    CHECK(k.age == 200);
}

TEST_CASE("update_kernel: comma selection always moves the mean") {
    const auto cma = CmaConstants::for_dimension(6);
    NicheState k;
    k.peak = Vector6::Zero();
    k.fitness = 1.0;
    Vector6 worse = Vector6::Constant(0.01);
    update_kernel(k, worse, 5.0, cma);
    CHECK(k.peak == worse);
    CHECK(k.fitness == 5.0);
    CHECK(k.age == 1);
}

TEST_CASE("reset_non_peaks acts on the kappa cycle only") {
    NichingConfig config;
    Rng rng(3);
    std::vector<NicheState> kernels(3);
    for (auto& k : kernels) {
        k.sigma = 0.001;
        k.covariance = 2.0 * Matrix6::Identity();
        k.path_c = Vector6::Ones();
    }
    DynamicPeakSet dps;
    dps.peaks.push_back({Vector6::Zero(), 0.0, 1});

    CHECK(reset_non_peaks(kernels, dps, 19, rng, config) == 0);
    CHECK(kernels[0].sigma == 0.001);

    CHECK(reset_non_peaks(kernels, dps, 20, rng, config) == 2);
    CHECK(kernels[0].sigma == 0.05);
    CHECK(kernels[0].covariance == Matrix6::Identity());
    CHECK(kernels[0].path_c == Vector6::Zero());
    CHECK(kernels[0].age == 0);
    CHECK(kernels[1].sigma == 0.001);

    for (int i = 0; i < 3; ++i) dps.peaks.push_back({Vector6::Zero(), 0.0, i});
    for (int g = 1; g <= 100; ++g) CHECK(reset_non_peaks(kernels, dps, g, rng, config) == 0);
}

TEST_CASE("run_niching: budget law, archive completeness and closure") {
    NichingConfig config;
    const Vector6 centre = Vector6::Constant(0.05);
    long calls = 0;
    const Objective f = [&](const Vector6& x) {
        ++calls;
        return Evaluation{sphere(x, centre), true};
    };
    const auto r = run_niching(config, f, 1);
    CHECK(r.generations == 100);
    CHECK(r.archive.size() == 25000);
    CHECK(r.objective_calls == 25000);
    CHECK(calls == 25000);
    CHECK_FALSE(r.aborted);
    CHECK(generation_count(r.archive) == 100);
    for (const auto& rec : r.archive) {
        CHECK((rec.vector.array().abs() <= 0.25).all());
        CHECK(rec.niche_id >= 0);
        CHECK(rec.niche_id < 25);
    }
    for (int g = 1; g <= 100; ++g) {
        const auto n = std::count_if(r.archive.begin(), r.archive.end(),
                                     [&](const auto& rec) { return rec.generation == g; });
        CHECK(n == 250);
    }

    config.budget = 250;
    CHECK(run_niching(config, f, 1).generations == 1);
    config.budget = 499;
    const auto one = run_niching(config, f, 1);
    CHECK(one.generations == 1);
    CHECK(one.archive.size() == 250);
}

TEST_CASE("run_niching is deterministic for a seed") {
    auto config = test_support::himmelblau_config(2500);
    const auto f = test_support::himmelblau_objective();
    const auto a = run_niching(config, f, 99);
    const auto b = run_niching(config, f, 99, {}, 4);
    const auto c = run_niching(config, f, 100);
    CHECK(archive_text(a.archive) == archive_text(b.archive));
    CHECK(archive_text(a.archive) != archive_text(c.archive));
}

TEST_CASE("run_niching aborts on objective failure with a partial archive") {
    NichingConfig config;
    long calls = 0;
    const Objective f = [&](const Vector6& x) {
        if (++calls > 600) throw ObjectiveFailure("tracer crashed");
        return Evaluation{x.squaredNorm(), true};
    };
    const auto r = run_niching(config, f, 5);
    CHECK(r.aborted);
    CHECK(r.abort_reason == "tracer crashed");
    CHECK(r.archive.size() == 600);
    CHECK(r.generations == 2);
}

TEST_CASE("run_niching: peak sets stay separated and exclude infeasible kernels") {
    NichingConfig config;
    config.budget = 5000;
    // Half of the box is a penalty plateau.
    const Objective f = [](const Vector6& x) {
        if (x[0] > 0) return Evaluation{1e30, false};
        return Evaluation{test_support::himmelblau(x[0], x[1]) + x.tail<4>().squaredNorm(), true};
    };
    int generations = 0;
    const auto r = run_niching(
        config, f, 11,
        [&](int, const DynamicPeakSet& dps, std::span<const NicheState>) {
            ++generations;
            check_separated(dps, config.rho);
            for (const auto& pk : dps.peaks) REQUIRE(pk.merit < 1e30);
        });
    CHECK(generations == 20);
    CHECK(r.final_peaks.peaks.size() <= static_cast<std::size_t>(config.q));
}

TEST_CASE("run_niching finds the four Himmelblau minima") {
    const auto minima = test_support::himmelblau_minima_by_grid();
    REQUIRE(minima.size() == 4);
    CHECK(test_support::himmelblau(minima[0][0], minima[0][1]) < 1e-8);
    const auto config = test_support::himmelblau_config();
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = run_niching(config, test_support::himmelblau_objective(), seed);
        hits += test_support::minima_found(r.final_peaks, minima, 0.05) == 4;
    }
    CHECK(hits >= 2);
}

TEST_CASE("config validation and JSON") {
    NichingConfig c;
    CHECK_NOTHROW(c.validate());
    c.budget = 100;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = NichingConfig{};
    c.rho = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    c = NichingConfig{};
    c.q = 4;
    c.budget = 900;
    const auto back = niching_config_from_json(niching_config_to_json(c));
    CHECK(back.q == 4);
    CHECK(back.budget == 900);
    CHECK(back.domain_lo == c.domain_lo);
    CHECK_THROWS_AS(niching_config_from_json(nlohmann::json{{"q", "many"}}), ConfigError);
    CHECK_THROWS_AS(niching_config_from_json(nlohmann::json{{"domain_lo", {1, 2}}}), ConfigError);
}

TEST_CASE("archive IO round trip and tail selection") {
    std::vector<EvaluationRecord> a;
    for (int g = 1; g <= 4; ++g)
        for (int i = 0; i < 3; ++i) {
            EvaluationRecord r;
            r.vector = Vector6::Constant(0.1 * g + 1e-17 * i);
            r.vector[5] = -1.0 / 3.0;
            r.merit = g == 2 ? 1e30 : 0.1 / (i + 1);
            r.feasible = g != 2;
            r.generation = g;
            r.niche_id = i;
            a.push_back(r);
        }
    std::istringstream in(archive_text(a));
    const auto back = read_archive(in);
    REQUIRE(back.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(back[i].vector == a[i].vector);
        CHECK(back[i].merit == a[i].merit);
        CHECK(back[i].feasible == a[i].feasible);
        CHECK(back[i].generation == a[i].generation);
        CHECK(back[i].niche_id == a[i].niche_id);
    }
    CHECK(last_generations(a, 2).size() == 6);
    CHECK(last_generations(a, 2).front().generation == 3);
    CHECK(last_generations(a, 0).empty());
    CHECK(last_generations(a, 10).size() == 12);

    std::istringstream bad("1\t0\t0.1\n");
    CHECK_THROWS_AS(read_archive(bad), ConfigError);
    CHECK_THROWS_AS(read_archive(std::filesystem::path("/nonexistent/archive.tsv")), ConfigError);
}
