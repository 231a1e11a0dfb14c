#include "lensopt/refine/lm.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lensopt/util/parallel.hpp"
#include "lensopt/util/table.hpp"

namespace lensopt::refine {

Box Box::curvature_box() {
    return {Vector6::Constant(-kCurvatureBound), Vector6::Constant(kCurvatureBound)};
}

Box Box::unbounded() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {Vector6::Constant(-inf), Vector6::Constant(inf)};
}

std::array<bool, kNumSurfaces> one_sided_columns(const Vector6& x, double h, const Box& box) {
    std::array<bool, kNumSurfaces> out{};
    for (int j = 0; j < kNumSurfaces; ++j) out[static_cast<std::size_t>(j)] = x[j] + h > box.hi[j] || x[j] - h < box.lo[j];
    return out;
}

Eigen::MatrixXd jacobian_fd(const ResidualFn& residuals, const Vector6& x, double h, const Box& box) {
    const auto base = residuals(x);
    if (!base) throw InfeasibleNeighborhood("base point is infeasible");
    const auto m = base->size();
    Eigen::MatrixXd jac(m, kNumSurfaces);

    auto eval = [&](const Vector6& p, int j) {
        auto r = residuals(p);
        if (!r) throw InfeasibleNeighborhood(fmt::format("perturbation of coordinate {} is infeasible", j + 1));
        if (r->size() != m) throw std::logic_error("residual size changed between evaluations");
        return *r;
    };

    for (int j = 0; j < kNumSurfaces; ++j) {
        Vector6 plus = x;
        Vector6 minus = x;
        plus[j] += h;
        minus[j] -= h;
        const bool plus_ok = plus[j] <= box.hi[j];
        const bool minus_ok = minus[j] >= box.lo[j];
        if (plus_ok && minus_ok) {
            jac.col(j) = (eval(plus, j) - eval(minus, j)) / (2.0 * h);
        } else if (plus_ok) {
            jac.col(j) = (eval(plus, j) - *base) / h;
        } else if (minus_ok) {
            jac.col(j) = (*base - eval(minus, j)) / h;
        } else {
            // Box thinner than 2h in this coordinate: the variable is frozen.
            jac.col(j).setZero();
        }
    }
    return jac;
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::merit_stagnation:
        return "merit_stagnation";
    case Termination::max_iterations:
        return "max_iterations";
    case Termination::infeasible_step_wall:
        return "infeasible_step_wall";
    case Termination::singular_system:
        return "singular_system";
    }
    return "unknown";
}

Termination termination_from_string(std::string_view s) {
    for (auto t : {Termination::merit_stagnation, Termination::max_iterations, Termination::infeasible_step_wall,
                   Termination::singular_system}) {
        if (to_string(t) == s) return t;
    }
    throw ConfigError(fmt::format("unknown termination '{}'", s));
}

RefineResult lm_refine(const ResidualFn& residuals, const Vector6& x0, const LmSettings& settings) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    RefineResult result;
    result.start = x0;
    Vector6 x = settings.box.clip(x0);
    result.refined = x;

    auto r0 = residuals(x);
    if (!r0) {
        result.merit_before = result.merit_after = inf;
        result.termination = Termination::infeasible_step_wall;
        return result;
    }
    Eigen::VectorXd r = std::move(*r0);
    double merit = r.squaredNorm();
    result.merit_before = merit;

    auto finish = [&](Termination t, bool converged) {
        result.refined = x;
        result.merit_after = merit;
        result.termination = t;
        result.converged = converged;
        return result;
    };

    double mu = settings.damping0;
    int stagnant = 0;
    while (result.iterations < settings.max_iter) {
        if (merit == 0.0) return finish(Termination::merit_stagnation, true);

        Eigen::MatrixXd jac;
        try {
            jac = jacobian_fd(residuals, x, settings.h, settings.box);
        } catch (const InfeasibleNeighborhood&) {
            try {
                jac = jacobian_fd(residuals, x, 0.1 * settings.h, settings.box);
            } catch (const InfeasibleNeighborhood&) {
                return finish(Termination::infeasible_step_wall, false);
            }
        }
        const Vector6 grad = jac.transpose() * r;
        if (grad.isZero(0.0)) return finish(Termination::merit_stagnation, true);
        const Matrix6 normal = jac.transpose() * jac;

        int rejections = 0;
        int escalations = 0;
        while (true) {
            Eigen::LLT<Matrix6> llt(normal + mu * Matrix6::Identity());
            Vector6 delta;
            if (llt.info() == Eigen::Success) delta = llt.solve(-grad);
            if (llt.info() != Eigen::Success || !delta.allFinite()) {
                if (++escalations > settings.max_singular_escalations)
                    return finish(Termination::singular_system, false);
                mu *= 10.0;
                continue;
            }
            const Vector6 trial = settings.box.clip(x + delta);
            if (trial == x) return finish(Termination::merit_stagnation, true);

            auto r_trial = residuals(trial);
            const double merit_trial = r_trial ? r_trial->squaredNorm() : inf;
            if (merit_trial < merit) {
                const double improvement = (merit - merit_trial) / merit;
                x = trial;
                r = std::move(*r_trial);
                merit = merit_trial;
                mu *= 0.5;
                ++result.iterations;
                if (settings.on_accept) settings.on_accept(x, merit);
                stagnant = improvement < settings.stagnation_tol ? stagnant + 1 : 0;
                if (stagnant >= settings.stagnation_steps) return finish(Termination::merit_stagnation, true);
                break;
            }
            mu *= 2.0;
            if (++rejections >= settings.max_rejections) {
                if (!r_trial) return finish(Termination::infeasible_step_wall, false);
                return finish(Termination::merit_stagnation, true);
            }
        }
    }
    return finish(Termination::max_iterations, false);
}

RefineSummary refine_archive(std::span<const niching::EvaluationRecord> archive, int depth,
                             const ResidualFn& residuals, const LmSettings& settings, unsigned threads) {
    RefineSummary summary;
    const auto tail = niching::last_generations(archive, depth);
    std::vector<Vector6> starts;
    starts.reserve(tail.size());
    for (const auto& rec : tail) {
        if (rec.feasible)
            starts.push_back(rec.vector);
        else
            ++summary.skipped_infeasible;
    }
    summary.results.resize(starts.size());
    util::parallel_for(starts.size(), threads,
                       [&](std::size_t i) { summary.results[i] = lm_refine(residuals, starts[i], settings); });
    return summary;
}

void write_refine_results(std::ostream& out, std::span<const RefineResult> results) {
    out << "# s1\ts2\ts3\ts4\ts5\ts6\tc1\tc2\tc3\tc4\tc5\tc6\tmerit_before\tmerit_after\titerations\tconverged\t"
           "termination\n";
    for (const auto& r : results) {
        for (int k = 0; k < kNumSurfaces; ++k) fmt::print(out, "{}\t", r.start[k]);
        for (int k = 0; k < kNumSurfaces; ++k) fmt::print(out, "{}\t", r.refined[k]);
        fmt::print(out, "{}\t{}\t{}\t{}\t{}\n", r.merit_before, r.merit_after, r.iterations, r.converged ? 1 : 0,
                   to_string(r.termination));
    }
}

void write_refine_results(const std::filesystem::path& path, std::span<const RefineResult> results) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    write_refine_results(out, results);
}

std::vector<RefineResult> read_refine_results(std::istream& in) {
    std::vector<RefineResult> out;
    util::for_each_row(in, 17, [&](const auto& f) {
        RefineResult r;
        for (int k = 0; k < kNumSurfaces; ++k) {
            r.start[k] = util::parse_double(f[static_cast<std::size_t>(k)]);
            r.refined[k] = util::parse_double(f[static_cast<std::size_t>(6 + k)]);
        }
        r.merit_before = util::parse_double(f[12]);
        r.merit_after = util::parse_double(f[13]);
        r.iterations = util::parse_int(f[14]);
        r.converged = util::parse_int(f[15]) != 0;
        r.termination = termination_from_string(f[16]);
        out.push_back(r);
    });
    return out;
}

std::vector<RefineResult> read_refine_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open refine results '{}'", path.string()));
    return read_refine_results(in);
}

}  // namespace lensopt::refine
