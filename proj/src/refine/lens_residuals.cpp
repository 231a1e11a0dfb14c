#include "lensopt/refine/lens_residuals.hpp"

#include <cmath>

#include "lensopt/optics/trace.hpp"

namespace lensopt::refine {

std::optional<Eigen::VectorXd> lens_residuals(const optics::TraceOutcome& outcome, const optics::MeritWeights& w) {
    if (!outcome.feasible) return std::nullopt;
    const auto n = static_cast<Eigen::Index>(outcome.rays.size());
    Eigen::VectorXd r(n + 2);
    const double scale =
        outcome.spot_rms > 0.0 ? std::sqrt(w.w1 / (static_cast<double>(n) * outcome.spot_rms)) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ray = outcome.rays[static_cast<std::size_t>(i)];
        r[i] = scale * std::hypot(ray.dx, ray.dy);
    }
    r[n] = std::sqrt(w.w2) * (outcome.effl - w.effl_target);
    r[n + 1] = std::sqrt(w.w3) * (outcome.pmag - w.pmag_target);
    return r;
}

std::optional<Eigen::VectorXd> lens_residuals(const optics::Prescription& p, const optics::MeritWeights& w) {
    return lens_residuals(optics::trace_design(p), w);
}

ResidualFn make_lens_residual_fn(optics::Prescription p, optics::MeritWeights w) {
    return [p = std::move(p), w](const Vector6& c) { return lens_residuals(p.with_curvatures(c), w); };
}

}  // namespace lensopt::refine
