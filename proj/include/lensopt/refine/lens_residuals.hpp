#pragma once

#include <optional>

#include <Eigen/Core>

#include "lensopt/optics/types.hpp"
#include "lensopt/refine/lm.hpp"

namespace lensopt::refine {

/// Least-squares form of the lens merit: one residual per ray followed by the
/// EFFL and PMAG terms (128 entries for the default ray budget). Ray residuals
/// are the centroid distances scaled by sqrt(w1 / (n * spot_rms)) so the sum
/// of squares is exactly w1 * spot_rms + w2 * dEFFL^2 + w3 * dPMAG^2.
std::optional<Eigen::VectorXd> lens_residuals(const optics::TraceOutcome& outcome, const optics::MeritWeights& w);
std::optional<Eigen::VectorXd> lens_residuals(const optics::Prescription& p, const optics::MeritWeights& w);

/// Residual callback bound to a fixed prescription and weights.
ResidualFn make_lens_residual_fn(optics::Prescription p, optics::MeritWeights w);

}  // namespace lensopt::refine
