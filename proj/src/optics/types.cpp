#include "lensopt/optics/types.hpp"

#include <cmath>

#include <fmt/format.h>

namespace lensopt::optics {

std::string_view to_string(FailureKind kind) {
    switch (kind) {
    case FailureKind::none:
        return "none";
    case FailureKind::ray_missed_surface:
        return "ray_missed_surface";
    case FailureKind::total_internal_reflection:
        return "total_internal_reflection";
    case FailureKind::no_paraxial_conjugate:
        return "no_paraxial_conjugate";
    case FailureKind::zero_power:
        return "zero_power";
    }
    return "unknown";
}

double Prescription::vertex_z(int k) const {
    double z = 0.0;
    for (int i = 0; i < k; ++i) z += thicknesses[static_cast<std::size_t>(i)];
    return z;
}

void Prescription::validate() const {
    for (double t : thicknesses) {
        if (!(t > 0.0)) throw ConfigError(fmt::format("thickness must be positive, got {}", t));
    }
    for (double n : refractive_indices) {
        if (!(n >= 1.0)) throw ConfigError(fmt::format("refractive index must be >= 1, got {}", n));
    }
    for (double d : clear_semi_diameters) {
        if (!(d > 0.0)) throw ConfigError(fmt::format("clear semi-diameter must be positive, got {}", d));
    }
    if (stop_surface_index < 1 || stop_surface_index > kNumSurfaces)
        throw ConfigError(fmt::format("stop surface index must be in [1,6], got {}", stop_surface_index));
    if (!(entrance_pupil_semi_diameter > 0.0)) throw ConfigError("entrance pupil semi-diameter must be positive");
    if (pupil_rings < 1 || rays_per_height < pupil_rings || rays_per_height % pupil_rings != 0)
        throw ConfigError(
            fmt::format("rays_per_height ({}) must be a positive multiple of pupil_rings ({})", rays_per_height,
                        pupil_rings));
    for (double h : object_heights) {
        if (!std::isfinite(h) || h < 0.0) throw ConfigError("object heights must be finite and non-negative");
    }
    if (!curvatures.allFinite()) throw ConfigError("curvatures must be finite");
}

Prescription Prescription::with_curvatures(const Vector6& c) const {
    Prescription out = *this;
    out.curvatures = c;
    return out;
}

Prescription Prescription::scaled(double k) const {
    Prescription out = *this;
    out.curvatures /= k;
    for (auto& t : out.thicknesses) t *= k;
    for (auto& d : out.clear_semi_diameters) d *= k;
    for (auto& h : out.object_heights) h *= k;
    out.entrance_pupil_semi_diameter *= k;
    return out;
}

void MeritWeights::validate() const {
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0) throw ConfigError("merit weights must be non-negative");
    if (!(infeasible_penalty > 0.0)) throw ConfigError("infeasible penalty must be positive");
}

}  // namespace lensopt::optics
