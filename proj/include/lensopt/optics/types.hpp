#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lensopt {

inline constexpr int kNumSurfaces = 6;

/// Decision vector: the six surface curvatures, 1/mm.
using Vector6 = Eigen::Matrix<double, kNumSurfaces, 1>;
using Matrix6 = Eigen::Matrix<double, kNumSurfaces, kNumSurfaces>;

/// Curvature search box shared by every optimizer in the project.
inline constexpr double kCurvatureBound = 0.25;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lensopt

namespace lensopt::optics {

struct Ray {
    Eigen::Vector3d origin;
    Eigen::Vector3d direction;  // unit length
};

enum class FailureKind {
    none,
    ray_missed_surface,
    total_internal_reflection,
    no_paraxial_conjugate,
    zero_power,
};

std::string_view to_string(FailureKind kind);

/// Fixed part of the optical system plus the current curvature vector.
///
/// Surface k (1-based) sits at the sum of the first k-1 gaps; surface 1 is
/// at z = 0. The object gap and the image gap are not stored: both come
/// from the paraxial magnification -1 conjugate of the current curvatures.
struct Prescription {
    Vector6 curvatures = Vector6::Zero();
    /// s1->s2, s2->s3, ..., s5->s6, mm.
    std::array<double, kNumSurfaces - 1> thicknesses{3.0, 6.0, 3.0, 6.0, 3.0};
    /// Index of object space followed by the medium after each surface.
    std::array<double, kNumSurfaces + 1> refractive_indices{1.0, 1.62, 1.0, 1.58, 1.0, 1.62, 1.0};
    std::array<double, kNumSurfaces> clear_semi_diameters{10.0, 10.0, 10.0, 10.0, 10.0, 10.0};
    int stop_surface_index = 3;  // 1-based
    double entrance_pupil_semi_diameter = 5.0;
    std::array<double, 3> object_heights{0.0, 10.0, 14.0};
    int rays_per_height = 42;
    int pupil_rings = 6;
    double wavelength_nm = 587.6;

    int rays_per_ring() const { return rays_per_height / pupil_rings; }
    int total_rays() const { return rays_per_height * static_cast<int>(object_heights.size()); }

    /// Vertex z of surface k (0-based).
    double vertex_z(int k) const;

    /// Throws ConfigError on a malformed prescription.
    void validate() const;

    Prescription with_curvatures(const Vector6& c) const;

    /// Every length multiplied by k (curvatures divided by k).
    Prescription scaled(double k) const;
};

struct RayRecord {
    int ray_index = 0;
    int height_index = 0;
    double x = 0.0;
    double y = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

struct TraceOutcome {
    std::vector<RayRecord> rays;
    double spot_rms = 0.0;
    double effl = 0.0;
    double pmag = 0.0;
    double object_distance = 0.0;
    double image_distance = 0.0;
    bool feasible = false;
    FailureKind failure_kind = FailureKind::none;
};

struct MeritWeights {
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 1.0;
    double effl_target = 30.0;
    double pmag_target = -1.0;
    // Feasible merit grows without bound as the optical power vanishes;
    // 1e10 is reached by near-afocal designs inside the box.
    double infeasible_penalty = 1.0e30;

    void validate() const;
};

}  // namespace lensopt::optics
