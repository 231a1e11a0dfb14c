#pragma once

#include <limits>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "lensopt/optics/types.hpp"

namespace lensopt::optics {

/// Minimum propagation distance for a surface hit to count, mm.
inline constexpr double kMinPropagation = 1e-9;

/// First intersection of the ray with the vertex-side cap of a sphere of the
/// given curvature whose vertex sits on the axis at vertex_z. Curvature 0 is
/// the plane z = vertex_z. Returns nullopt when the ray misses the sphere,
/// the hit lies behind the ray, or the hit falls outside the clear aperture.
std::optional<Eigen::Vector3d> intersect_sphere(const Ray& ray, double curvature, double vertex_z,
                                                double clear_semi_diameter = std::numeric_limits<double>::infinity());

/// Unit surface normal of the sphere at a point on it, oriented along +z at the vertex.
Eigen::Vector3d sphere_normal(const Eigen::Vector3d& point, double curvature, double vertex_z);

/// Vector form of Snell's law. The normal may face either way. Returns
/// nullopt on total internal reflection.
std::optional<Eigen::Vector3d> refract(const Eigen::Vector3d& incident, const Eigen::Vector3d& normal, double n1,
                                       double n2);

/// Paraxial system matrix from just before surface 1 to just after surface 6,
/// acting on (height, reduced angle n*u).
Eigen::Matrix2d paraxial_trace(const Prescription& p);

struct Conjugates {
    double object_distance;  // object plane to surface 1 vertex, mm
    double image_distance;   // surface 6 vertex to image plane, mm
};

/// Object and image distances giving paraxial transverse magnification -1.
/// Empty when the system has no power or either conjugate is not real.
std::optional<Conjugates> solve_conjugates(const Prescription& p);

std::optional<double> solve_object_distance(const Prescription& p);

/// EFFL of a paraxial system matrix; infinite for an afocal system.
double effective_focal_length(const Eigen::Matrix2d& system);

/// Paraxial magnification between the given conjugate planes.
double paraxial_magnification(const Prescription& p, const Conjugates& conj);

/// Axial position of the paraxial entrance pupil relative to surface 1; empty
/// when the stop images to infinity in object space.
std::optional<double> entrance_pupil_z(const Prescription& p);

/// Normalized pupil coordinates for ray j of a height group (ring-major order).
Eigen::Vector2d pupil_sample(const Prescription& p, int ray_index);

/// Sequentially trace one ray from object space to the image plane located at
/// image_z. Returns the image-plane hit or the failure kind.
struct SingleRayResult {
    Eigen::Vector3d hit = Eigen::Vector3d::Zero();
    FailureKind failure = FailureKind::none;
};
SingleRayResult trace_ray(const Prescription& p, Ray ray, double image_z);

/// Full ray trace of the design at its magnification -1 conjugates.
TraceOutcome trace_design(const Prescription& p);

/// RMS of centroid distances over all ray records, i.e. the spot size.
double spot_rms(std::span<const RayRecord> rays);

/// Weighted merit of an already traced design.
double merit_of(const TraceOutcome& outcome, const MeritWeights& w);

/// Weighted merit; throws DomainError if any curvature lies outside the
/// search box.
double merit(const Prescription& p, const MeritWeights& w);

}  // namespace lensopt::optics
