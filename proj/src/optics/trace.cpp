#include "lensopt/optics/trace.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace lensopt::optics {

namespace {

// Below this |C| the system is treated as afocal, 1/mm.
constexpr double kPowerFloor = 1e-12;

Eigen::Matrix2d refraction_matrix(double power) {
    Eigen::Matrix2d m;
    m << 1.0, 0.0, -power, 1.0;
    return m;
}

Eigen::Matrix2d transfer_matrix(double reduced_thickness) {
    Eigen::Matrix2d m;
    m << 1.0, reduced_thickness, 0.0, 1.0;
    return m;
}

double surface_power(const Prescription& p, int k) {
    const auto i = static_cast<std::size_t>(k);
    return (p.refractive_indices[i + 1] - p.refractive_indices[i]) * p.curvatures[k];
}

// Matrix from just before surface 1 to just before surface `end` (0-based, exclusive).
Eigen::Matrix2d partial_system(const Prescription& p, int end) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    for (int k = 0; k < end; ++k) {
        m = refraction_matrix(surface_power(p, k)) * m;
        if (k + 1 < kNumSurfaces) {
            const auto i = static_cast<std::size_t>(k);
            m = transfer_matrix(p.thicknesses[i] / p.refractive_indices[i + 1]) * m;
        }
    }
    return m;
}

}  // namespace

std::optional<Eigen::Vector3d> intersect_sphere(const Ray& ray, double curvature, double vertex_z,
                                                double clear_semi_diameter) {
    const Eigen::Vector3d local = ray.origin - Eigen::Vector3d(0.0, 0.0, vertex_z);
    const Eigen::Vector3d& d = ray.direction;
    // c t^2 - 2 B t + F = 0; the vertex-side root is F / (B + sqrt(B^2 - c F)).
    const double b = d.z() - curvature * local.dot(d);
    const double f = curvature * local.squaredNorm() - 2.0 * local.z();
    const double disc = b * b - curvature * f;
    if (disc < 0.0) return std::nullopt;
    // A negative denominator is legitimate: the ray enters the ball through
    // the far cap first and leaves through the vertex cap.
    const double denom = b + std::sqrt(disc);
    if (denom == 0.0) return std::nullopt;
    const double t = f / denom;
    if (!(t > kMinPropagation)) return std::nullopt;
    Eigen::Vector3d hit = ray.origin + t * d;
    if (hit.x() * hit.x() + hit.y() * hit.y() > clear_semi_diameter * clear_semi_diameter) return std::nullopt;
    return hit;
}

Eigen::Vector3d sphere_normal(const Eigen::Vector3d& point, double curvature, double vertex_z) {
    // Unit length on the sphere itself; normalized to absorb rounding.
    Eigen::Vector3d n(-curvature * point.x(), -curvature * point.y(), 1.0 - curvature * (point.z() - vertex_z));
    return n.normalized();
}

std::optional<Eigen::Vector3d> refract(const Eigen::Vector3d& incident, const Eigen::Vector3d& normal, double n1,
                                       double n2) {
    Eigen::Vector3d facing = normal;
    double cos_i = -facing.dot(incident);
    if (cos_i < 0.0) {
        facing = -facing;
        cos_i = -cos_i;
    }
    const double eta = n1 / n2;
    const double k = 1.0 - eta * eta * (1.0 - cos_i * cos_i);
    if (k < 0.0) return std::nullopt;
    Eigen::Vector3d out = eta * incident + (eta * cos_i - std::sqrt(k)) * facing;
    return out.normalized();
}

Eigen::Matrix2d paraxial_trace(const Prescription& p) { return partial_system(p, kNumSurfaces); }

double effective_focal_length(const Eigen::Matrix2d& system) {
    const double c = system(1, 0);
    if (std::abs(c) < kPowerFloor) return std::numeric_limits<double>::infinity();
    return -1.0 / c;
}

std::optional<Conjugates> solve_conjugates(const Prescription& p) {
    const Eigen::Matrix2d m = paraxial_trace(p);
    const double a = m(0, 0);
    const double c = m(1, 0);
    const double d = m(1, 1);
    if (std::abs(c) < kPowerFloor) return std::nullopt;
    // Imaging with magnification -1 needs C*s + D = -1 on the object side and
    // A + C*s' = -1 on the image side (reduced distances).
    const double object_reduced = (-1.0 - d) / c;
    const double image_reduced = (-1.0 - a) / c;
    Conjugates out{object_reduced * p.refractive_indices.front(), image_reduced * p.refractive_indices.back()};
    if (!(out.object_distance > 0.0) || !(out.image_distance > 0.0) || !std::isfinite(out.object_distance) ||
        !std::isfinite(out.image_distance))
        return std::nullopt;
    return out;
}

std::optional<double> solve_object_distance(const Prescription& p) {
    auto conj = solve_conjugates(p);
    if (!conj) return std::nullopt;
    return conj->object_distance;
}

double paraxial_magnification(const Prescription& p, const Conjugates& conj) {
    const Eigen::Matrix2d total = transfer_matrix(conj.image_distance / p.refractive_indices.back()) *
                                  paraxial_trace(p) *
                                  transfer_matrix(conj.object_distance / p.refractive_indices.front());
    return total(0, 0);
}

std::optional<double> entrance_pupil_z(const Prescription& p) {
    const Eigen::Matrix2d front = partial_system(p, p.stop_surface_index - 1);
    if (p.stop_surface_index == 1) return 0.0;
    if (std::abs(front(0, 0)) < 1e-12) return std::nullopt;
    return p.refractive_indices.front() * front(0, 1) / front(0, 0);
}

Eigen::Vector2d pupil_sample(const Prescription& p, int ray_index) {
    const int per_ring = p.rays_per_ring();
    const int ring = ray_index / per_ring;
    const int j = ray_index % per_ring;
    // Equal-area rings; odd rings rotated by half a step. Every ring starts on
    // the +y meridian so the pattern is mirror symmetric in x.
    const double radius = std::sqrt((ring + 0.5) / p.pupil_rings);
    const double step = 2.0 * std::numbers::pi / per_ring;
    const double theta = 0.5 * std::numbers::pi + step * j + ((ring % 2 == 1) ? 0.5 * step : 0.0);
    return {radius * std::cos(theta), radius * std::sin(theta)};
}

SingleRayResult trace_ray(const Prescription& p, Ray ray, double image_z) {
    SingleRayResult out;
    double z = 0.0;
    for (int k = 0; k < kNumSurfaces; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double c = p.curvatures[k];
        auto hit = intersect_sphere(ray, c, z, p.clear_semi_diameters[i]);
        if (!hit) {
            out.failure = FailureKind::ray_missed_surface;
            return out;
        }
        auto dir = refract(ray.direction, sphere_normal(*hit, c, z), p.refractive_indices[i],
                           p.refractive_indices[i + 1]);
        if (!dir) {
            out.failure = FailureKind::total_internal_reflection;
            return out;
        }
        ray = Ray{*hit, *dir};
        if (k + 1 < kNumSurfaces) z += p.thicknesses[i];
    }
    if (!(ray.direction.z() > 0.0)) {
        out.failure = FailureKind::ray_missed_surface;
        return out;
    }
    const double t = (image_z - ray.origin.z()) / ray.direction.z();
    if (!(t > kMinPropagation)) {
        out.failure = FailureKind::ray_missed_surface;
        return out;
    }
    out.hit = ray.origin + t * ray.direction;
    return out;
}

double spot_rms(std::span<const RayRecord> rays) {
    if (rays.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : rays) sum += r.dx * r.dx + r.dy * r.dy;
    return std::sqrt(sum / static_cast<double>(rays.size()));
}

TraceOutcome trace_design(const Prescription& p) {
    TraceOutcome out;
    const Eigen::Matrix2d system = paraxial_trace(p);
    out.effl = effective_focal_length(system);

    const auto conj = solve_conjugates(p);
    if (!conj) {
        out.failure_kind = FailureKind::no_paraxial_conjugate;
        return out;
    }
    out.object_distance = conj->object_distance;
    out.image_distance = conj->image_distance;
    out.pmag = paraxial_magnification(p, *conj);

    const auto pupil_z = entrance_pupil_z(p);
    if (!pupil_z) {
        out.failure_kind = FailureKind::zero_power;
        return out;
    }

    const double object_z = -conj->object_distance;
    const double image_z = p.vertex_z(kNumSurfaces - 1) + conj->image_distance;
    const int per_height = p.rays_per_height;
    out.rays.reserve(static_cast<std::size_t>(p.total_rays()));
    std::vector<Eigen::Vector2d> pupil(static_cast<std::size_t>(per_height));
    for (int j = 0; j < per_height; ++j)
        pupil[static_cast<std::size_t>(j)] = pupil_sample(p, j) * p.entrance_pupil_semi_diameter;

    for (std::size_t h = 0; h < p.object_heights.size(); ++h) {
        const Eigen::Vector3d object(0.0, p.object_heights[h], object_z);
        const std::size_t group_begin = out.rays.size();
        for (int j = 0; j < per_height; ++j) {
            const Eigen::Vector2d& uv = pupil[static_cast<std::size_t>(j)];
            Eigen::Vector3d dir = Eigen::Vector3d(uv.x(), uv.y(), *pupil_z) - object;
            if (std::abs(dir.z()) < kMinPropagation) {
                out.failure_kind = FailureKind::zero_power;
                return out;
            }
            if (dir.z() < 0.0) dir = -dir;
            const auto result = trace_ray(p, Ray{object, dir.normalized()}, image_z);
            if (result.failure != FailureKind::none) {
                out.failure_kind = result.failure;
                out.rays.clear();
                return out;
            }
            out.rays.push_back(RayRecord{j, static_cast<int>(h), result.hit.x(), result.hit.y(), 0.0, 0.0});
        }
        double cx = 0.0;
        double cy = 0.0;
        for (std::size_t r = group_begin; r < out.rays.size(); ++r) {
            cx += out.rays[r].x;
            cy += out.rays[r].y;
        }
        cx /= per_height;
        cy /= per_height;
        for (std::size_t r = group_begin; r < out.rays.size(); ++r) {
            out.rays[r].dx = out.rays[r].x - cx;
            out.rays[r].dy = out.rays[r].y - cy;
        }
    }
    out.spot_rms = spot_rms(out.rays);
    out.feasible = true;
    return out;
}

double merit_of(const TraceOutcome& outcome, const MeritWeights& w) {
    if (!outcome.feasible) return w.infeasible_penalty;
    const double de = outcome.effl - w.effl_target;
    const double dm = outcome.pmag - w.pmag_target;
    return w.w1 * outcome.spot_rms + w.w2 * de * de + w.w3 * dm * dm;
}

double merit(const Prescription& p, const MeritWeights& w) {
    for (int k = 0; k < kNumSurfaces; ++k) {
        if (!(std::abs(p.curvatures[k]) <= kCurvatureBound))
            throw DomainError(fmt::format("curvature c{} = {} outside [-{}, {}]", k + 1, p.curvatures[k],
                                          kCurvatureBound, kCurvatureBound));
    }
    return merit_of(trace_design(p), w);
}

}  // namespace lensopt::optics
