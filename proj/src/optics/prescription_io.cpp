#include "lensopt/optics/prescription_io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace lensopt::optics {

namespace {

template <std::size_t N>
void read_array(const nlohmann::json& j, const char* key, std::array<double, N>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != N)
        throw ConfigError(fmt::format("prescription key '{}' must be an array of {} numbers", key, N));
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i].get<double>();
}

template <typename T>
void read_scalar(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Prescription prescription_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("prescription must be a JSON object");
    Prescription p;
    try {
        read_array(j, "thicknesses", p.thicknesses);
        read_array(j, "refractive_indices", p.refractive_indices);
        read_array(j, "clear_semi_diameters", p.clear_semi_diameters);
        read_array(j, "object_heights", p.object_heights);
        read_scalar(j, "stop_surface_index", p.stop_surface_index);
        read_scalar(j, "entrance_pupil_semi_diameter", p.entrance_pupil_semi_diameter);
        read_scalar(j, "rays_per_height", p.rays_per_height);
        read_scalar(j, "pupil_rings", p.pupil_rings);
        read_scalar(j, "wavelength_nm", p.wavelength_nm);
        if (j.contains("curvatures")) {
            std::array<double, kNumSurfaces> c{};
            read_array(j, "curvatures", c);
            p.curvatures = Eigen::Map<const Vector6>(c.data());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad prescription: {}", e.what()));
    }
    p.validate();
    return p;
}

nlohmann::json prescription_to_json(const Prescription& p) {
    nlohmann::json j;
    j["thicknesses"] = p.thicknesses;
    j["refractive_indices"] = p.refractive_indices;
    j["clear_semi_diameters"] = p.clear_semi_diameters;
    j["object_heights"] = p.object_heights;
    j["stop_surface_index"] = p.stop_surface_index;
    j["entrance_pupil_semi_diameter"] = p.entrance_pupil_semi_diameter;
    j["rays_per_height"] = p.rays_per_height;
    j["pupil_rings"] = p.pupil_rings;
    j["wavelength_nm"] = p.wavelength_nm;
    return j;
}

Prescription load_prescription(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open prescription file '{}'", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("cannot parse '{}': {}", path.string(), e.what()));
    }
    return prescription_from_json(j);
}

MeritWeights weights_from_json(const nlohmann::json& j) {
    MeritWeights w;
    try {
        read_scalar(j, "w1", w.w1);
        read_scalar(j, "w2", w.w2);
        read_scalar(j, "w3", w.w3);
        read_scalar(j, "effl_target", w.effl_target);
        read_scalar(j, "pmag_target", w.pmag_target);
        read_scalar(j, "infeasible_penalty", w.infeasible_penalty);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("bad merit weights: {}", e.what()));
    }
    w.validate();
    return w;
}

nlohmann::json weights_to_json(const MeritWeights& w) {
    return {{"w1", w.w1},
            {"w2", w.w2},
            {"w3", w.w3},
            {"effl_target", w.effl_target},
            {"pmag_target", w.pmag_target},
            {"infeasible_penalty", w.infeasible_penalty}};
}

}  // namespace lensopt::optics
