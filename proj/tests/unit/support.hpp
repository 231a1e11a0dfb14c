#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lensopt/niching/niching.hpp"
#include "lensopt/optics/trace.hpp"

namespace test_support {

using lensopt::Vector6;

// A refined local minimum of the default layout (merit ~ 0.0134).
inline Vector6 reference_minimum() {
    Vector6 c;
    c << 0.05888135053518956, -0.021915394542554388, -0.09182473009805947, -0.06693732467835445,
        0.0520488287788755, 0.10122868534717873;
    return c;
}

// Rejection sampling of feasible designs in the curvature box.
inline std::vector<Vector6> feasible_designs(std::size_t count, std::uint64_t seed,
                                             const lensopt::optics::Prescription& p = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-lensopt::kCurvatureBound, lensopt::kCurvatureBound);
    std::vector<Vector6> out;
    while (out.size() < count) {
        Vector6 c;
        for (auto& v : c) v = u(rng);
        if (lensopt::optics::trace_design(p.with_curvatures(c)).feasible) out.push_back(c);
    }
    return out;
}

// Himmelblau's function on (c1, c2) scaled by 20 so [-5, 5]^2 maps onto the
// curvature box; c3..c6 are frozen at zero.
inline constexpr double kHimmelblauScale = 20.0;

inline double himmelblau(double c1, double c2) {
    const double x = kHimmelblauScale * c1, y = kHimmelblauScale * c2;
    return std::pow(x * x + y - 11.0, 2) + std::pow(x + y * y - 7.0, 2);
}

inline lensopt::niching::NichingConfig himmelblau_config(long budget = 10000) {
    lensopt::niching::NichingConfig c;
    c.budget = budget;
    c.domain_lo = Vector6::Zero();
    c.domain_hi = Vector6::Zero();
    c.domain_lo.head<2>().setConstant(-lensopt::kCurvatureBound);
    c.domain_hi.head<2>().setConstant(lensopt::kCurvatureBound);
    return c;
}

inline lensopt::niching::Objective himmelblau_objective() {
    return [](const Vector6& x) { return lensopt::niching::Evaluation{himmelblau(x[0], x[1]), true}; };
}

// Oracle: local minima of the 1e-3 grid over the box, polished by a 1e-6 grid
// around each. Returns the (c1, c2) locations.
inline std::vector<Eigen::Vector2d> himmelblau_minima_by_grid() {
    constexpr int n = 501;
    const double lo = -lensopt::kCurvatureBound, step = 2 * lensopt::kCurvatureBound / (n - 1);
    std::vector<double> g(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i * n + j] = himmelblau(lo + i * step, lo + j * step);
    std::vector<Eigen::Vector2d> out;
    for (int i = 1; i + 1 < n; ++i)
        for (int j = 1; j + 1 < n; ++j) {
            const double v = g[i * n + j];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di || dj) && g[(i + di) * n + j + dj] <= v) is_min = false;
            if (!is_min) continue;
            Eigen::Vector2d best(lo + i * step, lo + j * step);
            for (double s = step; s > 1e-6; s /= 10) {
                const Eigen::Vector2d centre = best;
                for (int a = -10; a <= 10; ++a)
                    for (int b = -10; b <= 10; ++b) {
                        const Eigen::Vector2d c = centre + Eigen::Vector2d(a, b) * (s / 10);
                        if (himmelblau(c[0], c[1]) < himmelblau(best[0], best[1])) best = c;
                    }
            }
            out.push_back(best);
        }
    return out;
}

// Number of grid minima with a DPS peak within `radius`.
inline int minima_found(const lensopt::niching::DynamicPeakSet& dps, const std::vector<Eigen::Vector2d>& minima,
                        double radius) {
    int found = 0;
    for (const auto& m : minima) {
        for (const auto& pk : dps.peaks) {
            Vector6 target = Vector6::Zero();
            target.head<2>() = m;
            if ((pk.vector - target).norm() <= radius) {
                ++found;
                break;
            }
        }
    }
    return found;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("lensopt_" + tag + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace test_support
