#include "lensopt/analysis/derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace lensopt::analysis {

namespace {

constexpr double kEigenZeroRelTol = 1e-6;

// Evaluates f and records the offending coordinates of a failed stencil point.
class StencilEvaluator {
public:
    StencilEvaluator(const ScalarFn& f, double delta) : f_(f), delta_(delta) {}

    double operator()(const Vector6& x, int i, int j = -1) {
        auto v = f_(x);
        if (v) return *v;
        bad_.push_back(i + 1);
        if (j >= 0 && j != i) bad_.push_back(j + 1);
        return std::numeric_limits<double>::quiet_NaN();
    }

    void raise_if_failed() {
        if (bad_.empty()) return;
        std::sort(bad_.begin(), bad_.end());
        bad_.erase(std::unique(bad_.begin(), bad_.end()), bad_.end());
        throw InfeasibleStencil(bad_, delta_);
    }

private:
    const ScalarFn& f_;
    double delta_;
    std::vector<int> bad_;
};

double center_value(const ScalarFn& f, const Vector6& x, double delta) {
    auto v = f(x);
    if (!v) throw InfeasibleStencil({}, delta);
    return *v;
}

}  // namespace

InfeasibleStencil::InfeasibleStencil(std::vector<int> coordinates, double delta)
    : std::runtime_error(coordinates.empty()
                             ? fmt::format("stencil centre is infeasible (delta {})", delta)
                             : fmt::format("stencil infeasible along coordinates {} (delta {})",
                                           fmt::join(coordinates, ","), delta)),
      coordinates_(std::move(coordinates)),
      delta_(delta) {}

Vector6 fd_gradient(const ScalarFn& f, const Vector6& x, double delta) {
    StencilEvaluator eval(f, delta);
    Vector6 g;
    for (int i = 0; i < kNumSurfaces; ++i) {
        Vector6 plus = x, minus = x;
        plus[i] += delta;
        minus[i] -= delta;
        g[i] = (eval(plus, i) - eval(minus, i)) / (2.0 * delta);
    }
    eval.raise_if_failed();
    return g;
}

Matrix6 fd_hessian(const ScalarFn& f, const Vector6& x, double delta, double* asymmetry) {
    const double f0 = center_value(f, x, delta);
    StencilEvaluator eval(f, delta);
    Matrix6 h;
    const double d2 = delta * delta;
    for (int i = 0; i < kNumSurfaces; ++i) {
        Vector6 plus = x, minus = x;
        plus[i] += delta;
        minus[i] -= delta;
        h(i, i) = (eval(plus, i) - 2.0 * f0 + eval(minus, i)) / d2;
    }
    // Both triangles are stenciled independently so the asymmetry is observable.
    for (int i = 0; i < kNumSurfaces; ++i) {
        for (int j = 0; j < kNumSurfaces; ++j) {
            if (i == j) continue;
            auto shifted = [&](double si, double sj) {
                Vector6 p = x;
                p[i] += si * delta;
                p[j] += sj * delta;
                return eval(p, i, j);
            };
            h(i, j) = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * d2);
        }
    }
    eval.raise_if_failed();
    if (asymmetry) *asymmetry = (h - h.transpose()).cwiseAbs().maxCoeff();
    return 0.5 * (h + h.transpose());
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::minimum:
        return "minimum";
    case Verdict::maximum:
        return "maximum";
    case Verdict::saddle:
        return "saddle";
    case Verdict::degenerate_flat:
        return "degenerate_flat";
    case Verdict::inconsistent_across_deltas:
        return "inconsistent_across_deltas";
    }
    return "unknown";
}

Verdict verdict_from_spectrum(const Vector6& eigenvalues) {
    const double radius = eigenvalues.cwiseAbs().maxCoeff();
    if (!(radius > 0.0) || !eigenvalues.allFinite()) return Verdict::degenerate_flat;
    const double tol = kEigenZeroRelTol * radius;
    int positive = 0, negative = 0;
    for (double v : eigenvalues) {
        if (v > tol) ++positive;
        if (v < -tol) ++negative;
    }
    if (positive > 0 && negative > 0) return Verdict::saddle;
    if (positive == kNumSurfaces) return Verdict::minimum;
    if (negative == kNumSurfaces) return Verdict::maximum;
    return Verdict::degenerate_flat;
}

std::vector<double> default_delta_sweep() {
    std::vector<double> out;
    for (int e = 4; e <= 12; ++e) out.push_back(std::pow(10.0, -e));
    return out;
}

CriticalPointReport classify_critical_point(const ScalarFn& f, const Vector6& x, const std::vector<double>& sweep) {
    if (sweep.empty()) throw ConfigError("delta sweep must not be empty");
    CriticalPointReport report;
    report.point = x;
    report.value = center_value(f, x, sweep.front());

    std::vector<int> failed_coordinates;
    for (double delta : sweep) {
        DeltaProbe probe;
        probe.delta = delta;
        try {
            probe.gradient = fd_gradient(f, x, delta);
            const Matrix6 h = fd_hessian(f, x, delta);
            probe.spectrum = Eigen::SelfAdjointEigenSolver<Matrix6>(h, Eigen::EigenvaluesOnly).eigenvalues();
            probe.gradient_norm = probe.gradient.norm();
            probe.verdict = verdict_from_spectrum(probe.spectrum);
            probe.evaluable = true;
        } catch (const InfeasibleStencil& e) {
            failed_coordinates.insert(failed_coordinates.end(), e.coordinates().begin(), e.coordinates().end());
        }
        report.sweep.push_back(probe);
    }

    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < report.sweep.size(); ++i)
        if (report.sweep[i].evaluable) ranked.push_back(i);
    if (ranked.empty()) {
        std::sort(failed_coordinates.begin(), failed_coordinates.end());
        failed_coordinates.erase(std::unique(failed_coordinates.begin(), failed_coordinates.end()),
                                 failed_coordinates.end());
        throw InfeasibleStencil(failed_coordinates, sweep.back());
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        return report.sweep[a].gradient_norm < report.sweep[b].gradient_norm;
    });

    report.consensus = ranked.front();
    const auto& best = report.sweep[report.consensus];
    report.verdict = best.verdict;
    if (ranked.size() > 1 && report.sweep[ranked[1]].verdict != best.verdict)
        report.verdict = Verdict::inconsistent_across_deltas;

    Vector6 magnitudes = best.spectrum.cwiseAbs();
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
    constexpr double inf = std::numeric_limits<double>::infinity();
    report.condition_number = magnitudes[kNumSurfaces - 1] > 0.0 ? magnitudes[0] / magnitudes[kNumSurfaces - 1] : inf;
    report.dominance_ratio = magnitudes[1] > 0.0 ? magnitudes[0] / magnitudes[1] : inf;
    return report;
}

}  // namespace lensopt::analysis
