#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lensopt/optics/types.hpp"

namespace lensopt::analysis {

struct ScoredPoint {
    Vector6 x = Vector6::Zero();
    double merit = 0.0;
};

/// Single-linkage clusters at `tol`; keeps the lowest-merit member of each,
/// sorted by merit (ties by input order).
std::vector<ScoredPoint> filter_duplicates(std::span<const ScoredPoint> points, double tol = 1e-4);

struct DistanceSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct DistanceStudy {
    std::string label;
    bool cross = false;
    /// Within-set: upper triangle in (i, j > i) order. Cross-set: row-major a x b.
    std::vector<double> distances;
    /// rows[i]: distances from a[i] to every other member (within) or to every b (cross).
    std::vector<std::vector<double>> rows;
    std::vector<double> merits_a;
    std::vector<double> merits_b;
    std::optional<DistanceSummary> summary;  // empty when there are no distances
};

/// Within-set study when `b` is empty, cross-set study otherwise. Fewer than
/// two points in a within-set study give an empty distance list.
DistanceStudy distance_study(std::string label, std::span<const ScoredPoint> a,
                             std::optional<std::span<const ScoredPoint>> b = std::nullopt);

}  // namespace lensopt::analysis
