#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lensopt/analysis/derivatives.hpp"
#include "lensopt/analysis/infeasibility.hpp"
#include "lensopt/analysis/solution_sets.hpp"

namespace lensopt::analysis {

/// One row per point at its consensus delta.
void write_critical_reports(const std::filesystem::path& path, std::span<const CriticalPointReport> reports);
/// One row per (point, delta).
void write_delta_sweeps(const std::filesystem::path& path, std::span<const CriticalPointReport> reports);

/// Pair list (i, j, distance); an empty study writes the header only.
void write_distance_pairs(const std::filesystem::path& path, const DistanceStudy& study);
/// Per-solution rows: index, merit, nearest, mean.
void write_distance_rows(const std::filesystem::path& path, const DistanceStudy& study);

/// rep, min_1..min_k, w, p_value, normal, error.
void write_infeasibility_table(const std::filesystem::path& path, const InfeasibilityStudy& study);

void write_scored_points(const std::filesystem::path& path, std::span<const ScoredPoint> points);
std::vector<ScoredPoint> read_scored_points(const std::filesystem::path& path);

struct Series {
    std::string label;
    std::vector<double> values;
};

/// Histogram of `values`; an empty input renders an annotated blank chart.
void write_histogram_svg(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                         std::span<const double> values, int bins = 30);

/// One column of points per series, with an optional dashed reference line.
void write_strip_svg(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     std::span<const Series> series, std::optional<double> reference = std::nullopt);

struct PointSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// x-y scatter, one colour per series, equal axis scaling.
void write_scatter_svg(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const PointSeries> series);

}  // namespace lensopt::analysis
