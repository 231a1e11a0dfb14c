#include "lensopt/analysis/solution_sets.hpp"

#include <algorithm>
#include <numeric>

namespace lensopt::analysis {

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

DistanceSummary summarize(const std::vector<double>& d) {
    auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return {*lo, *hi, std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size())};
}

}  // namespace

std::vector<ScoredPoint> filter_duplicates(std::span<const ScoredPoint> points, double tol) {
    if (!(tol > 0.0)) throw ConfigError("duplicate tolerance must be positive");
    const std::size_t n = points.size();
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((points[i].x - points[j].x).norm() <= tol) sets.unite(i, j);

    std::vector<std::size_t> best(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& slot = best[sets.find(i)];
        if (slot == n || points[i].merit < points[slot].merit) slot = i;
    }
    std::vector<std::size_t> keep;
    for (std::size_t r : best)
        if (r != n) keep.push_back(r);
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].merit != points[b].merit) return points[a].merit < points[b].merit;
        return a < b;
    });

    std::vector<ScoredPoint> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(points[i]);
    return out;
}

DistanceStudy distance_study(std::string label, std::span<const ScoredPoint> a,
                             std::optional<std::span<const ScoredPoint>> b) {
    DistanceStudy s;
    s.label = std::move(label);
    for (const auto& p : a) s.merits_a.push_back(p.merit);
    s.rows.resize(a.size());

    if (b) {
        s.cross = true;
        for (const auto& p : *b) s.merits_b.push_back(p.merit);
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (const auto& q : *b) {
                const double d = (a[i].x - q.x).norm();
                s.distances.push_back(d);
                s.rows[i].push_back(d);
            }
        }
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < a.size(); ++j) {
                if (i == j) continue;
                const double d = (a[i].x - a[j].x).norm();
                s.rows[i].push_back(d);
                if (j > i) s.distances.push_back(d);
            }
        }
    }
    if (!s.distances.empty()) s.summary = summarize(s.distances);
    return s;
}

}  // namespace lensopt::analysis
