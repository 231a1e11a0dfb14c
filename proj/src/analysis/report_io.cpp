#include "lensopt/analysis/report_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lensopt/util/table.hpp"

namespace lensopt::analysis {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += ch;
        }
    }
    return out;
}

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

struct Frame {
    double x0, x1, y0, y1;  // data ranges

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
    if (hi > lo) return;
    const double pad = lo == 0.0 ? 0.5 : 0.5 * std::abs(lo);
    lo -= pad;
    hi += pad;
}

void svg_open(std::ostream& out, const std::string& title) {
    fmt::print(out,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
               "font-family=\"sans-serif\" font-size=\"12\">\n"
               "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
               "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
               kWidth, kHeight, kWidth / 2.0, xml_escape(title));
}

void svg_axes(std::ostream& out, const Frame& f, const std::string& x_label, const std::string& y_label) {
    const double bottom = kHeight - kBottom;
    fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, bottom,
               kWidth - kRight);
    fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, bottom);
    for (int t = 0; t <= 4; ++t) {
        const double y = f.y0 + (f.y1 - f.y0) * t / 4.0;
        fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6.0, f.py(y) + 4.0, y);
    }
    if (!x_label.empty())
        fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kWidth / 2.0, kHeight - 15.0,
                   xml_escape(x_label));
    fmt::print(out, "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
               kHeight / 2.0, xml_escape(y_label));
}

}  // namespace

void write_critical_reports(const std::filesystem::path& path, std::span<const CriticalPointReport> reports) {
    auto out = open_out(path);
    out << "# index\tc1\tc2\tc3\tc4\tc5\tc6\tmerit\tconsensus_delta\tgradient_norm\tlambda1\tlambda2\tlambda3\t"
           "lambda4\tlambda5\tlambda6\tcondition_number\tdominance_ratio\tverdict\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const auto& c = r.consensus_probe();
        fmt::print(out, "{}", i);
        for (double v : r.point) fmt::print(out, "\t{}", v);
        fmt::print(out, "\t{}\t{}\t{}", r.value, c.delta, c.gradient_norm);
        for (double v : c.spectrum) fmt::print(out, "\t{}", v);
        fmt::print(out, "\t{}\t{}\t{}\n", r.condition_number, r.dominance_ratio, to_string(r.verdict));
    }
}

void write_delta_sweeps(const std::filesystem::path& path, std::span<const CriticalPointReport> reports) {
    auto out = open_out(path);
    out << "# index\tdelta\tevaluable\tgradient_norm\tlambda1\tlambda2\tlambda3\tlambda4\tlambda5\tlambda6\tverdict\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const auto& p : reports[i].sweep) {
            fmt::print(out, "{}\t{}\t{}\t{}", i, p.delta, p.evaluable ? 1 : 0, p.gradient_norm);
            for (double v : p.spectrum) fmt::print(out, "\t{}", v);
            fmt::print(out, "\t{}\n", p.evaluable ? to_string(p.verdict) : "infeasible_stencil");
        }
    }
}

void write_distance_pairs(const std::filesystem::path& path, const DistanceStudy& study) {
    auto out = open_out(path);
    out << "# i\tj\tdistance\n";
    std::size_t k = 0;
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        if (study.cross) {
            for (std::size_t j = 0; j < study.merits_b.size(); ++j)
                fmt::print(out, "{}\t{}\t{}\n", i, j, study.distances[k++]);
        } else {
            for (std::size_t j = i + 1; j < study.rows.size(); ++j)
                fmt::print(out, "{}\t{}\t{}\n", i, j, study.distances[k++]);
        }
    }
}

void write_distance_rows(const std::filesystem::path& path, const DistanceStudy& study) {
    auto out = open_out(path);
    out << "# index\tmerit\tnearest\tmean\n";
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& row = study.rows[i];
        if (row.empty()) {
            fmt::print(out, "{}\t{}\tnan\tnan\n", i, study.merits_a[i]);
            continue;
        }
        double sum = 0.0;
        for (double d : row) sum += d;
        fmt::print(out, "{}\t{}\t{}\t{}\n", i, study.merits_a[i], *std::min_element(row.begin(), row.end()),
                   sum / static_cast<double>(row.size()));
    }
}

void write_infeasibility_table(const std::filesystem::path& path, const InfeasibilityStudy& study) {
    auto out = open_out(path);
    out << "# rep";
    for (int k = 1; k <= study.config.k_minima; ++k) fmt::print(out, "\tmin_{}", k);
    out << "\tw\tp_value\tnormal\terror\n";
    for (const auto& r : study.reps) {
        fmt::print(out, "{}", r.rep);
        for (double v : r.minima) fmt::print(out, "\t{}", v);
        const bool normal = r.error.empty() && r.p_value > study.config.alpha;
        fmt::print(out, "\t{}\t{}\t{}\t{}\n", r.w, r.p_value, normal ? 1 : 0, r.error.empty() ? "-" : r.error);
    }
}

void write_scored_points(const std::filesystem::path& path, std::span<const ScoredPoint> points) {
    auto out = open_out(path);
    out << "# c1\tc2\tc3\tc4\tc5\tc6\tmerit\n";
    for (const auto& p : points) {
        for (double v : p.x) fmt::print(out, "{}\t", v);
        fmt::print(out, "{}\n", p.merit);
    }
}

std::vector<ScoredPoint> read_scored_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open point list '{}'", path.string()));
    std::vector<ScoredPoint> out;
    util::for_each_row(in, 7, [&](const auto& f) {
        ScoredPoint p;
        for (int k = 0; k < kNumSurfaces; ++k) p.x[k] = util::parse_double(f[static_cast<std::size_t>(k)]);
        p.merit = util::parse_double(f[6]);
        out.push_back(p);
    });
    return out;
}

void write_histogram_svg(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                         std::span<const double> values, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    auto out = open_out(path);
    svg_open(out, title);
    if (values.empty()) {
        fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no data</text>\n</svg>\n", kWidth / 2.0,
                   kHeight / 2.0);
        return;
    }
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    widen(lo, hi);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        auto b = static_cast<int>((v - lo) / (hi - lo) * bins);
        ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
    }
    const Frame f{lo, hi, 0.0, static_cast<double>(*std::max_element(counts.begin(), counts.end()))};
    svg_axes(out, f, x_label, "count");
    for (int b = 0; b < bins; ++b) {
        const double left = f.px(lo + (hi - lo) * b / bins);
        const double right = f.px(lo + (hi - lo) * (b + 1) / bins);
        const double top = f.py(counts[static_cast<std::size_t>(b)]);
        fmt::print(out, "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"steelblue\" "
                        "stroke=\"white\"/>\n",
                   left, top, right - left, kHeight - kBottom - top);
    }
    fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"start\">{:.4g}</text>\n", kLeft, kHeight - kBottom + 16.0, lo);
    fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.4g}</text>\n", kWidth - kRight,
               kHeight - kBottom + 16.0, hi);
    out << "</svg>\n";
}

void write_strip_svg(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     std::span<const Series> series, std::optional<double> reference) {
    auto out = open_out(path);
    svg_open(out, title);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series)
        for (double v : s.values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (reference) {
        lo = std::min(lo, *reference);
        hi = std::max(hi, *reference);
    }
    if (!std::isfinite(lo)) {
        fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">no data</text>\n</svg>\n", kWidth / 2.0,
                   kHeight / 2.0);
        return;
    }
    widen(lo, hi);
    const Frame f{0.0, static_cast<double>(series.size()), lo, hi};
    svg_axes(out, f, "", y_label);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double cx = f.px(s + 0.5);
        for (double v : series[s].values)
            if (std::isfinite(v))
                fmt::print(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.4\"/>\n",
                           cx, f.py(v));
        fmt::print(out, "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", cx, kHeight - kBottom + 16.0,
                   xml_escape(series[s].label));
    }
    if (reference)
        fmt::print(out,
                   "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"firebrick\" "
                   "stroke-dasharray=\"6 4\"/>\n",
                   kLeft, f.py(*reference), kWidth - kRight);
    out << "</svg>\n";
}

void write_scatter_svg(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const PointSeries> series) {
    static constexpr std::array<const char*, 6> kColours{"steelblue", "darkorange", "seagreen",
                                                         "firebrick", "purple", "saddlebrown"};
    auto out = open_out(path);
    svg_open(out, title);
    double extent = 0.0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) extent = std::max({extent, std::abs(x), std::abs(y)});
    if (!(extent > 0.0)) extent = 1.0;
    const Frame f{-extent, extent, -extent, extent};
    svg_axes(out, f, x_label, y_label);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kColours[s % kColours.size()];
        for (auto [x, y] : series[s].points)
            fmt::print(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                       f.px(x), f.py(y), colour);
        fmt::print(out, "<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kWidth - kRight - 120.0,
                   kTop + 16.0 * (static_cast<double>(s) + 1.0), colour, xml_escape(series[s].label));
    }
    out << "</svg>\n";
}

}  // namespace lensopt::analysis
