#include "lensopt/niching/archive.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lensopt/util/table.hpp"

namespace lensopt::niching {

int generation_count(std::span<const EvaluationRecord> archive) {
    int count = 0;
    int last = -1;
    for (const auto& r : archive) {
        if (r.generation != last) {
            ++count;
            last = r.generation;
        }
    }
    return count;
}

std::vector<EvaluationRecord> last_generations(std::span<const EvaluationRecord> archive, int depth) {
    if (depth <= 0 || archive.empty()) return {};
    auto it = archive.end();
    int seen = 0;
    int current = -1;
    while (it != archive.begin()) {
        const auto& r = *std::prev(it);
        if (r.generation != current) {
            if (seen == depth) break;
            ++seen;
            current = r.generation;
        }
        --it;
    }
    return {it, archive.end()};
}

void write_archive(std::ostream& out, std::span<const EvaluationRecord> archive) {
    out << "# generation\tniche_id\tc1\tc2\tc3\tc4\tc5\tc6\tmerit\tfeasible\n";
    for (const auto& r : archive) {
        fmt::print(out, "{}\t{}", r.generation, r.niche_id);
        for (int k = 0; k < kNumSurfaces; ++k) fmt::print(out, "\t{}", r.vector[k]);
        fmt::print(out, "\t{}\t{}\n", r.merit, r.feasible ? 1 : 0);
    }
}

void write_archive(const std::filesystem::path& path, std::span<const EvaluationRecord> archive) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    write_archive(out, archive);
}

std::vector<EvaluationRecord> read_archive(std::istream& in) {
    std::vector<EvaluationRecord> out;
    util::for_each_row(in, 10, [&](const auto& f) {
        EvaluationRecord r;
        r.generation = util::parse_int(f[0]);
        r.niche_id = util::parse_int(f[1]);
        for (int k = 0; k < kNumSurfaces; ++k) r.vector[k] = util::parse_double(f[static_cast<std::size_t>(2 + k)]);
        r.merit = util::parse_double(f[8]);
        r.feasible = util::parse_int(f[9]) != 0;
        out.push_back(r);
    });
    return out;
}

std::vector<EvaluationRecord> read_archive(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open archive '{}'", path.string()));
    return read_archive(in);
}

}  // namespace lensopt::niching
