#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lensopt/optics/types.hpp"

namespace lensopt::niching {

/// One evaluated design as stored in a run archive.
struct EvaluationRecord {
    Vector6 vector = Vector6::Zero();
    double merit = 0.0;
    bool feasible = false;
    int generation = 0;  // 1-based
    int niche_id = 0;
};

/// Number of distinct generation tags (archives are stored in generation order).
int generation_count(std::span<const EvaluationRecord> archive);

/// Records of the last `depth` generations, clamped to the archive length.
std::vector<EvaluationRecord> last_generations(std::span<const EvaluationRecord> archive, int depth);

/// Tab-separated, one header line starting with '#':
///   generation niche_id c1 c2 c3 c4 c5 c6 merit feasible
void write_archive(std::ostream& out, std::span<const EvaluationRecord> archive);
void write_archive(const std::filesystem::path& path, std::span<const EvaluationRecord> archive);
std::vector<EvaluationRecord> read_archive(std::istream& in);
std::vector<EvaluationRecord> read_archive(const std::filesystem::path& path);

}  // namespace lensopt::niching
