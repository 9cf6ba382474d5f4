#pragma once

// JSON model documents and reach-tree dumps.
//
// Numbers in a model may be JSON numbers (decimals are read exactly),
// rational strings such as "2/3", or "inf" / "-inf" for open interval ends.

#include "racreach/automaton.hpp"
#include "racreach/reach.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace racreach {

/// Values from the document's "analysis" section; absent keys stay empty.
struct AnalysisSettings {
    std::optional<Scalar> tmax;
    std::optional<std::size_t> jumps;
    std::optional<double> tint;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
};

struct ModelDocument {
    Rac rac;
    std::optional<GoalSpec> goal;
    AnalysisSettings analysis;
};

/// Throws ModelError; syntax errors carry line and column.
ModelDocument parse_model(std::string_view text, const std::string& source = "<model>");
ModelDocument load_model(const std::filesystem::path& path);

/// Reach-tree dump: one entry per initial location, constraints as exact
/// "p/q" strings.
std::string dump_trees(const std::vector<ReachTree>& trees, const UnrolledRac& u, const std::optional<GoalSpec>& goal);

/// Node polytopes of a dump, per tree, in node order.
std::vector<std::vector<HPolytope>> read_tree_polytopes(std::string_view dump);

}  // namespace racreach
