#pragma once

// Forward reachability on an unrolled automaton. State sets live in
// (Var, T, mu): the model variables, the global timer and one stopwatch per
// clock copy.

#include "racreach/automaton.hpp"
#include "racreach/elimination.hpp"

#include <optional>
#include <string>
#include <vector>

namespace racreach {

struct StateLayout {
    std::size_t vars = 0;
    std::size_t copies = 0;

    explicit StateLayout(const UnrolledRac& u) : vars(u.model.dim()), copies(u.stochastic_dim()) {}
    StateLayout(std::size_t v, std::size_t c) : vars(v), copies(c) {}

    std::size_t timer() const { return vars; }
    std::size_t stopwatch(std::size_t copy) const { return vars + 1 + copy; }
    std::size_t dim() const { return vars + 1 + copies; }
};

struct SymbolicState {
    /// Unrolled location.
    std::size_t location = 0;
    HPolytope polytope;
};

struct ReachOptions {
    Scalar t_max = 0;
    std::size_t jmp = 0;
    EliminationMode mode = EliminationMode::fm_plus;
};

/// All states reachable from s by letting time pass in its location, capped
/// at T <= t_max. Contains s itself.
SymbolicState time_successor(const SymbolicState& s, const UnrolledRac& u, const Scalar& t_max,
                             EliminationMode mode = EliminationMode::fm_plus, EliminationStats* stats = nullptr);

/// States after taking unrolled jump `j` from s. Throws std::invalid_argument
/// when j does not leave s.location.
SymbolicState jump_successor(const SymbolicState& s, std::size_t j, const UnrolledRac& u,
                             EliminationMode mode = EliminationMode::fm_plus, EliminationStats* stats = nullptr);

struct ReachNode {
    std::size_t index = 0;
    SymbolicState state;
    std::size_t depth = 0;
    std::optional<std::size_t> parent;
    /// Original jump id of the incoming edge.
    std::optional<std::size_t> via;
};

struct ReachEdge {
    std::size_t parent = 0;
    std::size_t jump = 0;
    std::size_t child = 0;
};

struct ReachTree {
    std::size_t root = 0;
    std::vector<ReachNode> nodes;
    std::vector<ReachEdge> edges;
    EliminationStats stats;
    /// Nodes below the depth cap that have neither jump successors nor room
    /// for time to reach t_max.
    std::vector<std::string> warnings;
};

/// Breadth-first (t_max, jmp)-bounded tree from the unrolled root location
/// `root`. Node indices follow the BFS order.
ReachTree build_reach_tree(const UnrolledRac& u, std::size_t root, const ReachOptions& options);

struct GoalSpec {
    /// Original location indices.
    std::vector<std::size_t> locations;
    /// Constraints over the model variables; universe for location-only goals.
    HPolytope valuation;
};

struct GoalNode {
    std::size_t node = 0;
    HPolytope polytope;
    std::vector<std::size_t> expired;
};

std::vector<GoalNode> goal_nodes(const ReachTree& t, const UnrolledRac& u, const GoalSpec& g);

/// Projects a full state polytope onto the sample space of the clock copies:
/// expired copies keep their frozen stopwatch value, the others are lifted
/// to s in [mu, t_int]. Every coordinate is clamped to [0, t_int].
HPolytope project_and_lift(const HPolytope& p, const StateLayout& layout, const std::vector<std::size_t>& expired,
                           const Scalar& t_int, EliminationMode mode = EliminationMode::fm_plus,
                           EliminationStats* stats = nullptr);

struct RegionMember {
    std::size_t tree = 0;
    std::size_t node = 0;
    HPolytope polytope;
};

/// Union of lifted goal polytopes over the sample space.
struct ForwardRegion {
    std::size_t dim = 0;
    std::vector<RegionMember> members;
    /// Copies that were lifted (did not expire) in at least one member.
    std::vector<bool> lifted;
};

ForwardRegion assemble_forward_region(const std::vector<ReachTree>& trees, const UnrolledRac& u, const GoalSpec& g,
                                      const Scalar& t_int, EliminationMode mode = EliminationMode::fm_plus,
                                      EliminationStats* stats = nullptr);

}  // namespace racreach
