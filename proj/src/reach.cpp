#include "racreach/reach.hpp"

#include "racreach/errors.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace racreach {

namespace {

EliminationResult project(const HPolytope& p, const std::vector<std::size_t>& vars, EliminationMode mode,
                          EliminationStats* stats) {
    EliminationOptions opt;
    opt.mode = mode;
    opt.order = EliminationOrder::greedy;
    EliminationResult r = eliminate_all(p, vars, opt);
    if (stats) stats->merge(r.stats);
    return r;
}

/// Copies the rows of p (dimension n) into a space of dimension `dim`,
/// coordinate i going to offset + i.
void embed(HPolytope& into, const HPolytope& p, std::size_t offset) {
    if (p.is_trivially_empty()) {
        into = HPolytope::empty_set(into.dim());
        return;
    }
    for (const auto& row : p.constraints()) {
        ScalarVector c(into.dim(), Scalar(0));
        std::copy(row.coeffs.begin(), row.coeffs.end(), c.begin() + static_cast<std::ptrdiff_t>(offset));
        into.add({std::move(c), row.bound, row.strict});
    }
}

ScalarVector unit(std::size_t dim, std::size_t i, int v = 1) {
    ScalarVector c(dim, Scalar(0));
    c[i] = v;
    return c;
}

}  // namespace

SymbolicState time_successor(const SymbolicState& s, const UnrolledRac& u, const Scalar& t_max, EliminationMode mode,
                             EliminationStats* stats) {
    const StateLayout layout(u);
    const std::size_t d = layout.dim();
    if (s.polytope.dim() != d) throw DimensionError("state polytope does not match the unrolled automaton");
    const UnrolledLocation& loc = u.locations.at(s.location);
    const Location& orig = u.model.locations[loc.original];
    if (is_empty(s.polytope)) return {s.location, HPolytope::empty_set(d)};

    // Coordinates that move during a delay get a second copy holding their
    // value before it; the rest (zero rates, paused stopwatches) are shared.
    // Layout: successor values in [0, d), earlier values of moving
    // coordinates in [d, d + moving), delay t last.
    std::vector<std::size_t> before(d, HPolytope::npos);
    std::size_t moving = 0;
    const auto mark = [&](std::size_t i) { before[i] = d + moving++; };
    for (std::size_t i = 0; i < layout.vars; ++i) {
        const IntervalSpec& rate = orig.flow[i];
        if (!(rate.lo && rate.hi && sgn(*rate.lo) == 0 && sgn(*rate.hi) == 0)) mark(i);
    }
    mark(layout.timer());
    for (std::size_t r = 0; r < layout.copies; ++r) {
        if (loc.active[r]) mark(layout.stopwatch(r));
    }
    const std::size_t n = d + moving + 1;
    const std::size_t t = n - 1;
    std::vector<std::size_t> map(d);
    for (std::size_t i = 0; i < d; ++i) map[i] = before[i] == HPolytope::npos ? i : before[i];
    HPolytope sys = s.polytope.reindexed(n, map);
    sys.add_le(unit(n, t, -1), Scalar(0));
    for (std::size_t i = 0; i < layout.vars; ++i) {
        sys.add_bounds(i, orig.invariant[i].lo, orig.invariant[i].hi);
        if (before[i] == HPolytope::npos) continue;
        const IntervalSpec& rate = orig.flow[i];
        if (rate.lo) {  // x' - x >= lo * t
            ScalarVector c(n, Scalar(0));
            c[i] = -1;
            c[before[i]] = 1;
            c[t] = *rate.lo;
            sys.add_le(std::move(c), Scalar(0));
        }
        if (rate.hi) {  // x' - x <= hi * t
            ScalarVector c(n, Scalar(0));
            c[i] = 1;
            c[before[i]] = -1;
            c[t] = -*rate.hi;
            sys.add_le(std::move(c), Scalar(0));
        }
    }
    const auto drift = [&](std::size_t k) {
        ScalarVector c(n, Scalar(0));
        c[k] = 1;
        c[before[k]] = -1;
        c[t] = -1;
        sys.add_eq(std::move(c), Scalar(0));
    };
    drift(layout.timer());
    for (std::size_t r = 0; r < layout.copies; ++r) {
        if (loc.active[r]) drift(layout.stopwatch(r));
    }
    sys.add_le(unit(n, layout.timer()), t_max);

    std::vector<std::size_t> gone(moving + 1);
    std::iota(gone.begin(), gone.end(), d);
    HPolytope out = project(sys, gone, mode, stats).polytope;
    return {s.location, remove_redundant(out)};
}

SymbolicState jump_successor(const SymbolicState& s, std::size_t j, const UnrolledRac& u, EliminationMode mode,
                             EliminationStats* stats) {
    const UnrolledJump& uj = u.jumps.at(j);
    if (uj.source != s.location) throw std::invalid_argument("jump does not leave the state's location");
    const StateLayout layout(u);
    const std::size_t d = layout.dim();
    const Jump& e = u.model.jumps[uj.original];

    HPolytope p = s.polytope;
    add_rectangle(p, e.guard);
    std::vector<std::size_t> reset_vars;
    for (std::size_t i = 0; i < layout.vars; ++i) {
        if (e.reset[i]) reset_vars.push_back(i);
    }
    if (!reset_vars.empty() && !is_empty(p)) {
        EliminationOptions opt;
        opt.mode = mode;
        EliminationResult r = eliminate_keep_dims(p, reset_vars, opt);
        if (stats) stats->merge(r.stats);
        p = std::move(r.polytope);
        for (std::size_t i : reset_vars) p.add_bounds(i, e.reset[i]->lo, e.reset[i]->hi);
    }
    add_rectangle(p, u.model.locations[e.target].invariant);
    if (is_empty(p)) return {uj.target, HPolytope::empty_set(d)};
    return {uj.target, p};
}

ReachTree build_reach_tree(const UnrolledRac& u, std::size_t root, const ReachOptions& options) {
    const StateLayout layout(u);
    const std::size_t d = layout.dim();
    const UnrolledLocation& rloc = u.locations.at(root);
    if (rloc.parent) throw std::invalid_argument("reach tree must start at a root of the unrolled automaton");
    const Location& orig = u.model.locations[rloc.original];
    if (!orig.init) throw ModelError("location " + orig.name + " has no initial set");

    ReachTree tree;
    HPolytope init(d);
    add_rectangle(init, *orig.init);
    add_rectangle(init, orig.invariant);
    init.add_bounds(layout.timer(), Scalar(0), Scalar(0));
    for (std::size_t r = 0; r < layout.copies; ++r) init.add_bounds(layout.stopwatch(r), Scalar(0), Scalar(0));
    if (is_empty(init)) throw ModelError("initial set of " + orig.name + " is empty");

    SymbolicState first = time_successor({root, init}, u, options.t_max, options.mode, &tree.stats);
    if (is_empty(first.polytope)) throw AnalysisError("initial set of " + orig.name + " lies beyond the time bound");
    tree.nodes.push_back({0, std::move(first), 0, std::nullopt, std::nullopt});

    std::deque<std::size_t> frontier{0};
    while (!frontier.empty()) {
        const std::size_t at = frontier.front();
        frontier.pop_front();
        if (tree.nodes[at].depth >= options.jmp) continue;
        const std::size_t loc = tree.nodes[at].state.location;
        for (std::size_t j : u.locations[loc].outgoing) {
            SymbolicState next = jump_successor(tree.nodes[at].state, j, u, options.mode, &tree.stats);
            if (is_empty(next.polytope)) continue;
            next = time_successor(next, u, options.t_max, options.mode, &tree.stats);
            if (is_empty(next.polytope)) continue;
            const std::size_t index = tree.nodes.size();
            tree.nodes.push_back({index, std::move(next), tree.nodes[at].depth + 1, at, u.jumps[j].original});
            tree.edges.push_back({at, u.jumps[j].original, index});
            frontier.push_back(index);
        }
        const bool childless =
            std::none_of(tree.edges.begin(), tree.edges.end(), [&](const ReachEdge& e) { return e.parent == at; });
        if (childless) {
            const LpResult top = lp_optimize(tree.nodes[at].state.polytope, unit(d, layout.timer()), Sense::maximize);
            if (top.status == LpStatus::optimal && top.optimum < options.t_max) {
                tree.warnings.push_back("node " + std::to_string(at) + " (" + u.location_name(loc) +
                                        ") blocks before the time bound");
            }
        }
    }
    return tree;
}

std::vector<GoalNode> goal_nodes(const ReachTree& t, const UnrolledRac& u, const GoalSpec& g) {
    const StateLayout layout(u);
    if (g.valuation.dim() != layout.vars) throw DimensionError("goal constraints do not match the model variables");
    HPolytope cylinder(layout.dim());
    embed(cylinder, g.valuation, 0);

    std::vector<GoalNode> out;
    for (const auto& node : t.nodes) {
        const UnrolledLocation& loc = u.locations[node.state.location];
        if (std::find(g.locations.begin(), g.locations.end(), loc.original) == g.locations.end()) continue;
        HPolytope hit = intersect(node.state.polytope, cylinder);
        if (is_empty(hit)) continue;
        out.push_back({node.index, remove_redundant(hit), loc.expired});
    }
    return out;
}

HPolytope project_and_lift(const HPolytope& p, const StateLayout& layout, const std::vector<std::size_t>& expired,
                           const Scalar& t_int, EliminationMode mode, EliminationStats* stats) {
    if (p.dim() != layout.dim()) throw DimensionError("state polytope does not match the layout");
    const std::size_t r = layout.copies;
    std::vector<std::size_t> state_dims(layout.vars + 1);
    std::iota(state_dims.begin(), state_dims.end(), 0);
    const HPolytope mu = project(p, state_dims, mode, stats).polytope;

    // coordinates: mu in [0, r), samples in [r, 2r)
    HPolytope sys(2 * r);
    embed(sys, mu, 0);
    for (std::size_t k = 0; k < r; ++k) {
        ScalarVector c(2 * r, Scalar(0));
        c[k] = 1;
        c[r + k] = -1;
        if (std::find(expired.begin(), expired.end(), k) != expired.end()) {
            sys.add_eq(std::move(c), Scalar(0));
        } else {
            sys.add_le(std::move(c), Scalar(0));
        }
        sys.add_bounds(r + k, Scalar(0), t_int);
    }
    std::vector<std::size_t> mus(r);
    std::iota(mus.begin(), mus.end(), 0);
    return remove_redundant(project(sys, mus, mode, stats).polytope);
}

ForwardRegion assemble_forward_region(const std::vector<ReachTree>& trees, const UnrolledRac& u, const GoalSpec& g,
                                      const Scalar& t_int, EliminationMode mode, EliminationStats* stats) {
    const StateLayout layout(u);
    ForwardRegion region;
    region.dim = layout.copies;
    region.lifted.assign(layout.copies, false);
    for (std::size_t ti = 0; ti < trees.size(); ++ti) {
        for (const auto& gn : goal_nodes(trees[ti], u, g)) {
            HPolytope lifted = project_and_lift(gn.polytope, layout, gn.expired, t_int, mode, stats);
            if (is_empty(lifted)) continue;
            for (std::size_t k = 0; k < layout.copies; ++k) {
                if (std::find(gn.expired.begin(), gn.expired.end(), k) == gn.expired.end()) region.lifted[k] = true;
            }
            region.members.push_back({ti, gn.node, std::move(lifted)});
        }
    }
    return region;
}

}  // namespace racreach
