#include "racreach/reach.hpp"
#include "racreach/errors.hpp"
#include "support/fixtures.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

using namespace racreach;
using racreach::testing::example_layout;
using racreach::testing::example_paths;
using racreach::testing::example_region;
using racreach::testing::brute_force_vertices;
using racreach::testing::bundled;
using racreach::testing::bundled_models;

namespace {

Scalar S(long n, long d = 1) {
    Scalar v(n, d);
    v.canonicalize();
    return v;
}

ScalarVector v(std::initializer_list<long> xs) {
    ScalarVector out;
    for (long x : xs) out.emplace_back(x);
    return out;
}

/// One variable x with the given flow and invariant in A; A -> B on clock r
/// when `clock`, otherwise a guarded jump x >= 5 with reset x := 0.
Rac single(IntervalSpec flow, IntervalSpec inv, bool clock) {
    Rac m;
    m.variables = {"x"};
    Location a{"A", {inv}, {flow}, Rectangle{IntervalSpec::point(S(0))}};
    Location b{"B", {IntervalSpec::all()}, {IntervalSpec::point(S(0))}, std::nullopt};
    m.locations = {a, b};
    if (clock) {
        m.clocks = {{"r", Exponential{1.0}}};
        m.jumps = {{0, 1, {IntervalSpec::all()}, {std::nullopt}, 0}};
    } else {
        m.jumps = {{0, 1, {IntervalSpec{S(5), inv.hi}}, {IntervalSpec::point(S(0))}, std::nullopt}};
    }
    return m;
}

std::set<ScalarVector> vertex_set(const HPolytope& p) {
    const auto vs = brute_force_vertices(p);
    return {vs.begin(), vs.end()};
}

std::vector<ReachTree> trees_for(const ModelDocument& doc, const UnrolledRac& u, std::size_t jmp) {
    std::vector<ReachTree> out;
    for (std::size_t r : u.roots) out.push_back(build_reach_tree(u, r, {*doc.analysis.tmax, jmp, EliminationMode::fm_plus}));
    return out;
}

}  // namespace

TEST_CASE("time successor with a rectangular rate") {
    const UnrolledRac u = unroll(single({S(1), S(2)}, IntervalSpec::all(), false), 0);
    HPolytope start(2);
    start.add_bounds(0, S(0), S(0));
    start.add_bounds(1, S(0), S(0));
    const SymbolicState out = time_successor({0, start}, u, S(5));

    HPolytope expect(2);  // 0 <= T <= 5, T <= x <= 2T
    expect.add_bounds(1, S(0), S(5));
    expect.add_le(v({-1, 1}), S(0));
    expect.add_le(v({1, -2}), S(0));
    CHECK(closure_equal(out.polytope, expect));
    CHECK(vertex_set(out.polytope) == std::set<ScalarVector>{v({0, 0}), v({5, 5}), v({10, 5})});
    CHECK(closure_subset(start, out.polytope));
}

TEST_CASE("time successor stops at the invariant") {
    const UnrolledRac u = unroll(single({S(1), S(1)}, {S(0), S(10)}, false), 0);
    HPolytope start(2);
    start.add_bounds(0, S(0), S(1));
    start.add_bounds(1, S(0), S(0));
    const SymbolicState out = time_successor({0, start}, u, S(20));
    HPolytope expect(2);  // 0 <= T, T <= x <= T + 1, x <= 10
    expect.add_bounds(1, S(0), std::nullopt);
    expect.add_le(v({-1, 1}), S(0));
    expect.add_le(v({1, -1}), S(1));
    expect.add_bounds(0, std::nullopt, S(10));
    CHECK(closure_equal(out.polytope, expect));
    CHECK(vertex_set(out.polytope) == std::set<ScalarVector>{v({0, 0}), v({1, 0}), v({10, 9}), v({10, 10})});
}

TEST_CASE("an active stopwatch follows the timer") {
    const UnrolledRac u = unroll(single({S(1), S(1)}, IntervalSpec::all(), true), 0);
    const StateLayout layout(u);
    REQUIRE(layout.dim() == 3);
    HPolytope start(3);
    for (std::size_t i = 0; i < 3; ++i) start.add_bounds(i, S(0), S(0));
    const SymbolicState out = time_successor({0, start}, u, S(7));
    HPolytope expect(3);  // x = T = mu <= 7
    expect.add_eq(v({1, -1, 0}), S(0));
    expect.add_eq(v({0, 1, -1}), S(0));
    expect.add_bounds(1, S(0), S(7));
    CHECK(closure_equal(out.polytope, expect));
}

TEST_CASE("empty input stays empty") {
    const UnrolledRac u = unroll(single({S(1), S(1)}, IntervalSpec::all(), false), 0);
    CHECK(is_empty(time_successor({0, HPolytope::empty_set(2)}, u, S(1)).polytope));
}

TEST_CASE("jump successors") {
    const UnrolledRac u = unroll(single({S(1), S(1)}, {S(0), S(10)}, false), 1);
    REQUIRE(u.locations[0].outgoing.size() == 1);
    const std::size_t j = u.locations[0].outgoing[0];

    // x = T on [0, 10]; guard x >= 5, reset x := 0 keeps T in [5, 10]
    HPolytope on(2);
    on.add_eq(v({1, -1}), S(0));
    on.add_bounds(0, S(0), S(10));
    const SymbolicState after = jump_successor({0, on}, j, u);
    CHECK(after.location == u.jumps[j].target);
    HPolytope expect(2);
    expect.add_bounds(0, S(0), S(0));
    expect.add_bounds(1, S(5), S(10));
    CHECK(closure_equal(after.polytope, expect));

    HPolytope low(2);
    low.add_bounds(0, S(0), S(4));
    low.add_bounds(1, S(0), S(4));
    CHECK(is_empty(jump_successor({0, low}, j, u).polytope));

    CHECK_THROWS_AS(jump_successor({1, on}, j, u), std::invalid_argument);
}

TEST_CASE("identity reset keeps couplings") {
    const UnrolledRac u = unroll(single({S(1), S(1)}, IntervalSpec::all(), true), 1);
    HPolytope p(4);  // x = mu_0 in [0, 3], T = x, mu_1 = 0
    p.add_eq(v({1, 0, -1, 0}), S(0));
    p.add_eq(v({1, -1, 0, 0}), S(0));
    p.add_bounds(0, S(0), S(3));
    p.add_bounds(3, S(0), S(0));
    const SymbolicState after = jump_successor({0, p}, u.locations[0].outgoing[0], u);
    CHECK(closure_equal(after.polytope, p));
}

TEST_CASE("single-delay tree") {
    const ModelDocument doc = bundled("m1.json");
    const UnrolledRac u = unroll(doc.rac, 1);
    const ReachTree t = build_reach_tree(u, u.roots[0], {S(1), 1, EliminationMode::fm_plus});
    REQUIRE(t.nodes.size() == 2);
    REQUIRE(t.edges.size() == 1);
    CHECK(t.edges[0].parent == 0);
    CHECK(t.edges[0].child == 1);
    CHECK(t.warnings.empty());

    // (T, mu_0, mu_1)
    HPolytope root(3);
    root.add_eq(v({1, -1, 0}), S(0));
    root.add_bounds(0, S(0), S(1));
    root.add_bounds(2, S(0), S(0));
    CHECK(closure_equal(t.nodes[0].state.polytope, root));

    HPolytope leaf(3);  // mu_0 <= T <= 1, mu_0 >= 0
    leaf.add_le(v({-1, 1, 0}), S(0));
    leaf.add_bounds(0, std::nullopt, S(1));
    leaf.add_bounds(1, S(0), std::nullopt);
    leaf.add_bounds(2, S(0), S(0));
    CHECK(closure_equal(t.nodes[1].state.polytope, leaf));

    const ReachTree flat = build_reach_tree(u, u.roots[0], {S(1), 0, EliminationMode::fm_plus});
    CHECK(flat.nodes.size() == 1);
    CHECK(flat.edges.empty());
}

TEST_CASE("reach trees satisfy the tree invariants") {
    for (const auto& f : bundled_models()) {
        const ModelDocument doc = bundled(f);
        const std::size_t full = std::min<std::size_t>(*doc.analysis.jumps, 3);
        for (std::size_t jmp : {std::size_t(0), std::size_t(1), full}) {
            CAPTURE(f);
            CAPTURE(jmp);
            const UnrolledRac u = unroll(doc.rac, jmp);
            const StateLayout layout(u);
            for (const ReachTree& t : trees_for(doc, u, jmp)) {
                REQUIRE_FALSE(t.nodes.empty());
                std::map<std::size_t, std::size_t> incoming;
                std::set<std::pair<std::size_t, std::size_t>> parent_jump;
                for (const auto& e : t.edges) {
                    CHECK(e.parent < e.child);
                    ++incoming[e.child];
                    CHECK(parent_jump.insert({e.parent, e.jump}).second);
                    CHECK(t.nodes[e.child].parent == std::optional<std::size_t>(e.parent));
                    CHECK(t.nodes[e.child].depth == t.nodes[e.parent].depth + 1);
                    CHECK(t.nodes[e.child].via == std::optional<std::size_t>(e.jump));
                    // the stored child is the time closure of the jump successor
                    const std::size_t uj = *std::find_if(
                        u.locations[t.nodes[e.parent].state.location].outgoing.begin(),
                        u.locations[t.nodes[e.parent].state.location].outgoing.end(),
                        [&](std::size_t k) { return u.jumps[k].target == t.nodes[e.child].state.location; });
                    CHECK(u.jumps[uj].original == e.jump);
                    const SymbolicState js = jump_successor(t.nodes[e.parent].state, uj, u);
                    CHECK(closure_subset(js.polytope, t.nodes[e.child].state.polytope));
                }
                for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                    const ReachNode& n = t.nodes[i];
                    CHECK(n.index == i);
                    CHECK(n.depth <= jmp);
                    CHECK(incoming[i] == (i == 0 ? 0u : 1u));
                    CHECK_FALSE(is_empty(n.state.polytope));
                    const auto kids = std::count_if(t.edges.begin(), t.edges.end(),
                                                    [&](const ReachEdge& e) { return e.parent == i; });
                    if (n.depth == jmp) CHECK(kids == 0);
                    // T <= T_max, invariant, stopwatches nonnegative
                    HPolytope bound(layout.dim());
                    bound.add_bounds(layout.timer(), S(0), *doc.analysis.tmax);
                    add_rectangle(bound, doc.rac.locations[u.locations[n.state.location].original].invariant);
                    for (std::size_t k = 0; k < layout.copies; ++k) bound.add_bounds(layout.stopwatch(k), S(0), std::nullopt);
                    CHECK(closure_subset(n.state.polytope, bound));
                    for (std::size_t r = 0; r < n.state.polytope.size(); ++r) {
                        CHECK_FALSE(is_redundant(n.state.polytope, r));
                    }
                }
            }
        }
    }
}

TEST_CASE("race region") {
    const ModelDocument doc = bundled("m2.json");
    const UnrolledRac u = unroll(doc.rac, 1);
    const auto trees = trees_for(doc, u, 1);
    const Scalar t_int(100);
    const ForwardRegion region = assemble_forward_region(trees, u, *doc.goal, t_int);
    REQUIRE(region.members.size() == 1);
    CHECK(region.dim == 4);
    // samples: r1_0, r1_1, r2_0, r2_1
    HPolytope expect(4);
    expect.add_bounds(0, S(0), S(1));
    expect.add_le(v({1, 0, -1, 0}), S(0));
    expect.add_bounds(2, std::nullopt, t_int);
    expect.add_bounds(1, S(0), t_int);
    expect.add_bounds(3, S(0), t_int);
    CHECK(closure_equal(region.members[0].polytope, expect));
    CHECK(region.lifted == std::vector<bool>{false, true, true, true});
}

TEST_CASE("window region and goal intersection") {
    const ModelDocument doc = bundled("m3.json");
    const UnrolledRac u = unroll(doc.rac, 1);
    const auto trees = trees_for(doc, u, 1);
    const auto goals = goal_nodes(trees[0], u, *doc.goal);
    REQUIRE(goals.size() == 1);
    HPolytope x34(u.model.dim() + 1 + u.stochastic_dim());
    x34.add_bounds(0, S(3), S(4));
    CHECK(closure_subset(goals[0].polytope, x34));

    const ForwardRegion region = assemble_forward_region(trees, u, *doc.goal, S(100));
    REQUIRE(region.members.size() == 1);
    HPolytope expect(2);
    expect.add_bounds(0, S(3, 2), S(4));
    expect.add_bounds(1, S(0), S(100));
    CHECK(closure_equal(region.members[0].polytope, expect));
    // every vertex is a prophecy under which the window is hit
    for (const auto& vert : brute_force_vertices(region.members[0].polytope)) {
        CHECK(vert[0] >= S(3, 2));
        CHECK(vert[0] <= S(4));
    }
}

TEST_CASE("unreachable goals give an empty region") {
    const ModelDocument doc = bundled("m1.json");
    const UnrolledRac u = unroll(doc.rac, 0);
    const auto trees = trees_for(doc, u, 0);
    CHECK(goal_nodes(trees[0], u, *doc.goal).empty());
    CHECK(assemble_forward_region(trees, u, *doc.goal, S(100)).members.empty());
}

TEST_CASE("example paths project to their stated regions") {
    const Scalar t_int(100);
    const auto paths = example_paths();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        CAPTURE(paths[i].name);
        const HPolytope lifted = project_and_lift(paths[i].state, example_layout, paths[i].expired, t_int);
        CHECK(closure_equal(lifted, example_region(i, t_int)));
        const Box box = bounding_box(lifted);
        REQUIRE(box.dim() == 2);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(box.intervals[k].lo == paths[i].box[k].lo);
            CHECK(box.intervals[k].hi == paths[i].box[k].hi.value_or(t_int));
        }
    }
}

TEST_CASE("a larger t_int never shrinks a lifted region") {
    for (const auto& f : {"m1.json", "m2.json", "m3.json"}) {
        const ModelDocument doc = bundled(f);
        const UnrolledRac u = unroll(doc.rac, 1);
        const auto trees = trees_for(doc, u, 1);
        const ForwardRegion small = assemble_forward_region(trees, u, *doc.goal, S(5));
        const ForwardRegion large = assemble_forward_region(trees, u, *doc.goal, S(50));
        REQUIRE(small.members.size() == large.members.size());
        for (std::size_t i = 0; i < small.members.size(); ++i) {
            CHECK(closure_subset(small.members[i].polytope, large.members[i].polytope));
        }
    }
}
