#pragma once

// Constraint sets of the three charge/drive paths of the running example,
// stated over (x, T, mu_c0, mu_c1) so that project_and_lift has state
// dimensions to remove. Expected boxes are over the samples (c0, c1).

#include "racreach/reach.hpp"

#include <optional>
#include <string>
#include <vector>

namespace racreach::testing {

struct ExamplePath {
    std::string name;
    HPolytope state;
    std::vector<std::size_t> expired;
    /// nullopt upper end: lifted to t_int.
    std::vector<Interval> box;
};

inline const StateLayout example_layout{1, 2};

inline Scalar q(const char* text) { return parse_scalar(text); }

inline ScalarVector row(std::initializer_list<const char*> xs) {
    ScalarVector out;
    for (const char* x : xs) out.push_back(q(x));
    return out;
}

inline std::vector<ExamplePath> example_paths() {
    std::vector<ExamplePath> out;
    {
        // c0 in [2/3, 9/4], c1 in [0, 9/4], c0 + c1 <= 17/4; x carries the coupling
        HPolytope p(4);
        p.add_bounds(2, q("2/3"), q("9/4"));
        p.add_bounds(3, q("0"), q("9/4"));
        p.add_le(row({"-1", "0", "1", "1"}), q("0"));  // c0 + c1 <= x
        p.add_bounds(0, std::nullopt, q("17/4"));
        p.add_le(row({"0", "-1", "1", "1"}), q("0"));  // c0 + c1 <= T
        p.add_bounds(1, std::nullopt, q("10"));
        out.push_back({"path 1", p, {0, 1}, {{q("2/3"), q("9/4")}, {q("0"), q("9/4")}}});
    }
    {
        // c0 in [0, 2]; c1 never ran
        HPolytope p(4);
        p.add_bounds(2, q("0"), q("2"));
        p.add_bounds(3, q("0"), q("0"));
        p.add_le(row({"0", "-1", "1", "0"}), q("0"));  // c0 <= T
        p.add_bounds(1, std::nullopt, q("10"));
        p.add_bounds(0, q("0"), q("9"));
        out.push_back({"path 2", p, {0}, {{q("0"), q("2")}, {q("0"), std::nullopt}}});
    }
    {
        // c0 in [4/3, 290/3], c1 in [0, 2], c0 + 7/3 c1 <= 290/3 via T <= 100
        HPolytope p(4);
        p.add_bounds(2, q("4/3"), std::nullopt);
        p.add_bounds(3, q("0"), q("2"));
        p.add_le(row({"0", "-1", "1", "7/3"}), q("-10/3"));  // c0 + 7/3 c1 + 10/3 <= T
        p.add_bounds(1, std::nullopt, q("100"));
        p.add_bounds(0, q("1"), q("4"));
        out.push_back({"path 3", p, {0, 1}, {{q("4/3"), q("290/3")}, {q("0"), q("2")}}});
    }
    return out;
}

/// The stated region of each path over (c0, c1), for set comparison.
inline HPolytope example_region(std::size_t path, const Scalar& t_int) {
    HPolytope r(2);
    switch (path) {
        case 0:
            r.add_bounds(0, q("2/3"), q("9/4"));
            r.add_bounds(1, q("0"), q("9/4"));
            r.add_le(row({"1", "1"}), q("17/4"));
            break;
        case 1:
            r.add_bounds(0, q("0"), q("2"));
            r.add_bounds(1, q("0"), t_int);
            break;
        default:
            r.add_bounds(0, q("4/3"), q("290/3"));
            r.add_bounds(1, q("0"), q("2"));
            r.add_le(row({"1", "7/3"}), q("290/3"));
    }
    return r;
}

}  // namespace racreach::testing
