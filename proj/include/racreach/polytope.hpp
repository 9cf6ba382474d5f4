#pragma once

// Exact convex polyhedra in halfspace (H) and generator (V) form.
//
// An H-polytope is a conjunction of rows  a . x <= b  (or  a . x < b  when the
// row is strict) over a fixed ambient dimension. Rows are stored normalized:
// the first nonzero coefficient is +1 or -1. Rows with all-zero coefficients
// never survive construction; a contradictory one (0 <= -1) collapses the
// whole polytope into the canonical empty form.
//
// Linear programs are solved over the closure (strict rows read as <=).
// Emptiness and point membership honor strictness.

#include "racreach/scalar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace racreach {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptySetError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct LinearConstraint {
    ScalarVector coeffs;
    Scalar bound;
    bool strict = false;

    LinearConstraint() = default;
    LinearConstraint(ScalarVector c, Scalar b, bool is_strict = false)
        : coeffs(std::move(c)), bound(std::move(b)), strict(is_strict) {}

    std::size_t dim() const { return coeffs.size(); }
    bool is_zero_row() const;
    /// Scale by a positive factor so the first nonzero coefficient is +-1.
    void normalize();
    /// coeffs . x (exact).
    Scalar evaluate(std::span<const Scalar> x) const;
    bool satisfied_by(std::span<const Scalar> x) const;

    friend bool operator==(const LinearConstraint& a, const LinearConstraint& b) {
        return a.strict == b.strict && a.bound == b.bound && a.coeffs == b.coeffs;
    }
};

/// Strict weak order on rows: lexicographic on coefficients, then bound, then
/// strictness. Used for duplicate collapse.
bool row_less(const LinearConstraint& a, const LinearConstraint& b);

std::string to_string(const LinearConstraint& c);

class HPolytope {
public:
    HPolytope() = default;
    explicit HPolytope(std::size_t dim) : dim_(dim) {}
    HPolytope(std::size_t dim, std::vector<LinearConstraint> rows);

    static HPolytope universe(std::size_t dim) { return HPolytope(dim); }
    static HPolytope empty_set(std::size_t dim);

    /// Axis-aligned box; nullopt ends are unbounded.
    static HPolytope from_bounds(const std::vector<std::optional<Scalar>>& lo,
                                 const std::vector<std::optional<Scalar>>& hi);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return rows_.size(); }
    const std::vector<LinearConstraint>& constraints() const { return rows_; }
    const LinearConstraint& operator[](std::size_t i) const { return rows_[i]; }

    /// True when a contradictory row was added (syntactically empty).
    bool is_trivially_empty() const { return trivially_empty_; }
    bool has_strict_rows() const;

    /// Adds a row after normalization. Tautologies are dropped.
    void add(LinearConstraint row);
    void add_le(ScalarVector coeffs, Scalar bound) { add({std::move(coeffs), std::move(bound), false}); }
    void add_lt(ScalarVector coeffs, Scalar bound) { add({std::move(coeffs), std::move(bound), true}); }
    /// a . x == b as a pair of non-strict rows.
    void add_eq(const ScalarVector& coeffs, const Scalar& bound);
    /// lo <= x_i <= hi for the given finite ends.
    void add_bounds(std::size_t i, const std::optional<Scalar>& lo, const std::optional<Scalar>& hi);

    /// Sorts rows canonically and drops exact duplicates.
    void deduplicate();

    /// Moves coordinate i to index map[i] in a space of dimension new_dim.
    /// Coordinates not hit by the map are unconstrained in the result.
    /// A coordinate with map[i] == npos must have a zero column.
    HPolytope reindexed(std::size_t new_dim, std::span<const std::size_t> map) const;

    friend bool operator==(const HPolytope& a, const HPolytope& b) {
        return a.dim_ == b.dim_ && a.trivially_empty_ == b.trivially_empty_ && a.rows_ == b.rows_;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t dim_ = 0;
    std::vector<LinearConstraint> rows_;
    bool trivially_empty_ = false;
};

std::string to_string(const HPolytope& p);

struct VPolytope {
    std::size_t dim = 0;
    std::vector<ScalarVector> vertices;
    std::vector<ScalarVector> rays;

    bool empty() const { return vertices.empty(); }
};

/// One coordinate interval; nullopt ends are infinite.
struct Interval {
    std::optional<Scalar> lo;
    std::optional<Scalar> hi;
};

struct Box {
    std::vector<Interval> intervals;
    bool empty = false;

    std::size_t dim() const { return intervals.size(); }
};

enum class Sense { maximize, minimize };
enum class LpStatus { optimal, unbounded, infeasible };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Scalar optimum;
    ScalarVector witness;  // a point of the closure; empty when infeasible
};

/// Exact LP over the closure of p. Dictionary simplex with Bland's rule.
LpResult lp_optimize(const HPolytope& p, std::span<const Scalar> objective, Sense sense);

/// Closure feasibility only (strict rows relaxed).
bool closure_is_empty(const HPolytope& p);

/// Exact emptiness with strict rows honored.
bool is_empty(const HPolytope& p);

HPolytope intersect(const HPolytope& p, const HPolytope& q);

/// Whether row i of p is implied by the other rows (over the closure; a
/// strict row whose hyperplane is touched by the rest is kept).
bool is_redundant(const HPolytope& p, std::size_t i);

/// Equivalent polytope in which no row is implied by the others.
HPolytope remove_redundant(const HPolytope& p);

/// closure(p) is a subset of closure(q), decided per row of q by LP.
bool closure_subset(const HPolytope& p, const HPolytope& q);
bool closure_equal(const HPolytope& p, const HPolytope& q);

VPolytope to_vrep(const HPolytope& p);
HPolytope to_hrep(const VPolytope& v);

Box bounding_box(const HPolytope& p);

bool contains(const HPolytope& p, std::span<const Scalar> point);
/// Evaluated in double with zero tolerance.
bool contains_point(const HPolytope& p, std::span<const double> point);

}  // namespace racreach
