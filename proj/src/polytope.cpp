#include "racreach/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace racreach {

// ---------------------------------------------------------------------------
// LinearConstraint

bool LinearConstraint::is_zero_row() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Scalar& c) { return sgn(c) == 0; });
}

void LinearConstraint::normalize() {
    auto it = std::find_if(coeffs.begin(), coeffs.end(), [](const Scalar& c) { return sgn(c) != 0; });
    if (it == coeffs.end()) return;
    if (*it == 1 || *it == -1) return;
    const Scalar scale = 1 / abs(*it);
    for (auto& c : coeffs) {
        if (sgn(c) != 0) c *= scale;
    }
    bound *= scale;
}

Scalar LinearConstraint::evaluate(std::span<const Scalar> x) const {
    Scalar sum = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (sgn(coeffs[i]) != 0) sum += coeffs[i] * x[i];
    }
    return sum;
}

bool LinearConstraint::satisfied_by(std::span<const Scalar> x) const {
    const Scalar lhs = evaluate(x);
    return strict ? lhs < bound : lhs <= bound;
}

bool row_less(const LinearConstraint& a, const LinearConstraint& b) {
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        const int c = cmp(a.coeffs[i], b.coeffs[i]);
        if (c != 0) return c < 0;
    }
    const int c = cmp(a.bound, b.bound);
    if (c != 0) return c < 0;
    return a.strict && !b.strict;
}

std::string to_string(const LinearConstraint& c) {
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
        if (sgn(c.coeffs[i]) == 0) continue;
        if (!first) out << " + ";
        out << c.coeffs[i].get_str() << "*x" << i;
        first = false;
    }
    if (first) out << "0";
    out << (c.strict ? " < " : " <= ") << c.bound.get_str();
    return out.str();
}

// ---------------------------------------------------------------------------
// HPolytope

HPolytope::HPolytope(std::size_t dim, std::vector<LinearConstraint> rows) : dim_(dim) {
    rows_.reserve(rows.size());
    for (auto& row : rows) add(std::move(row));
}

HPolytope HPolytope::empty_set(std::size_t dim) {
    HPolytope p(dim);
    p.add_le(ScalarVector(dim, Scalar(0)), Scalar(-1));
    return p;
}

HPolytope HPolytope::from_bounds(const std::vector<std::optional<Scalar>>& lo,
                                 const std::vector<std::optional<Scalar>>& hi) {
    if (lo.size() != hi.size()) throw DimensionError("bound vectors differ in length");
    HPolytope p(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) p.add_bounds(i, lo[i], hi[i]);
    return p;
}

bool HPolytope::has_strict_rows() const {
    return std::any_of(rows_.begin(), rows_.end(), [](const LinearConstraint& r) { return r.strict; });
}

void HPolytope::add(LinearConstraint row) {
    if (row.dim() != dim_) {
        throw DimensionError("constraint of dimension " + std::to_string(row.dim()) + " added to polytope of dimension " +
                             std::to_string(dim_));
    }
    if (trivially_empty_) return;
    for (auto& c : row.coeffs) c.canonicalize();
    row.bound.canonicalize();
    if (row.is_zero_row()) {
        const bool holds = row.strict ? sgn(row.bound) > 0 : sgn(row.bound) >= 0;
        if (holds) return;
        rows_.clear();
        rows_.emplace_back(ScalarVector(dim_, Scalar(0)), Scalar(-1), false);
        trivially_empty_ = true;
        return;
    }
    row.normalize();
    rows_.push_back(std::move(row));
}

void HPolytope::add_eq(const ScalarVector& coeffs, const Scalar& bound) {
    add_le(coeffs, bound);
    ScalarVector neg(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) neg[i] = -coeffs[i];
    add_le(std::move(neg), -bound);
}

void HPolytope::add_bounds(std::size_t i, const std::optional<Scalar>& lo, const std::optional<Scalar>& hi) {
    if (i >= dim_) throw DimensionError("bound on coordinate outside the polytope");
    if (hi) {
        ScalarVector c(dim_, Scalar(0));
        c[i] = 1;
        add_le(std::move(c), *hi);
    }
    if (lo) {
        ScalarVector c(dim_, Scalar(0));
        c[i] = -1;
        add_le(std::move(c), -*lo);
    }
}

void HPolytope::deduplicate() {
    std::sort(rows_.begin(), rows_.end(), row_less);
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
}

HPolytope HPolytope::reindexed(std::size_t new_dim, std::span<const std::size_t> map) const {
    if (map.size() != dim_) throw DimensionError("reindex map does not cover every coordinate");
    HPolytope out(new_dim);
    if (trivially_empty_) return empty_set(new_dim);
    for (const auto& row : rows_) {
        ScalarVector c(new_dim, Scalar(0));
        for (std::size_t i = 0; i < dim_; ++i) {
            if (sgn(row.coeffs[i]) == 0) continue;
            if (map[i] == npos || map[i] >= new_dim) {
                throw DimensionError("reindex drops coordinate " + std::to_string(i) + " which is still constrained");
            }
            c[map[i]] += row.coeffs[i];
        }
        out.add({std::move(c), row.bound, row.strict});
    }
    return out;
}

std::string to_string(const HPolytope& p) {
    std::ostringstream out;
    out << "{dim " << p.dim();
    for (const auto& row : p.constraints()) out << "; " << to_string(row);
    out << "}";
    return out.str();
}

// ---------------------------------------------------------------------------
// Queries

bool is_empty(const HPolytope& p) {
    if (p.is_trivially_empty()) return true;
    if (!p.has_strict_rows()) return closure_is_empty(p);

    // Maximize a uniform slack eps on the strict rows; nonempty iff eps > 0.
    const std::size_t n = p.dim();
    HPolytope lifted(n + 1);
    for (const auto& row : p.constraints()) {
        ScalarVector c(row.coeffs);
        c.emplace_back(row.strict ? 1 : 0);
        lifted.add_le(std::move(c), row.bound);
    }
    ScalarVector cap(n + 1, Scalar(0));
    cap[n] = 1;
    lifted.add_le(cap, Scalar(1));
    const LpResult r = lp_optimize(lifted, cap, Sense::maximize);
    return r.status == LpStatus::infeasible || sgn(r.optimum) <= 0;
}

HPolytope intersect(const HPolytope& p, const HPolytope& q) {
    if (p.dim() != q.dim()) {
        throw DimensionError("cannot intersect polytopes of dimension " + std::to_string(p.dim()) + " and " +
                             std::to_string(q.dim()));
    }
    HPolytope out = p;
    for (const auto& row : q.constraints()) out.add(row);
    return out;
}

namespace {

HPolytope without_row(const HPolytope& p, std::size_t skip) {
    HPolytope rest(p.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i != skip) rest.add(p[i]);
    }
    return rest;
}

bool implied_by(const LinearConstraint& row, const HPolytope& rest) {
    const LpResult r = lp_optimize(rest, row.coeffs, Sense::maximize);
    switch (r.status) {
        case LpStatus::infeasible: return true;
        case LpStatus::unbounded: return false;
        case LpStatus::optimal: break;
    }
    const int c = cmp(r.optimum, row.bound);
    if (c < 0) return true;
    if (c > 0) return false;
    return !row.strict;
}

/// Among rows with identical coefficients keep only the tightest bound.
std::vector<LinearConstraint> collapse_parallel(std::vector<LinearConstraint> rows) {
    std::sort(rows.begin(), rows.end(), row_less);
    std::vector<LinearConstraint> out;
    for (auto& row : rows) {
        if (!out.empty() && out.back().coeffs == row.coeffs) continue;  // sorted: first is tightest
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

bool is_redundant(const HPolytope& p, std::size_t i) {
    if (i >= p.size()) throw std::out_of_range("constraint index out of range");
    return implied_by(p[i], without_row(p, i));
}

HPolytope remove_redundant(const HPolytope& p) {
    if (p.is_trivially_empty() || is_empty(p)) return HPolytope::empty_set(p.dim());
    std::vector<LinearConstraint> rows = collapse_parallel(p.constraints());

    std::vector<bool> keep(rows.size(), true);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        HPolytope rest(p.dim());
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j != i && keep[j]) rest.add(rows[j]);
        }
        if (implied_by(rows[i], rest)) keep[i] = false;
    }
    HPolytope out(p.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (keep[i]) out.add(std::move(rows[i]));
    }
    return out;
}

bool closure_subset(const HPolytope& p, const HPolytope& q) {
    if (p.dim() != q.dim()) throw DimensionError("subset test across dimensions");
    if (closure_is_empty(p)) return true;
    for (const auto& row : q.constraints()) {
        const LpResult r = lp_optimize(p, row.coeffs, Sense::maximize);
        if (r.status == LpStatus::unbounded) return false;
        if (r.status == LpStatus::optimal && r.optimum > row.bound) return false;
    }
    return true;
}

bool closure_equal(const HPolytope& p, const HPolytope& q) {
    return closure_subset(p, q) && closure_subset(q, p);
}

Box bounding_box(const HPolytope& p) {
    if (is_empty(p)) throw EmptySetError("bounding box of an empty polytope");
    Box box;
    box.intervals.resize(p.dim());
    ScalarVector axis(p.dim(), Scalar(0));
    for (std::size_t i = 0; i < p.dim(); ++i) {
        axis[i] = 1;
        const LpResult lo = lp_optimize(p, axis, Sense::minimize);
        const LpResult hi = lp_optimize(p, axis, Sense::maximize);
        if (lo.status == LpStatus::optimal) box.intervals[i].lo = lo.optimum;
        if (hi.status == LpStatus::optimal) box.intervals[i].hi = hi.optimum;
        axis[i] = 0;
    }
    return box;
}

bool contains(const HPolytope& p, std::span<const Scalar> point) {
    if (point.size() != p.dim()) throw DimensionError("point dimension does not match polytope");
    return std::all_of(p.constraints().begin(), p.constraints().end(),
                       [&](const LinearConstraint& row) { return row.satisfied_by(point); });
}

bool contains_point(const HPolytope& p, std::span<const double> point) {
    if (point.size() != p.dim()) throw DimensionError("point dimension does not match polytope");
    for (const auto& row : p.constraints()) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
            if (sgn(row.coeffs[i]) != 0) lhs += row.coeffs[i].get_d() * point[i];
        }
        const double b = row.bound.get_d();
        if (row.strict ? !(lhs < b) : !(lhs <= b)) return false;
    }
    return true;
}

}  // namespace racreach
