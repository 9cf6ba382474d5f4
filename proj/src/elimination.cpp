#include "racreach/elimination.hpp"

#include <algorithm>
#include <optional>

namespace racreach {

namespace {

bool negated(const LinearConstraint& a, const LinearConstraint& b) {
    if (a.strict || b.strict || a.bound != -b.bound) return false;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i] != -b.coeffs[i]) return false;
    }
    return true;
}

/// Indices of a row pair forming an equation that mentions `var`.
std::optional<std::pair<std::size_t, std::size_t>> find_equation(const HPolytope& p, std::size_t var) {
    const auto& rows = p.constraints();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].strict || sgn(rows[i].coeffs[var]) <= 0) continue;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j != i && negated(rows[i], rows[j])) return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

HPolytope gauss_step(const HPolytope& p, std::size_t var, std::pair<std::size_t, std::size_t> eq) {
    const LinearConstraint& e = p[eq.first];
    const Scalar pivot = e.coeffs[var];
    HPolytope out(p.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i == eq.first || i == eq.second) continue;
        const LinearConstraint& row = p[i];
        if (sgn(row.coeffs[var]) == 0) {
            out.add(row);
            continue;
        }
        const Scalar f = row.coeffs[var] / pivot;
        LinearConstraint sub = row;
        for (std::size_t k = 0; k < sub.coeffs.size(); ++k) {
            if (sgn(e.coeffs[k]) != 0) sub.coeffs[k] -= f * e.coeffs[k];
        }
        sub.coeffs[var] = 0;
        sub.bound -= f * e.bound;
        out.add(std::move(sub));
        if (out.is_trivially_empty()) break;
    }
    out.deduplicate();
    return out;
}

HPolytope fm_step(const HPolytope& p, std::size_t var) {
    std::vector<const LinearConstraint*> lower, upper;
    HPolytope out(p.dim());
    for (const auto& row : p.constraints()) {
        const int s = sgn(row.coeffs[var]);
        if (s < 0) lower.push_back(&row);
        else if (s > 0) upper.push_back(&row);
        else out.add(row);
    }
    for (const LinearConstraint* l : lower) {
        const Scalar lw = -l->coeffs[var];
        for (const LinearConstraint* u : upper) {
            const Scalar& uw = u->coeffs[var];
            LinearConstraint combined;
            combined.coeffs.resize(p.dim());
            for (std::size_t k = 0; k < p.dim(); ++k) {
                combined.coeffs[k] = uw * l->coeffs[k] + lw * u->coeffs[k];
            }
            combined.coeffs[var] = 0;
            combined.bound = uw * l->bound + lw * u->bound;
            combined.strict = l->strict || u->strict;
            out.add(std::move(combined));
            if (out.is_trivially_empty()) return out;
        }
    }
    out.deduplicate();
    return out;
}

HPolytope single_step(const HPolytope& p, std::size_t var) {
    if (auto eq = find_equation(p, var)) return gauss_step(p, var, *eq);
    return fm_step(p, var);
}

std::size_t fm_cost(const HPolytope& p, std::size_t var) {
    std::size_t lo = 0, hi = 0;
    for (const auto& row : p.constraints()) {
        const int s = sgn(row.coeffs[var]);
        lo += s < 0;
        hi += s > 0;
    }
    return lo * hi;
}

std::size_t pick_next(const HPolytope& p, std::vector<std::size_t>& pending, EliminationOrder order) {
    std::size_t best = 0;
    if (order == EliminationOrder::greedy) {
        std::optional<std::size_t> best_cost;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const std::size_t cost = find_equation(p, pending[i]) ? 0 : fm_cost(p, pending[i]) + 1;
            if (!best_cost || cost < *best_cost) {
                best_cost = cost;
                best = i;
            }
        }
    }
    const std::size_t var = pending[best];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
    return var;
}

void check_vars(const HPolytope& p, std::span<const std::size_t> vars) {
    for (std::size_t v : vars) {
        if (v >= p.dim()) throw DimensionError("elimination variable " + std::to_string(v) + " out of range");
    }
}

}  // namespace

HPolytope drop_coordinates(const HPolytope& p, std::span<const std::size_t> vars) {
    std::vector<std::size_t> map(p.dim());
    std::size_t next = 0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        map[i] = std::find(vars.begin(), vars.end(), i) != vars.end() ? HPolytope::npos : next++;
    }
    return p.reindexed(next, map);
}

HPolytope eliminate_gauss(const HPolytope& p, std::size_t var) {
    check_vars(p, std::span(&var, 1));
    auto eq = find_equation(p, var);
    if (!eq) throw NoEquationError("no equation on coordinate " + std::to_string(var));
    return drop_coordinates(gauss_step(p, var, *eq), std::span(&var, 1));
}

HPolytope eliminate_fm(const HPolytope& p, std::size_t var) {
    check_vars(p, std::span(&var, 1));
    HPolytope stepped = fm_step(p, var);
    if (stepped.is_trivially_empty()) return HPolytope::empty_set(p.dim() - 1);
    return drop_coordinates(stepped, std::span(&var, 1));
}

EliminationResult eliminate_keep_dims(const HPolytope& p, std::span<const std::size_t> vars,
                                      const EliminationOptions& options) {
    check_vars(p, vars);
    std::vector<std::size_t> pending(vars.begin(), vars.end());
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());

    EliminationResult result{p, {}};
    while (!pending.empty()) {
        if (result.polytope.is_trivially_empty()) break;
        const std::size_t var = pick_next(result.polytope, pending, options.order);
        HPolytope next = single_step(result.polytope, var);
        if (options.mode == EliminationMode::fm_plus) next = remove_redundant(next);
        result.polytope = std::move(next);
        result.stats.eliminations += 1;
        result.stats.max_constraints = std::max(result.stats.max_constraints, result.polytope.size());
        if (options.on_step) options.on_step(result.polytope);
    }
    if (result.polytope.is_trivially_empty()) result.polytope = HPolytope::empty_set(p.dim());
    return result;
}

EliminationResult eliminate_all(const HPolytope& p, std::span<const std::size_t> vars,
                                const EliminationOptions& options) {
    EliminationResult r = eliminate_keep_dims(p, vars, options);
    std::vector<std::size_t> gone(vars.begin(), vars.end());
    std::sort(gone.begin(), gone.end());
    gone.erase(std::unique(gone.begin(), gone.end()), gone.end());
    const std::size_t new_dim = p.dim() - gone.size();
    r.polytope = r.polytope.is_trivially_empty() ? HPolytope::empty_set(new_dim) : drop_coordinates(r.polytope, gone);
    return r;
}

EliminationResult eliminate_all(const HPolytope& p, std::span<const std::size_t> vars, EliminationMode mode) {
    EliminationOptions options;
    options.mode = mode;
    return eliminate_all(p, vars, options);
}

}  // namespace racreach
