// Exact-rational dictionary simplex over free variables.
//
// The system A x <= b is read as slack rows  s_i = b_i - A_i x,  s_i >= 0.
// Free variables are pivoted into the basis first; their rows never take
// part in ratio tests afterwards. Phase 1 uses a single auxiliary variable
// (the textbook x0 construction), phase 2 maximizes the objective. Every
// choice of entering/leaving variable follows Bland's smallest-index rule.

#include "racreach/polytope.hpp"

#include <algorithm>
#include <cassert>

namespace racreach {

namespace {

class Dictionary {
public:
    Dictionary(const HPolytope& p) : n_(p.dim()), m_(p.size()) {
        rows_.resize(m_);
        basic_.resize(m_);
        free_row_.assign(m_, false);
        nonbasic_.resize(n_);
        free_col_.assign(n_, true);
        for (std::size_t j = 0; j < n_; ++j) nonbasic_[j] = j;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = p[i];
            basic_[i] = n_ + i;
            rows_[i].beta = row.bound;
            rows_[i].alpha.resize(n_);
            for (std::size_t j = 0; j < n_; ++j) rows_[i].alpha[j] = -row.coeffs[j];
        }
    }

    /// Pivots every free variable into the basis where possible.
    void absorb_free_variables() {
        for (std::size_t k = 0; k < nonbasic_.size(); ++k) {
            if (!is_free_var(nonbasic_[k])) continue;
            for (std::size_t r = 0; r < m_; ++r) {
                if (free_row_[r] || sgn(rows_[r].alpha[k]) == 0) continue;
                pivot(r, k);
                free_row_[r] = true;
                break;
            }
        }
        for (std::size_t k = 0; k < nonbasic_.size(); ++k) free_col_[k] = is_free_var(nonbasic_[k]);
    }

    /// Returns false when the closure is infeasible.
    bool make_feasible() {
        std::optional<std::size_t> worst;
        for (std::size_t r = 0; r < m_; ++r) {
            if (free_row_[r] || sgn(rows_[r].beta) >= 0) continue;
            if (!worst || rows_[r].beta < rows_[*worst].beta ||
                (rows_[r].beta == rows_[*worst].beta && basic_[r] < basic_[*worst])) {
                worst = r;
            }
        }
        if (!worst) return true;

        // Auxiliary column x0 with coefficient +1 in every constrained row.
        const std::size_t aux_var = n_ + m_;
        const std::size_t aux_col = nonbasic_.size();
        nonbasic_.push_back(aux_var);
        free_col_.push_back(false);
        for (std::size_t r = 0; r < m_; ++r) rows_[r].alpha.emplace_back(free_row_[r] ? 0 : 1);

        objective_.assign(nonbasic_.size(), Scalar(0));
        objective_[aux_col] = -1;
        objective_value_ = 0;
        pivot(*worst, aux_col);
        const bool bounded = run_simplex();
        assert(bounded);
        (void)bounded;
        if (sgn(objective_value_) < 0) return false;

        // Drive x0 out of the basis if it stayed there degenerate.
        for (std::size_t r = 0; r < m_; ++r) {
            if (basic_[r] != aux_var) continue;
            std::optional<std::size_t> col;
            for (std::size_t k = 0; k < nonbasic_.size(); ++k) {
                if (!free_col_[k] && sgn(rows_[r].alpha[k]) != 0 && (!col || nonbasic_[k] < nonbasic_[*col])) col = k;
            }
            if (col) {
                pivot(r, *col);
            } else {
                // Row reads x0 = 0 identically; it carries no constraint.
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
                basic_.erase(basic_.begin() + static_cast<std::ptrdiff_t>(r));
                free_row_.erase(free_row_.begin() + static_cast<std::vector<bool>::difference_type>(r));
                --m_;
            }
            break;
        }
        const auto it = std::find(nonbasic_.begin(), nonbasic_.end(), aux_var);
        const std::size_t k = static_cast<std::size_t>(it - nonbasic_.begin());
        nonbasic_.erase(it);
        free_col_.erase(free_col_.begin() + static_cast<std::vector<bool>::difference_type>(k));
        for (auto& row : rows_) row.alpha.erase(row.alpha.begin() + static_cast<std::ptrdiff_t>(k));
        return true;
    }

    /// Installs max c.x in terms of the current nonbasic variables.
    /// Returns false if a free nonbasic direction already makes it unbounded.
    bool set_objective(std::span<const Scalar> c) {
        objective_.assign(nonbasic_.size(), Scalar(0));
        objective_value_ = 0;
        for (std::size_t k = 0; k < nonbasic_.size(); ++k) {
            if (nonbasic_[k] < n_) objective_[k] += c[nonbasic_[k]];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            if (basic_[r] >= n_) continue;
            const Scalar& weight = c[basic_[r]];
            if (sgn(weight) == 0) continue;
            objective_value_ += weight * rows_[r].beta;
            for (std::size_t k = 0; k < nonbasic_.size(); ++k) objective_[k] += weight * rows_[r].alpha[k];
        }
        for (std::size_t k = 0; k < nonbasic_.size(); ++k) {
            if (free_col_[k] && sgn(objective_[k]) != 0) return false;
        }
        return true;
    }

    /// Bland's rule simplex. Returns false when unbounded.
    bool run_simplex() {
        for (;;) {
            std::optional<std::size_t> enter;
            for (std::size_t k = 0; k < nonbasic_.size(); ++k) {
                if (free_col_[k] || sgn(objective_[k]) <= 0) continue;
                if (!enter || nonbasic_[k] < nonbasic_[*enter]) enter = k;
            }
            if (!enter) return true;

            std::optional<std::size_t> leave;
            Scalar best_ratio;
            for (std::size_t r = 0; r < m_; ++r) {
                if (free_row_[r] || sgn(rows_[r].alpha[*enter]) >= 0) continue;
                Scalar ratio = rows_[r].beta / -rows_[r].alpha[*enter];
                if (!leave || ratio < best_ratio || (ratio == best_ratio && basic_[r] < basic_[*leave])) {
                    leave = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (!leave) return false;
            pivot(*leave, *enter);
        }
    }

    const Scalar& objective_value() const { return objective_value_; }

    ScalarVector point() const {
        ScalarVector x(n_, Scalar(0));
        for (std::size_t r = 0; r < m_; ++r) {
            if (basic_[r] < n_) x[basic_[r]] = rows_[r].beta;
        }
        return x;
    }

private:
    struct Row {
        Scalar beta;
        ScalarVector alpha;
    };

    bool is_free_var(std::size_t var) const { return var < n_; }

    void pivot(std::size_t r, std::size_t k) {
        Row& pr = rows_[r];
        const Scalar inv = 1 / pr.alpha[k];
        // Solve row r for the entering variable.
        Scalar neg_inv = -inv;
        pr.beta *= neg_inv;
        for (std::size_t j = 0; j < pr.alpha.size(); ++j) {
            if (j == k) continue;
            if (sgn(pr.alpha[j]) != 0) pr.alpha[j] *= neg_inv;
        }
        pr.alpha[k] = inv;

        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r) continue;
            Row& row = rows_[i];
            if (sgn(row.alpha[k]) == 0) continue;
            const Scalar factor = row.alpha[k];
            row.beta += factor * pr.beta;
            for (std::size_t j = 0; j < row.alpha.size(); ++j) {
                if (j == k) continue;
                if (sgn(pr.alpha[j]) != 0) row.alpha[j] += factor * pr.alpha[j];
            }
            row.alpha[k] = factor * inv;
        }
        if (!objective_.empty() && sgn(objective_[k]) != 0) {
            const Scalar factor = objective_[k];
            objective_value_ += factor * pr.beta;
            for (std::size_t j = 0; j < objective_.size(); ++j) {
                if (j == k) continue;
                if (sgn(pr.alpha[j]) != 0) objective_[j] += factor * pr.alpha[j];
            }
            objective_[k] = factor * inv;
        }
        std::swap(basic_[r], nonbasic_[k]);
    }

    std::size_t n_;
    std::size_t m_;
    std::vector<Row> rows_;
    std::vector<std::size_t> basic_;
    std::vector<std::size_t> nonbasic_;
    std::vector<bool> free_row_;
    std::vector<bool> free_col_;
    ScalarVector objective_;
    Scalar objective_value_;
};

}  // namespace

LpResult lp_optimize(const HPolytope& p, std::span<const Scalar> objective, Sense sense) {
    if (objective.size() != p.dim()) {
        throw DimensionError("objective has " + std::to_string(objective.size()) + " entries, polytope dimension is " +
                             std::to_string(p.dim()));
    }
    LpResult result;
    if (p.is_trivially_empty()) return result;

    ScalarVector c(objective.begin(), objective.end());
    if (sense == Sense::minimize) {
        for (auto& v : c) v = -v;
    }

    Dictionary dict(p);
    dict.absorb_free_variables();
    if (!dict.make_feasible()) return result;

    if (!dict.set_objective(c) || !dict.run_simplex()) {
        result.status = LpStatus::unbounded;
        result.witness = dict.point();
        return result;
    }
    result.status = LpStatus::optimal;
    result.optimum = sense == Sense::minimize ? Scalar(-dict.objective_value()) : dict.objective_value();
    result.witness = dict.point();
    return result;
}

bool closure_is_empty(const HPolytope& p) {
    if (p.is_trivially_empty()) return true;
    const ScalarVector zero(p.dim(), Scalar(0));
    return lp_optimize(p, zero, Sense::maximize).status == LpStatus::infeasible;
}

}  // namespace racreach
