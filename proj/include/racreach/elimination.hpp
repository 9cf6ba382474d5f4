#pragma once

// Existential quantifier elimination over linear constraint systems.
//
// A variable that occurs in an equation (a matched pair  a.x <= b,
// -a.x <= -b) is removed by substitution; otherwise Fourier-Motzkin pairs
// every lower bound on it with every upper bound. In FM_PLUS mode the
// system is reduced to an irredundant one after every single-variable step.

#include "racreach/polytope.hpp"

#include <functional>
#include <span>
#include <stdexcept>

namespace racreach {

enum class EliminationMode { fm, fm_plus };

enum class EliminationOrder {
    /// Variables in ascending index order.
    ascending,
    /// At each step: a variable with an equation if any, else the one whose
    /// lower-times-upper bound count is smallest. Ties by index.
    greedy,
};

struct EliminationStats {
    /// Largest constraint count over the systems produced by each step.
    std::size_t max_constraints = 0;
    std::size_t eliminations = 0;

    void merge(const EliminationStats& other) {
        max_constraints = std::max(max_constraints, other.max_constraints);
        eliminations += other.eliminations;
    }
};

class NoEquationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Called with the intermediate system after every step (full dimension,
/// eliminated columns zero).
using StepObserver = std::function<void(const HPolytope&)>;

struct EliminationOptions {
    EliminationMode mode = EliminationMode::fm_plus;
    EliminationOrder order = EliminationOrder::ascending;
    StepObserver on_step;
};

struct EliminationResult {
    HPolytope polytope;
    EliminationStats stats;
};

/// Removes `var` by substituting a solved equation. Result has dim - 1.
/// Throws NoEquationError if no equation on `var` exists.
HPolytope eliminate_gauss(const HPolytope& p, std::size_t var);

/// Fourier-Motzkin step. Result has dim - 1.
HPolytope eliminate_fm(const HPolytope& p, std::size_t var);

/// Projects out every index in `vars`; the remaining coordinates keep their
/// relative order. Result has dim - |vars|.
EliminationResult eliminate_all(const HPolytope& p, std::span<const std::size_t> vars,
                                const EliminationOptions& options = {});
EliminationResult eliminate_all(const HPolytope& p, std::span<const std::size_t> vars, EliminationMode mode);

/// Same projection, but the dimension is kept and the eliminated columns
/// are zero (the cylinder over the projection).
EliminationResult eliminate_keep_dims(const HPolytope& p, std::span<const std::size_t> vars,
                                      const EliminationOptions& options = {});

/// Drops the listed coordinates, which must have zero columns.
HPolytope drop_coordinates(const HPolytope& p, std::span<const std::size_t> vars);

}  // namespace racreach
