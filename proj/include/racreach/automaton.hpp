#pragma once

// Rectangular automata with random clocks, their validation, and the
// jump-bounded unrolling into a loop-free tree with fresh clock copies.

#include "racreach/polytope.hpp"
#include "racreach/stochastics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace racreach {

/// Closed interval with optional (infinite) ends.
struct IntervalSpec {
    std::optional<Scalar> lo;
    std::optional<Scalar> hi;

    static IntervalSpec all() { return {}; }
    static IntervalSpec point(const Scalar& v) { return {v, v}; }

    bool is_empty() const { return lo && hi && *lo > *hi; }
    bool is_universal() const { return !lo && !hi; }
    bool contains(const Scalar& v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }
    bool contains(const IntervalSpec& other) const;
    IntervalSpec intersect(const IntervalSpec& other) const;

    friend bool operator==(const IntervalSpec&, const IntervalSpec&) = default;
};

std::string to_string(const IntervalSpec& i);

/// One interval per variable.
using Rectangle = std::vector<IntervalSpec>;

/// Rows for x_{offset+i} in r[i] inside an ambient space of dimension `dim`.
void add_rectangle(HPolytope& p, const Rectangle& r, std::size_t offset = 0);

struct Location {
    std::string name;
    Rectangle invariant;
    Rectangle flow;
    /// Absent for locations that are not initial.
    std::optional<Rectangle> init;
};

/// nullopt is the identity reset.
using Reset = std::optional<IntervalSpec>;

struct Jump {
    std::size_t source = 0;
    std::size_t target = 0;
    Rectangle guard;
    std::vector<Reset> reset;
    /// Clock index for stochastic jumps.
    std::optional<std::size_t> event;
};

struct Clock {
    std::string name;
    DistributionSpec distribution;
};

struct Rac {
    std::vector<std::string> variables;
    std::vector<Clock> clocks;
    std::vector<Location> locations;
    std::vector<Jump> jumps;

    std::size_t dim() const { return variables.size(); }
    /// Throws ModelError for unknown names.
    std::size_t location_index(const std::string& name) const;
    std::string jump_label(std::size_t j) const;
};

struct Finding {
    enum class Severity { violation, warning };
    Severity severity = Severity::violation;
    std::string message;
};

/// Every violated syntax requirement plus nonblocking warnings. An empty
/// list, or warnings only, means the model is usable.
std::vector<Finding> validate(const Rac& m);
bool has_violations(const std::vector<Finding>& findings);

/// activity(m)[l][r] is true iff a jump labelled r leaves location l.
std::vector<std::vector<bool>> activity(const Rac& m);

struct UnrolledLocation {
    std::size_t original = 0;
    std::size_t depth = 0;
    /// Root locations have no parent.
    std::optional<std::size_t> parent;
    /// Original jump ids from the root.
    std::vector<std::size_t> path;
    /// Per original clock, the copy currently in use.
    std::vector<std::size_t> current_copy;
    /// Stopwatch dimensions whose jump was taken on the way here.
    std::vector<std::size_t> expired;
    /// Stopwatch rate (0 or 1) per stochastic dimension. Locations at the
    /// depth cap keep the rates of their original location.
    std::vector<bool> active;
    /// Unrolled jump ids leaving this location.
    std::vector<std::size_t> outgoing;
};

struct UnrolledJump {
    std::size_t source = 0;
    std::size_t target = 0;
    std::size_t original = 0;
    /// Stochastic dimension consumed by this jump.
    std::optional<std::size_t> consumed;
};

struct UnrolledRac {
    Rac model;
    std::size_t jmp = 0;
    std::vector<UnrolledLocation> locations;
    std::vector<UnrolledJump> jumps;
    /// One root per original location with an initial set.
    std::vector<std::size_t> roots;

    std::size_t copies_per_clock() const { return jmp + 1; }
    std::size_t stochastic_dim() const { return model.clocks.size() * copies_per_clock(); }
    /// Index among the stochastic dimensions; clocks are clock-major.
    std::size_t copy_dim(std::size_t clock, std::size_t copy) const { return clock * copies_per_clock() + copy; }
    std::size_t clock_of(std::size_t copy_dim) const { return copy_dim / copies_per_clock(); }
    const DistributionSpec& distribution(std::size_t copy_dim) const;
    std::string copy_name(std::size_t copy_dim) const;
    /// Original location names along the path, joined by '/'.
    std::string location_name(std::size_t u) const;
};

/// Throws AnalysisError when the tree would exceed `max_locations`.
UnrolledRac unroll(const Rac& m, std::size_t jmp, std::size_t max_locations = 1'000'000);

/// The unrolled automaton as a plain model: variables gain the global timer
/// T, clock copies become clocks, locations are the tree nodes.
Rac flatten(const UnrolledRac& u);

}  // namespace racreach
