#include "racreach/automaton.hpp"

#include "racreach/errors.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace racreach {

bool IntervalSpec::contains(const IntervalSpec& other) const {
    if (other.is_empty()) return true;
    if (lo && (!other.lo || *other.lo < *lo)) return false;
    if (hi && (!other.hi || *other.hi > *hi)) return false;
    return true;
}

IntervalSpec IntervalSpec::intersect(const IntervalSpec& other) const {
    IntervalSpec out = *this;
    if (other.lo && (!out.lo || *other.lo > *out.lo)) out.lo = other.lo;
    if (other.hi && (!out.hi || *other.hi < *out.hi)) out.hi = other.hi;
    return out;
}

std::string to_string(const IntervalSpec& i) {
    std::string out = i.lo ? "[" + to_string(*i.lo) : "(-inf";
    out += ", ";
    out += i.hi ? to_string(*i.hi) + "]" : "inf)";
    return out;
}

void add_rectangle(HPolytope& p, const Rectangle& r, std::size_t offset) {
    if (offset + r.size() > p.dim()) throw DimensionError("rectangle does not fit the ambient space");
    for (std::size_t i = 0; i < r.size(); ++i) p.add_bounds(offset + i, r[i].lo, r[i].hi);
}

std::size_t Rac::location_index(const std::string& name) const {
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i].name == name) return i;
    }
    throw ModelError("unknown location '" + name + "'");
}

std::string Rac::jump_label(std::size_t j) const {
    const Jump& e = jumps.at(j);
    std::string out = "jump " + std::to_string(j) + " (" + locations.at(e.source).name + " -> " +
                      locations.at(e.target).name;
    if (e.event) out += ", " + clocks.at(*e.event).name;
    return out + ")";
}

namespace {

bool rectangle_empty(const Rectangle& r) {
    return std::any_of(r.begin(), r.end(), [](const IntervalSpec& i) { return i.is_empty(); });
}

class Checker {
public:
    explicit Checker(const Rac& m) : m_(m) {}

    std::vector<Finding> run() {
        names();
        for (const auto& c : m_.clocks) {
            try {
                check_distribution(c.distribution);
            } catch (const std::invalid_argument& e) {
                violation("clock '" + c.name + "': " + e.what());
            }
        }
        if (m_.locations.empty()) violation("model has no locations");
        bool some_init = false;
        for (const auto& loc : m_.locations) {
            const bool shaped = shape(loc.invariant, "invariant of " + loc.name) && shape(loc.flow, "flow of " + loc.name);
            if (loc.init && shape(*loc.init, "initial set of " + loc.name) && shaped) {
                if (!rectangle_empty(*loc.init)) {
                    some_init = true;
                    for (std::size_t i = 0; i < m_.dim(); ++i) {
                        if (!loc.invariant[i].contains((*loc.init)[i])) {
                            violation("initial set of " + loc.name + " is not inside its invariant on " +
                                      m_.variables[i]);
                        }
                    }
                }
            }
            if (shaped && rectangle_empty(loc.flow)) violation("flow of " + loc.name + " is empty");
            if (shaped && rectangle_empty(loc.invariant)) warning("invariant of " + loc.name + " is empty");
        }
        if (!some_init) violation("no location has a nonempty initial set");
        for (std::size_t j = 0; j < m_.jumps.size(); ++j) jump(j);
        if (!has_violations(out_)) nonblocking();
        return std::move(out_);
    }

private:
    void violation(std::string msg) { out_.push_back({Finding::Severity::violation, std::move(msg)}); }
    void warning(std::string msg) { out_.push_back({Finding::Severity::warning, std::move(msg)}); }

    void names() {
        std::set<std::string> vars(m_.variables.begin(), m_.variables.end());
        if (vars.size() != m_.variables.size()) violation("duplicate variable name");
        std::set<std::string> clocks;
        for (const auto& c : m_.clocks) {
            if (!clocks.insert(c.name).second) violation("duplicate clock name '" + c.name + "'");
            if (vars.count(c.name) != 0) violation("'" + c.name + "' is both a variable and a clock");
        }
        std::set<std::string> locs;
        for (const auto& l : m_.locations) {
            if (!locs.insert(l.name).second) violation("duplicate location name '" + l.name + "'");
        }
    }

    bool shape(const Rectangle& r, const std::string& what) {
        if (r.size() != m_.dim()) {
            violation(what + " has " + std::to_string(r.size()) + " intervals for " + std::to_string(m_.dim()) +
                      " variables");
            return false;
        }
        return true;
    }

    void jump(std::size_t j) {
        const Jump& e = m_.jumps[j];
        if (e.source >= m_.locations.size() || e.target >= m_.locations.size()) {
            violation("jump " + std::to_string(j) + " refers to a missing location");
            return;
        }
        if (e.event && *e.event >= m_.clocks.size()) {
            violation("jump " + std::to_string(j) + " refers to a missing clock");
            return;
        }
        const std::string label = m_.jump_label(j);
        const Location& src = m_.locations[e.source];
        const Location& dst = m_.locations[e.target];
        if (!shape(e.guard, "guard of " + label)) return;
        if (e.reset.size() != m_.dim()) {
            violation("reset of " + label + " does not cover every variable");
            return;
        }
        if (src.invariant.size() != m_.dim() || dst.invariant.size() != m_.dim()) return;
        for (std::size_t i = 0; i < m_.dim(); ++i) {
            const std::string& x = m_.variables[i];
            if (e.guard[i].is_empty()) violation("guard of " + label + " is empty on " + x);
            // a stochastic guard is the whole space, so only Inv(source) bounds it
            if (!e.event && !src.invariant[i].contains(e.guard[i])) {
                violation("guard of " + label + " is not inside the source invariant on " + x);
            }
            if (!e.reset[i]) {
                if (!dst.invariant[i].contains(src.invariant[i].intersect(e.guard[i]))) {
                    violation("identity reset of " + label + " can leave the target invariant on " + x);
                }
            } else {
                if (e.reset[i]->is_empty()) violation("reset of " + label + " is empty on " + x);
                if (!dst.invariant[i].contains(*e.reset[i])) {
                    violation("reset of " + label + " is not inside the target invariant on " + x);
                }
            }
            if (e.event && !e.guard[i].is_universal()) {
                violation("stochastic jump guard not universal: " + label + " constrains " + x);
            }
        }
    }

    /// Syntactic sufficient check: from every corner of the invariant some
    /// rate lets time pass, or a nonstochastic jump is enabled there.
    void nonblocking() {
        const std::size_t d = m_.dim();
        if (d > 16) return;
        for (std::size_t l = 0; l < m_.locations.size(); ++l) {
            const Location& loc = m_.locations[l];
            if (rectangle_empty(loc.invariant)) continue;
            std::vector<const Jump*> escapes;
            for (const auto& e : m_.jumps) {
                if (e.source == l && !e.event) escapes.push_back(&e);
            }
            // candidate values per coordinate: its finite invariant ends, or
            // nullopt for a coordinate unbounded on both sides
            std::vector<std::vector<std::optional<Scalar>>> ends(d);
            for (std::size_t i = 0; i < d; ++i) {
                const IntervalSpec& inv = loc.invariant[i];
                if (inv.lo) ends[i].push_back(inv.lo);
                if (inv.hi && !(inv.lo && *inv.lo == *inv.hi)) ends[i].push_back(inv.hi);
                if (ends[i].empty()) ends[i].push_back(std::nullopt);
            }
            std::vector<std::size_t> pick(d, 0);
            for (bool more = true; more;) {
                std::vector<std::optional<Scalar>> corner(d);
                bool can_flow = true;
                for (std::size_t i = 0; i < d; ++i) {
                    corner[i] = ends[i][pick[i]];
                    if (!corner[i]) continue;
                    const IntervalSpec& inv = loc.invariant[i];
                    const IntervalSpec& rate = loc.flow[i];
                    if (inv.hi && *corner[i] == *inv.hi && rate.lo && sgn(*rate.lo) > 0) can_flow = false;
                    if (inv.lo && *corner[i] == *inv.lo && rate.hi && sgn(*rate.hi) < 0) can_flow = false;
                }
                more = false;
                for (std::size_t i = 0; i < d; ++i) {
                    if (++pick[i] < ends[i].size()) {
                        more = true;
                        break;
                    }
                    pick[i] = 0;
                }
                if (can_flow) continue;
                const bool escaped = std::any_of(escapes.begin(), escapes.end(), [&](const Jump* e) {
                    for (std::size_t i = 0; i < d; ++i) {
                        const IntervalSpec& g = e->guard[i];
                        if (corner[i] ? !g.contains(*corner[i]) : !g.is_universal()) return false;
                    }
                    return true;
                });
                if (!escaped) {
                    warning("location " + loc.name + " may block: no time step or nonstochastic jump at an invariant corner");
                    break;
                }
            }
        }
    }

    const Rac& m_;
    std::vector<Finding> out_;
};

}  // namespace

std::vector<Finding> validate(const Rac& m) { return Checker(m).run(); }

bool has_violations(const std::vector<Finding>& findings) {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Finding::Severity::violation; });
}

std::vector<std::vector<bool>> activity(const Rac& m) {
    std::vector<std::vector<bool>> bits(m.locations.size(), std::vector<bool>(m.clocks.size(), false));
    for (const auto& e : m.jumps) {
        if (e.event) bits.at(e.source).at(*e.event) = true;
    }
    return bits;
}

const DistributionSpec& UnrolledRac::distribution(std::size_t copy_dim) const {
    return model.clocks.at(clock_of(copy_dim)).distribution;
}

std::string UnrolledRac::copy_name(std::size_t copy_dim) const {
    return model.clocks.at(clock_of(copy_dim)).name + "_" + std::to_string(copy_dim % copies_per_clock());
}

std::string UnrolledRac::location_name(std::size_t u) const {
    const UnrolledLocation& loc = locations.at(u);
    std::string out;
    std::size_t cur = loc.path.empty() ? loc.original : model.jumps[loc.path.front()].source;
    out = model.locations[cur].name;
    for (std::size_t j : loc.path) out += "/" + model.locations[model.jumps[j].target].name;
    return out;
}

UnrolledRac unroll(const Rac& m, std::size_t jmp, std::size_t max_locations) {
    UnrolledRac u;
    u.model = m;
    u.jmp = jmp;
    const auto act = activity(m);
    const std::size_t nclocks = m.clocks.size();

    const auto active_bits = [&](std::size_t original, const std::vector<std::size_t>& copies) {
        std::vector<bool> bits(u.stochastic_dim(), false);
        for (std::size_t r = 0; r < nclocks; ++r) {
            if (act[original][r]) bits[u.copy_dim(r, copies[r])] = true;
        }
        return bits;
    };

    std::deque<std::size_t> queue;
    for (std::size_t l = 0; l < m.locations.size(); ++l) {
        const auto& init = m.locations[l].init;
        if (!init || rectangle_empty(*init)) continue;
        UnrolledLocation root;
        root.original = l;
        root.current_copy.assign(nclocks, 0);
        root.active = active_bits(l, root.current_copy);
        u.roots.push_back(u.locations.size());
        queue.push_back(u.locations.size());
        u.locations.push_back(std::move(root));
    }

    while (!queue.empty()) {
        const std::size_t at = queue.front();
        queue.pop_front();
        if (u.locations[at].depth >= jmp) continue;
        for (std::size_t j = 0; j < m.jumps.size(); ++j) {
            const Jump& e = m.jumps[j];
            if (e.source != u.locations[at].original) continue;
            if (u.locations.size() >= max_locations) {
                throw AnalysisError("unrolled automaton exceeds " + std::to_string(max_locations) + " locations");
            }
            const UnrolledLocation& parent = u.locations[at];
            UnrolledLocation child;
            child.original = e.target;
            child.depth = parent.depth + 1;
            child.parent = at;
            child.path = parent.path;
            child.path.push_back(j);
            child.current_copy = parent.current_copy;
            child.expired = parent.expired;
            UnrolledJump edge{at, u.locations.size(), j, std::nullopt};
            if (e.event) {
                const std::size_t dim = u.copy_dim(*e.event, parent.current_copy[*e.event]);
                edge.consumed = dim;
                child.expired.push_back(dim);
                child.current_copy[*e.event] += 1;
            }
            child.active = active_bits(child.original, child.current_copy);
            u.locations[at].outgoing.push_back(u.jumps.size());
            queue.push_back(edge.target);
            u.jumps.push_back(edge);
            u.locations.push_back(std::move(child));
        }
    }
    return u;
}

Rac flatten(const UnrolledRac& u) {
    const Rac& m = u.model;
    Rac out;
    out.variables = m.variables;
    std::string timer = "T";
    while (std::find(out.variables.begin(), out.variables.end(), timer) != out.variables.end()) timer = "_" + timer;
    out.variables.push_back(timer);
    for (std::size_t c = 0; c < u.stochastic_dim(); ++c) out.clocks.push_back({u.copy_name(c), u.distribution(c)});

    for (std::size_t i = 0; i < u.locations.size(); ++i) {
        const UnrolledLocation& ul = u.locations[i];
        const Location& orig = m.locations[ul.original];
        Location loc;
        loc.name = u.location_name(i);
        loc.invariant = orig.invariant;
        loc.invariant.push_back(IntervalSpec::all());
        loc.flow = orig.flow;
        loc.flow.push_back(IntervalSpec::point(1));
        if (!ul.parent && orig.init) {
            loc.init = *orig.init;
            loc.init->push_back(IntervalSpec::point(0));
        }
        out.locations.push_back(std::move(loc));
    }
    for (const auto& uj : u.jumps) {
        const Jump& e = m.jumps[uj.original];
        Jump j;
        j.source = uj.source;
        j.target = uj.target;
        j.guard = e.guard;
        j.guard.push_back(IntervalSpec::all());
        j.reset = e.reset;
        j.reset.push_back(std::nullopt);
        j.event = uj.consumed;
        out.jumps.push_back(std::move(j));
    }
    return out;
}

}  // namespace racreach
