#include "racreach/cli.hpp"

#include "racreach/errors.hpp"
#include "racreach/integrate.hpp"
#include "racreach/model_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <variant>

namespace racreach {

namespace {

using json = nlohmann::json;

struct Flags {
    std::string command;
    std::string model;
    std::optional<std::string> tmax;
    std::optional<std::size_t> jumps;
    std::optional<double> tint;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::string fm = "fm+";
    bool no_adapt = false;
    std::optional<std::string> json_out;
};

/// Settings after merging the flags over the document's analysis section.
struct Settings {
    std::optional<Scalar> tmax;
    std::optional<std::size_t> jumps;
    double tint = 100.0;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    EliminationMode mode = EliminationMode::fm_plus;
    bool adapt = true;

    Scalar need_tmax() const {
        if (!tmax) throw AnalysisError("no time bound: set analysis.tmax in the model or pass --tmax");
        return *tmax;
    }
    std::size_t need_jumps() const {
        if (!jumps) throw AnalysisError("no jump bound: set analysis.jumps in the model or pass --jumps");
        return *jumps;
    }
};

Settings merge(const Flags& f, const AnalysisSettings& a) {
    Settings s;
    s.tmax = a.tmax;
    if (f.tmax) {
        try {
            s.tmax = parse_scalar(*f.tmax);
        } catch (const std::invalid_argument&) {
            throw AnalysisError("--tmax: not a number: " + *f.tmax);
        }
    }
    s.jumps = f.jumps ? f.jumps : a.jumps;
    s.tint = f.tint.value_or(a.tint.value_or(100.0));
    s.samples = f.samples.value_or(a.samples.value_or(1'000'000));
    s.seed = f.seed.value_or(a.seed.value_or(0));
    s.mode = f.fm == "fm" ? EliminationMode::fm : EliminationMode::fm_plus;
    s.adapt = !f.no_adapt;
    if (s.tmax && Scalar(s.tint) < *s.tmax) throw AnalysisError("t_int must be at least T_max");
    return s;
}

std::string num(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

std::string num(const Scalar& v) { return num(to_double(v)); }

std::string interval(const BoundPair& b) { return "[" + num(b.lo) + ", " + num(b.hi) + "]"; }

json pair_json(const BoundPair& b) { return json::array({b.lo, b.hi}); }

json distribution_json(const DistributionSpec& d) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FoldedNormal>) return {{"type", "folded_normal"}, {"mu", x.mu}, {"sigma", x.sigma}};
            if constexpr (std::is_same_v<T, Exponential>) return {{"type", "exp"}, {"lambda", x.lambda}};
            if constexpr (std::is_same_v<T, Uniform>) return {{"type", "uniform"}, {"a", x.a}, {"b", x.b}};
        },
        d);
}

json dimensions_json(const std::vector<DimensionReport>& dims) {
    json out = json::array();
    for (const auto& d : dims) {
        out.push_back({{"name", d.name},
                       {"distribution", distribution_json(d.distribution)},
                       {"unadapted", pair_json(d.unadapted)},
                       {"adapted", pair_json(d.adapted)},
                       {"integrated", pair_json(d.integrated)},
                       {"marginalized", d.marginalized},
                       {"lifted", d.lifted}});
    }
    return out;
}

void write_json(const Flags& f, const json& doc) {
    if (!f.json_out) return;
    std::ofstream file(*f.json_out);
    if (!file) throw AnalysisError(*f.json_out + ": cannot write");
    file << doc.dump(2) << "\n";
}

json settings_json(const Settings& s) {
    json j = {{"t_int", s.tint},
              {"samples", s.samples},
              {"seed", s.seed},
              {"fm", s.mode == EliminationMode::fm ? "fm" : "fm+"},
              {"adapt_bounds", s.adapt}};
    j["tmax"] = s.tmax ? json(to_string(*s.tmax)) : json(nullptr);
    j["jumps"] = s.jumps ? json(*s.jumps) : json(nullptr);
    return j;
}

void row(std::ostream& out, const std::string& key, const std::string& value) {
    out << std::left << std::setw(16) << key << value << "\n";
}

int analyze(const Flags& f, const ModelDocument& doc, const Settings& s, std::ostream& out, std::ostream& err) {
    if (!doc.goal) throw ModelError(f.model + ": no goal section");
    PipelineOptions o;
    o.t_max = s.need_tmax();
    o.jmp = s.need_jumps();
    o.t_int = s.tint;
    o.mode = s.mode;
    o.adapt_bounds = s.adapt;
    o.vegas.samples = s.samples;
    o.vegas.seed = s.seed;
    const PipelineReport rep = estimate_pipeline(doc.rac, *doc.goal, o);
    const IntegrationResult& r = rep.result;

    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    row(out, "model", f.model);
    row(out, "T_max", num(o.t_max));
    row(out, "jumps", std::to_string(o.jmp));
    row(out, "t_int", num(o.t_int));
    row(out, "samples", std::to_string(o.vegas.samples));
    row(out, "seed", std::to_string(o.vegas.seed));
    row(out, "p_max", num(r.p_max));
    row(out, "e_stat", num(r.e_stat));
    row(out, "e_inf", num(r.e_inf));
    row(out, "nodes", std::to_string(rep.nodes) + " in " + std::to_string(rep.trees) + " tree(s)");
    std::string goals;
    for (const auto& [t, n] : rep.goal_nodes) goals += (goals.empty() ? "" : " ") + std::to_string(t) + ":" + std::to_string(n);
    row(out, "goal nodes", goals.empty() ? "none" : goals);
    row(out, "max N", std::to_string(rep.stats.max_constraints));
    row(out, "eliminations", std::to_string(rep.stats.eliminations));
    row(out, "time unroll", num(rep.seconds.unroll) + " s");
    row(out, "time reach", num(rep.seconds.reach) + " s");
    row(out, "time project", num(rep.seconds.project) + " s");
    row(out, "time integrate", num(rep.seconds.integrate) + " s");

    json iters = json::array();
    for (const auto& it : r.iterations) {
        iters.push_back({{"value", it.value}, {"sigma", it.sigma}, {"samples", it.samples}, {"hits", it.hits}});
    }
    json goal_nodes = json::array();
    for (const auto& [t, n] : rep.goal_nodes) goal_nodes.push_back({{"tree", t}, {"node", n}});
    write_json(f, {{"command", "analyze"},
                   {"model", f.model},
                   {"settings", settings_json(s)},
                   {"p_max", r.p_max},
                   {"e_stat", r.e_stat},
                   {"e_inf", r.e_inf},
                   {"hit_fraction", r.hit_fraction},
                   {"iterations", iters},
                   {"unrolled_locations", rep.unrolled_locations},
                   {"nodes", rep.nodes},
                   {"trees", rep.trees},
                   {"goal_nodes", goal_nodes},
                   {"elimination", {{"max_constraints", rep.stats.max_constraints}, {"eliminations", rep.stats.eliminations}}},
                   {"dimensions", dimensions_json(rep.dimensions)},
                   {"warnings", rep.warnings},
                   {"seconds",
                    {{"unroll", rep.seconds.unroll},
                     {"reach", rep.seconds.reach},
                     {"project", rep.seconds.project},
                     {"integrate", rep.seconds.integrate}}}});
    return exit_ok;
}

int bounds(const Flags& f, const ModelDocument& doc, const Settings& s, std::ostream& out) {
    const std::size_t jmp = s.need_jumps();
    const UnrolledRac u = unroll(doc.rac, jmp);
    const auto dims = integration_bounds(u, s.tint, s.adapt);
    out << std::left << std::setw(10) << "copy" << std::setw(24) << "distribution" << std::setw(20) << "unadapted"
        << "adapted\n";
    for (const auto& d : dims) {
        out << std::left << std::setw(10) << d.name << std::setw(24) << describe(d.distribution) << std::setw(20)
            << interval(d.unadapted) << interval(d.adapted) << "\n";
    }
    write_json(f, {{"command", "bounds"}, {"model", f.model}, {"settings", settings_json(s)}, {"dimensions", dimensions_json(dims)}});
    return exit_ok;
}

int tree(const Flags& f, const ModelDocument& doc, const Settings& s, std::ostream& out, std::ostream& err) {
    const std::size_t jmp = s.need_jumps();
    const Scalar tmax = s.need_tmax();
    const auto findings = validate(doc.rac);
    for (const auto& x : findings) {
        if (x.severity == Finding::Severity::violation) throw ModelError("invalid model: " + x.message);
    }
    const UnrolledRac u = unroll(doc.rac, jmp);
    std::vector<ReachTree> trees;
    for (std::size_t r : u.roots) trees.push_back(build_reach_tree(u, r, {tmax, jmp, s.mode}));
    for (const auto& t : trees) {
        for (const auto& w : t.warnings) err << "warning: " << w << "\n";
    }
    const std::string dump = dump_trees(trees, u, doc.goal);
    if (f.json_out) {
        std::ofstream file(*f.json_out);
        if (!file) throw AnalysisError(*f.json_out + ": cannot write");
        file << dump;
        std::size_t nodes = 0, edges = 0;
        for (const auto& t : trees) {
            nodes += t.nodes.size();
            edges += t.edges.size();
        }
        out << trees.size() << " tree(s), " << nodes << " node(s), " << edges << " edge(s) written to " << *f.json_out << "\n";
    } else {
        out << dump;
    }
    return exit_ok;
}

int validate_cmd(const Flags& f, const ModelDocument& doc, std::ostream& out) {
    const auto findings = validate(doc.rac);
    json list = json::array();
    for (const auto& x : findings) {
        const char* sev = x.severity == Finding::Severity::violation ? "violation" : "warning";
        out << sev << ": " << x.message << "\n";
        list.push_back({{"severity", sev}, {"message", x.message}});
    }
    const bool bad = has_violations(findings);
    if (findings.empty()) out << "ok\n";
    write_json(f, {{"command", "validate"}, {"model", f.model}, {"valid", !bad}, {"findings", list}});
    return bad ? exit_model_error : exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximal reachability probabilities of rectangular automata with random clocks"};
    app.name("racreach");
    Flags f;
    app.add_option("command", f.command, "analyze | bounds | tree | validate")
        ->required()
        ->check(CLI::IsMember({"analyze", "bounds", "tree", "validate"}));
    app.add_option("model", f.model, "model JSON file")->required();
    app.add_option("--tmax", f.tmax, "time bound T_max (decimal or p/q)");
    app.add_option("--jumps", f.jumps, "jump bound per clock");
    app.add_option("--tint", f.tint, "integration bound t_int");
    app.add_option("--samples", f.samples, "Monte Carlo samples")->check(CLI::Range(std::size_t(1000), std::size_t(1) << 40));
    app.add_option("--seed", f.seed, "random seed");
    app.add_option("--fm", f.fm, "elimination mode")->check(CLI::IsMember({"fm", "fm+"}));
    app.add_flag("--no-adapt-bounds", f.no_adapt, "integrate over [0, t_int] in every dimension");
    app.add_option("--json", f.json_out, "write a JSON report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_analysis_error;
    }

    try {
        const ModelDocument doc = load_model(f.model);
        if (f.command == "validate") return validate_cmd(f, doc, out);
        const Settings s = merge(f, doc.analysis);
        if (f.command == "bounds") return bounds(f, doc, s, out);
        if (f.command == "tree") return tree(f, doc, s, out, err);
        return analyze(f, doc, s, out, err);
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return exit_model_error;
    } catch (const std::exception& e) {
        err << "analysis error: " << e.what() << "\n";
        return exit_analysis_error;
    }
}

}  // namespace racreach
