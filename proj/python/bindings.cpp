#include "racreach/errors.hpp"
#include "racreach/integrate.hpp"
#include "racreach/model_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace racreach;

namespace {

DistributionSpec to_distribution(const py::dict& d) {
    const auto type = d["type"].cast<std::string>();
    DistributionSpec out;
    if (type == "exp") {
        out = Exponential{d["lambda"].cast<double>()};
    } else if (type == "folded_normal") {
        out = FoldedNormal{d["mu"].cast<double>(), d["sigma"].cast<double>()};
    } else if (type == "uniform") {
        out = Uniform{d["a"].cast<double>(), d["b"].cast<double>()};
    } else {
        throw std::invalid_argument("unknown distribution '" + type + "'");
    }
    check_distribution(out);
    return out;
}

py::dict from_distribution(const DistributionSpec& d) {
    py::dict out;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                out["type"] = "exp";
                out["lambda"] = x.lambda;
            } else if constexpr (std::is_same_v<T, FoldedNormal>) {
                out["type"] = "folded_normal";
                out["mu"] = x.mu;
                out["sigma"] = x.sigma;
            } else {
                out["type"] = "uniform";
                out["a"] = x.a;
                out["b"] = x.b;
            }
        },
        d);
    return out;
}

py::list dimensions(const std::vector<DimensionReport>& dims) {
    py::list out;
    for (const auto& d : dims) {
        py::dict e;
        e["name"] = d.name;
        e["distribution"] = from_distribution(d.distribution);
        e["unadapted"] = py::make_tuple(d.unadapted.lo, d.unadapted.hi);
        e["adapted"] = py::make_tuple(d.adapted.lo, d.adapted.hi);
        e["integrated"] = py::make_tuple(d.integrated.lo, d.integrated.hi);
        e["marginalized"] = d.marginalized;
        e["lifted"] = d.lifted;
        out.append(e);
    }
    return out;
}

Scalar time_bound(const ModelDocument& doc, const std::optional<std::string>& tmax) {
    if (tmax) return parse_scalar(*tmax);
    if (!doc.analysis.tmax) throw AnalysisError("no time bound in the model; pass tmax");
    return *doc.analysis.tmax;
}

std::size_t jump_bound(const ModelDocument& doc, const std::optional<std::size_t>& jumps) {
    if (jumps) return *jumps;
    if (!doc.analysis.jumps) throw AnalysisError("no jump bound in the model; pass jumps");
    return *doc.analysis.jumps;
}

EliminationMode mode_of(const std::string& fm) {
    if (fm == "fm") return EliminationMode::fm;
    if (fm == "fm+") return EliminationMode::fm_plus;
    throw std::invalid_argument("fm must be 'fm' or 'fm+'");
}

py::list validate_doc(const ModelDocument& doc) {
    py::list out;
    for (const auto& f : validate(doc.rac)) {
        out.append(py::make_tuple(f.severity == Finding::Severity::violation ? "violation" : "warning", f.message));
    }
    return out;
}

std::string tree_dump(const ModelDocument& doc, std::optional<std::string> tmax, std::optional<std::size_t> jumps,
                      const std::string& fm) {
    if (has_violations(validate(doc.rac))) throw ModelError("model has violations; see validate()");
    const std::size_t jmp = jump_bound(doc, jumps);
    const Scalar t = time_bound(doc, tmax);
    const UnrolledRac u = unroll(doc.rac, jmp);
    std::vector<ReachTree> trees;
    {
        py::gil_scoped_release release;
        for (std::size_t r : u.roots) trees.push_back(build_reach_tree(u, r, {t, jmp, mode_of(fm)}));
    }
    return dump_trees(trees, u, doc.goal);
}

py::dict analyze(const ModelDocument& doc, std::optional<std::string> tmax, std::optional<std::size_t> jumps,
                 std::optional<double> t_int, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
                 const std::string& fm, bool adapt_bounds, bool marginalize, std::size_t workers) {
    if (!doc.goal) throw ModelError("model has no goal");
    PipelineOptions o;
    o.t_max = time_bound(doc, tmax);
    o.jmp = jump_bound(doc, jumps);
    o.t_int = t_int.value_or(doc.analysis.tint.value_or(100.0));
    o.mode = mode_of(fm);
    o.adapt_bounds = adapt_bounds;
    o.marginalize = marginalize;
    o.vegas.samples = samples.value_or(doc.analysis.samples.value_or(1'000'000));
    o.vegas.seed = seed.value_or(doc.analysis.seed.value_or(0));
    o.vegas.workers = workers;
    PipelineReport rep;
    {
        py::gil_scoped_release release;
        rep = estimate_pipeline(doc.rac, *doc.goal, o);
    }
    py::dict out;
    out["p_max"] = rep.result.p_max;
    out["e_stat"] = rep.result.e_stat;
    out["e_inf"] = rep.result.e_inf;
    out["hit_fraction"] = rep.result.hit_fraction;
    out["nodes"] = rep.nodes;
    out["trees"] = rep.trees;
    out["goal_nodes"] = rep.goal_nodes;
    out["max_constraints"] = rep.stats.max_constraints;
    out["eliminations"] = rep.stats.eliminations;
    out["dimensions"] = dimensions(rep.dimensions);
    out["warnings"] = rep.warnings;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Maximal reachability probabilities of rectangular automata with random clocks";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);
    py::register_exception<DegenerateBoundsError>(m, "DegenerateBoundsError", PyExc_ValueError);

    py::class_<ModelDocument>(m, "Model")
        .def_static("from_file", [](const std::string& path) { return load_model(path); }, py::arg("path"))
        .def_static("from_json", [](const std::string& text) { return parse_model(text); }, py::arg("text"))
        .def_property_readonly("variables", [](const ModelDocument& d) { return d.rac.variables; })
        .def_property_readonly("clocks",
                               [](const ModelDocument& d) {
                                   std::vector<std::string> out;
                                   for (const auto& c : d.rac.clocks) out.push_back(c.name);
                                   return out;
                               })
        .def_property_readonly("locations",
                               [](const ModelDocument& d) {
                                   std::vector<std::string> out;
                                   for (const auto& l : d.rac.locations) out.push_back(l.name);
                                   return out;
                               })
        .def_property_readonly("has_goal", [](const ModelDocument& d) { return d.goal.has_value(); })
        .def("validate", &validate_doc, "List of (severity, message).")
        .def("unrolled_size", [](const ModelDocument& d, std::size_t jumps) { return unroll(d.rac, jumps).locations.size(); },
             py::arg("jumps"))
        .def("tree", &tree_dump, py::arg("tmax") = py::none(), py::arg("jumps") = py::none(), py::arg("fm") = "fm+",
             "Reach trees as a JSON string with exact rational constraints.")
        .def(
            "bounds",
            [](const ModelDocument& d, std::optional<std::size_t> jumps, std::optional<double> t_int, bool adapt) {
                const UnrolledRac u = unroll(d.rac, jump_bound(d, jumps));
                return dimensions(integration_bounds(u, t_int.value_or(d.analysis.tint.value_or(100.0)), adapt));
            },
            py::arg("jumps") = py::none(), py::arg("t_int") = py::none(), py::arg("adapt_bounds") = true)
        .def("analyze", &analyze, py::arg("tmax") = py::none(), py::arg("jumps") = py::none(),
             py::arg("t_int") = py::none(), py::arg("samples") = py::none(), py::arg("seed") = py::none(),
             py::arg("fm") = "fm+", py::arg("adapt_bounds") = true, py::arg("marginalize") = true,
             py::arg("workers") = 0);

    m.def(
        "tighten_bounds",
        [](const py::dict& d, double t_int, double tau) {
            const BoundPair b = tighten_bounds(to_distribution(d), t_int, tau);
            return py::make_tuple(b.lo, b.hi);
        },
        py::arg("distribution"), py::arg("t_int"), py::arg("tau") = default_tau);
    m.def(
        "interval_mass", [](const py::dict& d, double lo, double hi) { return interval_mass(to_distribution(d), lo, hi); },
        py::arg("distribution"), py::arg("lo"), py::arg("hi"));
    m.def(
        "truncation_error",
        [](const std::vector<py::dict>& ds, const std::vector<bool>& lifted, double t_int) {
            std::vector<DistributionSpec> specs;
            for (const auto& d : ds) specs.push_back(to_distribution(d));
            return truncation_error(specs, lifted, t_int);
        },
        py::arg("distributions"), py::arg("lifted"), py::arg("t_int"));
    m.attr("default_tau") = default_tau;
}
