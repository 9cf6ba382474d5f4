#include "racreach/model_io.hpp"

#include "racreach/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace racreach {

using json = nlohmann::json;

namespace {

// Float literals are kept as their source text behind this marker so that
// "4.25" becomes exactly 17/4 and cannot pass for a string field.
constexpr char raw_number_mark = '\x01';

class ExactSax : public nlohmann::json_sax<json> {
public:
    json root;
    std::string error;

    bool null() override { return put(nullptr); }
    bool boolean(bool v) override { return put(v); }
    bool number_integer(number_integer_t v) override { return put(v); }
    bool number_unsigned(number_unsigned_t v) override { return put(v); }
    bool number_float(number_float_t, const string_t& s) override { return put(std::string(1, raw_number_mark) + s); }
    bool string(string_t& v) override { return put(v); }
    bool binary(binary_t&) override { return put(nullptr); }
    bool start_object(std::size_t) override {
        json* node = insert(json::object());
        if (!node) return false;
        stack_.push_back(node);
        return true;
    }
    bool key(string_t& k) override {
        if (stack_.back()->contains(k)) {
            error = "duplicate key '" + k + "'";
            return false;
        }
        key_ = k;
        return true;
    }
    bool end_object() override {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t) override {
        json* node = insert(json::array());
        if (!node) return false;
        stack_.push_back(node);
        return true;
    }
    bool end_array() override {
        stack_.pop_back();
        return true;
    }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override {
        error = ex.what();
        const auto at = error.find("parse error");
        if (at != std::string::npos) error = error.substr(at);
        return false;
    }

private:
    json* insert(json v) {
        if (stack_.empty()) {
            root = std::move(v);
            return &root;
        }
        json& top = *stack_.back();
        if (top.is_array()) {
            top.push_back(std::move(v));
            return &top.back();
        }
        top[key_] = std::move(v);
        return &top[key_];
    }
    template <class V>
    bool put(V&& v) {
        return insert(json(std::forward<V>(v))) != nullptr;
    }

    std::vector<json*> stack_;
    std::string key_;
};

json parse_exact(std::string_view text, const std::string& source) {
    ExactSax sax;
    const bool ok = json::sax_parse(text.begin(), text.end(), &sax);
    if (!ok) {
        std::string msg = sax.error.empty() ? "invalid JSON" : sax.error;
        throw ModelError(source + ": " + msg);
    }
    return std::move(sax.root);
}

bool is_raw_number(const json& j) {
    return j.is_string() && !j.get_ref<const std::string&>().empty() && j.get_ref<const std::string&>()[0] == raw_number_mark;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw ModelError(source_ + ": " + (path.empty() ? "" : path + ": ") + msg);
    }

    void expect_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (const char* a : allowed) known |= k == a;
            if (!known) fail(path, "unknown key '" + k + "'");
        }
    }

    const json& require(const json& obj, const char* key, const std::string& path) const {
        if (!obj.contains(key)) fail(path, std::string("missing field '") + key + "'");
        return obj.at(key);
    }

    std::string text(const json& j, const std::string& path) const {
        if (!j.is_string() || is_raw_number(j)) fail(path, "expected a string");
        return j.get<std::string>();
    }

    Scalar number(const json& j, const std::string& path) const {
        try {
            if (j.is_number_integer()) {
                return j.is_number_unsigned() ? Scalar(std::to_string(j.get<std::uint64_t>()))
                                              : Scalar(std::to_string(j.get<std::int64_t>()));
            }
            if (is_raw_number(j)) return parse_scalar(j.get_ref<const std::string&>().substr(1));
            if (j.is_string()) return parse_scalar(j.get<std::string>());
        } catch (const std::invalid_argument&) {
            fail(path, "not a number: " + describe(j));
        }
        fail(path, "expected a number");
    }

    /// Interval end; "inf" / "-inf" give nullopt.
    std::optional<Scalar> end(const json& j, const std::string& path, bool upper) const {
        if (j.is_string() && !is_raw_number(j)) {
            const std::string s = j.get<std::string>();
            if (s == (upper ? "inf" : "-inf") || (upper && s == "+inf")) return std::nullopt;
            if (s == "inf" || s == "-inf" || s == "+inf") fail(path, "infinite end on the wrong side");
        }
        return number(j, path);
    }

    IntervalSpec interval(const json& j, const std::string& path) const {
        if (!j.is_array() || j.size() != 2) fail(path, "expected an interval [lo, hi]");
        return {end(j[0], path + "[0]", false), end(j[1], path + "[1]", true)};
    }

    double real(const json& j, const std::string& path) const { return to_double(number(j, path)); }

    std::uint64_t natural(const json& j, const std::string& path) const {
        if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
            fail(path, "expected a nonnegative integer");
        }
        return j.get<std::uint64_t>();
    }

    static std::string describe(const json& j) {
        if (is_raw_number(j)) return j.get_ref<const std::string&>().substr(1);
        return j.dump();
    }

private:
    std::string source_;
};

std::size_t variable_index(const Rac& m, const std::string& name, const Reader& rd, const std::string& path) {
    for (std::size_t i = 0; i < m.variables.size(); ++i) {
        if (m.variables[i] == name) return i;
    }
    rd.fail(path, "unknown variable '" + name + "'");
}

/// Variables missing from j keep their entry in `base`.
Rectangle rectangle(const json& j, const Rac& m, const Reader& rd, const std::string& path, Rectangle base) {
    Rectangle r = std::move(base);
    if (!j.is_object()) rd.fail(path, "expected an object keyed by variable");
    for (const auto& [name, value] : j.items()) {
        r[variable_index(m, name, rd, path)] = rd.interval(value, path + "." + name);
    }
    return r;
}

DistributionSpec distribution(const json& j, const Reader& rd, const std::string& path) {
    const std::string type = rd.text(rd.require(j, "type", path), path + ".type");
    if (type == "exp" || type == "exponential") {
        rd.expect_keys(j, path, {"type", "lambda"});
        return Exponential{rd.real(rd.require(j, "lambda", path), path + ".lambda")};
    }
    if (type == "folded_normal") {
        rd.expect_keys(j, path, {"type", "mu", "sigma"});
        return FoldedNormal{rd.real(rd.require(j, "mu", path), path + ".mu"),
                            rd.real(rd.require(j, "sigma", path), path + ".sigma")};
    }
    if (type == "uniform") {
        rd.expect_keys(j, path, {"type", "a", "b"});
        return Uniform{rd.real(rd.require(j, "a", path), path + ".a"), rd.real(rd.require(j, "b", path), path + ".b")};
    }
    rd.fail(path + ".type", "unknown distribution '" + type + "'");
}

GoalSpec goal(const json& j, const Rac& m, const Reader& rd) {
    const std::string path = "goal";
    rd.expect_keys(j, path, {"locations", "constraints"});
    GoalSpec g;
    g.valuation = HPolytope(m.dim());
    const json& locs = rd.require(j, "locations", path);
    if (!locs.is_array() || locs.empty()) rd.fail(path + ".locations", "expected a nonempty list of location names");
    for (std::size_t i = 0; i < locs.size(); ++i) {
        const std::string name = rd.text(locs[i], path + ".locations[" + std::to_string(i) + "]");
        try {
            g.locations.push_back(m.location_index(name));
        } catch (const ModelError&) {
            rd.fail(path + ".locations", "unknown location '" + name + "'");
        }
    }
    if (j.contains("constraints")) {
        const json& rows = j.at("constraints");
        if (!rows.is_array()) rd.fail(path + ".constraints", "expected a list");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string rp = path + ".constraints[" + std::to_string(i) + "]";
            rd.expect_keys(rows[i], rp, {"coeffs", "op", "bound"});
            const json& cj = rd.require(rows[i], "coeffs", rp);
            ScalarVector coeffs(m.dim(), Scalar(0));
            if (cj.is_array()) {
                if (cj.size() != m.dim()) rd.fail(rp + ".coeffs", "expected one coefficient per variable");
                for (std::size_t k = 0; k < cj.size(); ++k) coeffs[k] = rd.number(cj[k], rp + ".coeffs");
            } else if (cj.is_object()) {
                for (const auto& [name, v] : cj.items()) {
                    coeffs[variable_index(m, name, rd, rp + ".coeffs")] = rd.number(v, rp + ".coeffs." + name);
                }
            } else {
                rd.fail(rp + ".coeffs", "expected a list or an object keyed by variable");
            }
            const std::string op = rd.text(rd.require(rows[i], "op", rp), rp + ".op");
            if (op != "<=" && op != "<") rd.fail(rp + ".op", "op must be \"<=\" or \"<\"");
            g.valuation.add({std::move(coeffs), rd.number(rd.require(rows[i], "bound", rp), rp + ".bound"), op == "<"});
        }
    }
    return g;
}

}  // namespace

ModelDocument parse_model(std::string_view text, const std::string& source) {
    const json doc = parse_exact(text, source);
    Reader rd(source);
    rd.expect_keys(doc, "", {"variables", "clocks", "locations", "jumps", "goal", "analysis", "name", "description"});
    ModelDocument out;
    Rac& m = out.rac;

    if (doc.contains("variables")) {
        const json& vars = doc.at("variables");
        if (!vars.is_array()) rd.fail("variables", "expected a list of names");
        for (std::size_t i = 0; i < vars.size(); ++i) {
            m.variables.push_back(rd.text(vars[i], "variables[" + std::to_string(i) + "]"));
        }
    }
    if (doc.contains("clocks")) {
        const json& clocks = doc.at("clocks");
        if (!clocks.is_array()) rd.fail("clocks", "expected a list");
        for (std::size_t i = 0; i < clocks.size(); ++i) {
            const std::string path = "clocks[" + std::to_string(i) + "]";
            rd.expect_keys(clocks[i], path, {"name", "distribution"});
            Clock c;
            c.name = rd.text(rd.require(clocks[i], "name", path), path + ".name");
            c.distribution = distribution(rd.require(clocks[i], "distribution", path), rd,
                                          "distribution of clock '" + c.name + "'");
            m.clocks.push_back(std::move(c));
        }
    }
    const json& locs = rd.require(doc, "locations", "");
    if (!locs.is_array()) rd.fail("locations", "expected a list");
    for (std::size_t i = 0; i < locs.size(); ++i) {
        const std::string path = "locations[" + std::to_string(i) + "]";
        rd.expect_keys(locs[i], path, {"name", "invariant", "flow", "init"});
        Location loc;
        loc.name = rd.text(rd.require(locs[i], "name", path), path + ".name");
        const Rectangle all(m.dim(), IntervalSpec::all());
        loc.invariant = locs[i].contains("invariant")
                            ? rectangle(locs[i].at("invariant"), m, rd, path + ".invariant", all)
                            : all;
        loc.flow = locs[i].contains("flow")
                       ? rectangle(locs[i].at("flow"), m, rd, path + ".flow", Rectangle(m.dim(), IntervalSpec::point(0)))
                       : Rectangle(m.dim(), IntervalSpec::point(0));
        if (locs[i].contains("init")) {
            loc.init = rectangle(locs[i].at("init"), m, rd, path + ".init", all);
        }
        m.locations.push_back(std::move(loc));
    }
    if (doc.contains("jumps")) {
        const json& jumps = doc.at("jumps");
        if (!jumps.is_array()) rd.fail("jumps", "expected a list");
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const std::string path = "jumps[" + std::to_string(i) + "]";
            const json& jj = jumps[i];
            rd.expect_keys(jj, path, {"from", "to", "guard", "reset", "event"});
            Jump e;
            const auto lookup = [&](const char* key) {
                const std::string name = rd.text(rd.require(jj, key, path), path + "." + key);
                for (std::size_t l = 0; l < m.locations.size(); ++l) {
                    if (m.locations[l].name == name) return l;
                }
                rd.fail(path + "." + key, "unknown location '" + name + "'");
            };
            e.source = lookup("from");
            e.target = lookup("to");
            if (jj.contains("event") && !jj.at("event").is_null()) {
                const std::string clock = rd.text(jj.at("event"), path + ".event");
                bool found = false;
                for (std::size_t c = 0; c < m.clocks.size(); ++c) {
                    if (m.clocks[c].name == clock) {
                        e.event = c;
                        found = true;
                    }
                }
                if (!found) rd.fail(path + ".event", "unknown clock '" + clock + "'");
            }
            // unlisted guard components of a nonstochastic jump default to the
            // source invariant; stochastic guards are universal
            const Rectangle open = e.event ? Rectangle(m.dim(), IntervalSpec::all()) : m.locations[e.source].invariant;
            e.guard = jj.contains("guard") ? rectangle(jj.at("guard"), m, rd, path + ".guard", open) : open;
            e.reset.assign(m.dim(), std::nullopt);
            if (jj.contains("reset")) {
                const json& rj = jj.at("reset");
                if (!rj.is_object()) rd.fail(path + ".reset", "expected an object keyed by variable");
                for (const auto& [name, v] : rj.items()) {
                    const std::size_t k = variable_index(m, name, rd, path + ".reset");
                    if (v.is_string() && v.get<std::string>() == "id") continue;
                    e.reset[k] = rd.interval(v, path + ".reset." + name);
                }
            }
            m.jumps.push_back(std::move(e));
        }
    }
    if (doc.contains("goal")) out.goal = goal(doc.at("goal"), m, rd);
    if (doc.contains("analysis")) {
        const json& a = doc.at("analysis");
        rd.expect_keys(a, "analysis", {"tmax", "jumps", "tint", "samples", "seed"});
        if (a.contains("tmax")) out.analysis.tmax = rd.number(a.at("tmax"), "analysis.tmax");
        if (a.contains("jumps")) out.analysis.jumps = rd.natural(a.at("jumps"), "analysis.jumps");
        if (a.contains("tint")) out.analysis.tint = rd.real(a.at("tint"), "analysis.tint");
        if (a.contains("samples")) out.analysis.samples = rd.natural(a.at("samples"), "analysis.samples");
        if (a.contains("seed")) out.analysis.seed = rd.natural(a.at("seed"), "analysis.seed");
    }
    return out;
}

ModelDocument load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path.string());
}

namespace {

json row_json(const LinearConstraint& row) {
    json coeffs = json::array();
    for (const auto& c : row.coeffs) coeffs.push_back(to_string(c));
    return {{"coeffs", coeffs}, {"op", row.strict ? "<" : "<="}, {"bound", to_string(row.bound)}};
}

}  // namespace

std::string dump_trees(const std::vector<ReachTree>& trees, const UnrolledRac& u, const std::optional<GoalSpec>& goal) {
    const StateLayout layout(u);
    json dims = json::array();
    for (const auto& v : u.model.variables) dims.push_back(v);
    dims.push_back("T");
    for (std::size_t k = 0; k < layout.copies; ++k) dims.push_back("mu_" + u.copy_name(k));

    json jtrees = json::array();
    for (const auto& t : trees) {
        std::set<std::size_t> hits;
        if (goal) {
            for (const auto& g : goal_nodes(t, u, *goal)) hits.insert(g.node);
        }
        json nodes = json::array();
        for (const auto& n : t.nodes) {
            const UnrolledLocation& loc = u.locations[n.state.location];
            json rows = json::array();
            for (const auto& row : n.state.polytope.constraints()) rows.push_back(row_json(row));
            json expired = json::array();
            for (std::size_t k : loc.expired) expired.push_back(u.copy_name(k));
            nodes.push_back({{"index", n.index},
                             {"depth", n.depth},
                             {"location", u.model.locations[loc.original].name},
                             {"path", u.location_name(n.state.location)},
                             {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                             {"goal", hits.count(n.index) != 0},
                             {"expired", expired},
                             {"constraints", rows}});
        }
        json edges = json::array();
        for (const auto& e : t.edges) {
            edges.push_back({{"parent", e.parent}, {"jump", e.jump}, {"label", u.model.jump_label(e.jump)}, {"child", e.child}});
        }
        jtrees.push_back({{"root", t.root},
                          {"root_location", u.model.locations[u.locations[t.nodes.front().state.location].original].name},
                          {"nodes", nodes},
                          {"edges", edges},
                          {"max_constraints", t.stats.max_constraints},
                          {"warnings", t.warnings}});
    }
    json doc = {{"dimensions", dims}, {"jumps", u.jmp}, {"trees", jtrees}};
    return doc.dump(2) + "\n";
}

std::vector<std::vector<HPolytope>> read_tree_polytopes(std::string_view dump) {
    const json doc = parse_exact(dump, "<tree dump>");
    Reader rd("<tree dump>");
    const std::size_t dim = rd.require(doc, "dimensions", "").size();
    std::vector<std::vector<HPolytope>> out;
    for (const auto& t : rd.require(doc, "trees", "")) {
        auto& polys = out.emplace_back();
        for (const auto& n : rd.require(t, "nodes", "trees")) {
            HPolytope p(dim);
            for (const auto& row : rd.require(n, "constraints", "nodes")) {
                ScalarVector c;
                for (const auto& v : row.at("coeffs")) c.push_back(rd.number(v, "coeffs"));
                if (c.size() != dim) rd.fail("constraints", "row length does not match the dimensions");
                p.add({std::move(c), rd.number(row.at("bound"), "bound"), row.at("op").get<std::string>() == "<"});
            }
            polys.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace racreach
